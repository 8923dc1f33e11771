#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "alpha1/benchmark.hpp"

namespace alpha1 {

// Contents of the last well-formed \boxed{...} in the text, with balanced
// braces (nested groups preserved). Absence is a value, not an error.
std::optional<std::string> extract_boxed_answer(std::string_view text);

// ExactMatch: trimmed, internal-whitespace-collapsed string equality.
// NumericEquivalent: both sides parse as reals and
// |a - b| <= rel_tol * max(1, |b|); unparsable input is simply wrong.
bool check_answer(const std::string& extracted, const std::string& gold, const Checker& checker);

std::string normalize_answer_text(std::string_view text);

}  // namespace alpha1
