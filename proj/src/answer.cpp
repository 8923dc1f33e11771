#include "alpha1/answer.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace alpha1 {

namespace {

constexpr std::string_view kBoxed = "\\boxed{";

// Walks braces from `open` (the '{' of a \boxed group); returns the offset of
// the matching '}' or npos if the group never closes.
std::size_t matching_brace(std::string_view text, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < text.size(); ++i) {
    if (text[i] == '{') {
      ++depth;
    } else if (text[i] == '}') {
      if (--depth == 0) return i;
    }
  }
  return std::string_view::npos;
}

std::optional<double> parse_real(const std::string& text) {
  const std::string trimmed = normalize_answer_text(text);
  if (trimmed.empty()) return std::nullopt;
  const char* begin = trimmed.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end != begin + trimmed.size()) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

}  // namespace

std::optional<std::string> extract_boxed_answer(std::string_view text) {
  std::optional<std::string> found;
  std::size_t from = 0;
  for (;;) {
    const std::size_t pos = text.find(kBoxed, from);
    if (pos == std::string_view::npos) break;
    const std::size_t open = pos + kBoxed.size() - 1;
    const std::size_t close = matching_brace(text, open);
    if (close != std::string_view::npos) {
      found = std::string(text.substr(open + 1, close - open - 1));
    }
    from = pos + kBoxed.size();
  }
  return found;
}

std::string normalize_answer_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!out.empty()) pending_space = true;
    } else {
      if (pending_space) out += ' ';
      pending_space = false;
      out += c;
    }
  }
  return out;
}

bool check_answer(const std::string& extracted, const std::string& gold, const Checker& checker) {
  switch (checker.kind) {
    case CheckerKind::ExactMatch:
      return normalize_answer_text(extracted) == normalize_answer_text(gold);
    case CheckerKind::NumericEquivalent: {
      const auto a = parse_real(extracted);
      const auto b = parse_real(gold);
      if (!a || !b) return false;
      return std::fabs(*a - *b) <= checker.rel_tol * std::max(1.0, std::fabs(*b));
    }
  }
  return false;
}

}  // namespace alpha1
