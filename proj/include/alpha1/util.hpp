#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace alpha1 {

// Maximal runs of non-whitespace bytes. The scripted backend uses these as its
// tokens; also used as the fallback counting rule for injected strings.
std::uint64_t count_words(std::string_view text);

// Byte offset just past the n-th word (n >= 1), or text.size() if there are
// fewer than n words.
std::size_t word_cut_offset(std::string_view text, std::uint64_t n);

std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t splitmix64(std::uint64_t x);

// Stable across platforms and executions; std::hash is neither.
std::uint64_t derive_task_seed(std::uint64_t master_seed, std::string_view task_id);

// Uniform double in [0,1) from the top 53 bits of the generator.
double uniform_unit(std::mt19937_64& rng);

bool iequals(std::string_view a, std::string_view b);

void log_warn(const std::string& msg);

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what, int line_no = 0);
  int line = 0;
};

}  // namespace alpha1
