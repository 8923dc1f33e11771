#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace alpha1 {

enum class CheckerKind { ExactMatch, NumericEquivalent };

struct Checker {
  CheckerKind kind = CheckerKind::ExactMatch;
  double rel_tol = 1e-4;  // NumericEquivalent only
};

struct BenchmarkTask {
  std::string id;
  std::string prompt;
  std::string gold;
  Checker checker;
  std::string domain;
};

// JSONL, one task per line:
//   {"id": ..., "prompt": ..., "gold": ..., "checker": "exact" |
//    {"numeric": {"rel_tol": f}}, "domain": ...}
// Parse errors carry line numbers; duplicate ids are rejected.
std::vector<BenchmarkTask> load_benchmark(const std::filesystem::path& path);
std::vector<BenchmarkTask> parse_benchmark_jsonl(const std::string& text);

}  // namespace alpha1
