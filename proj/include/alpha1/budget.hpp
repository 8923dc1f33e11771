#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "alpha1/benchmark.hpp"
#include "alpha1/config.hpp"
#include "alpha1/harness.hpp"

namespace alpha1 {

struct BudgetProvenance {
  enum class Kind { Manual, Estimated };
  Kind kind = Kind::Manual;
  int sample_n = 0;        // Estimated only
  std::uint64_t seed = 0;  // Estimated only
};

// Average thinking-phase token length per (model, benchmark). Lookups for
// missing keys fail explicitly; there is no silent default.
struct BudgetTable {
  std::map<std::pair<std::string, std::string>, std::uint64_t> entries;
  BudgetProvenance provenance;

  std::uint64_t lookup(const std::string& model_id, const std::string& benchmark_id) const;
  void set(const std::string& model_id, const std::string& benchmark_id, std::uint64_t n_think_avg);
};

// The reference measurements shipped with the engine: 3 models x 6 benchmarks.
BudgetTable bundled_budget_table();

// JSON file keyed "<model_id>/<benchmark_id>". Store writes atomically
// (temp file + rename).
BudgetTable load_budget_table(const std::filesystem::path& path);
void store_budget_table(const BudgetTable& table, const std::filesystem::path& path);

struct BudgetEstimate {
  std::uint64_t n_think_avg = 0;
  struct Sample {
    std::string task_id;
    std::uint64_t think_tokens = 0;
    bool saw_end_think = false;
  };
  std::vector<Sample> samples;
  bool sampled_with_replacement = false;
};

// Runs the base strategy on sample_n seeded-sampled tasks and returns the
// rounded mean thinking-phase token length (tokens before the first
// end-of-thinking token; full completion length when it never appears).
BudgetEstimate estimate_thinking_budget(const BackendFactory& factory,
                                        const std::vector<BenchmarkTask>& tasks, int sample_n,
                                        std::uint64_t seed, const GenerationLimits& limits);

}  // namespace alpha1
