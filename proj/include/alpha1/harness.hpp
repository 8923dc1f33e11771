#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "alpha1/backend.hpp"
#include "alpha1/benchmark.hpp"
#include "alpha1/controller.hpp"
#include "alpha1/scripted_model.hpp"

namespace alpha1 {

enum class StrategyKind { Alpha1, Base, S1, Cod };

struct StrategySpec {
  StrategyKind kind = StrategyKind::Alpha1;
  ModulationConfig config;     // alpha1/s1 parameters; limits for base/cod
  int max_suppressions = 2;    // s1 only
  std::string cod_template = kDefaultCodTemplate;  // cod only
};

struct RunResult {
  std::string task_id;
  std::uint64_t seed = 0;
  Transcript transcript;
  std::optional<std::string> extracted_answer;
  bool correct = false;
  std::uint64_t think_tokens = 0;
  std::uint64_t total_tokens = 0;
  std::uint64_t injections = 0;
  std::uint64_t suppressions = 0;
  std::uint64_t wall_time_ms = 0;  // not serialized; results files stay deterministic
  std::optional<std::string> error;
};

// Hands out one backend session per run. Sessions must be independent:
// scripted models carry a cursor, so every run gets a fresh instance.
class BackendFactory {
 public:
  virtual ~BackendFactory() = default;
  virtual std::unique_ptr<Backend> session_for(const std::string& task_id) const = 0;
};

// Every task replays the same script unless a per-task override is installed.
class ScriptedBackendFactory final : public BackendFactory {
 public:
  explicit ScriptedBackendFactory(Script script) : default_script_(std::move(script)) {}
  void set_task_script(const std::string& task_id, Script script) {
    per_task_[task_id] = std::move(script);
  }
  std::unique_ptr<Backend> session_for(const std::string& task_id) const override {
    const auto it = per_task_.find(task_id);
    return std::make_unique<ScriptedModel>(it != per_task_.end() ? it->second : default_script_);
  }

 private:
  Script default_script_;
  std::map<std::string, Script> per_task_;
};

// One run end to end: fresh session, strategy dispatch, answer extraction and
// checking. Failures land in RunResult::error; they never throw.
RunResult run_task(const BackendFactory& factory, const StrategySpec& strategy,
                   const BenchmarkTask& task, std::uint64_t master_seed);

// One RunResult per task, in task order regardless of completion order.
// Per-task seeds derive from (master_seed, task id), so the outcome is
// independent of parallelism; parallelism > 1 fans tasks out over an OpenMP
// worker pool. The serial path is the reference the parallel one is tested
// against.
std::vector<RunResult> evaluate_strategy(const BackendFactory& factory,
                                         const StrategySpec& strategy,
                                         const std::vector<BenchmarkTask>& tasks,
                                         std::uint64_t master_seed, int parallelism,
                                         bool fail_fast = false);
std::vector<RunResult> evaluate_strategy_serial(const BackendFactory& factory,
                                                const StrategySpec& strategy,
                                                const std::vector<BenchmarkTask>& tasks,
                                                std::uint64_t master_seed, bool fail_fast = false);

// 100 * (#correct / #results); rejects empty input.
double pass_at_1(const std::vector<RunResult>& results);

std::string to_string(StrategyKind kind);
StrategyKind strategy_kind_from_string(const std::string& name);

}  // namespace alpha1
