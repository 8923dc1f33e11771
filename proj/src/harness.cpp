#include "alpha1/harness.hpp"

#include <chrono>
#include <stdexcept>

#include "alpha1/answer.hpp"
#include "alpha1/util.hpp"

namespace alpha1 {

RunResult run_task(const BackendFactory& factory, const StrategySpec& strategy,
                   const BenchmarkTask& task, std::uint64_t master_seed) {
  RunResult result;
  result.task_id = task.id;
  result.seed = derive_task_seed(master_seed, task.id);
  const auto started = std::chrono::steady_clock::now();
  try {
    const auto backend = factory.session_for(task.id);
    Transcript transcript;
    switch (strategy.kind) {
      case StrategyKind::Alpha1:
        transcript = run_alpha_one(*backend, strategy.config, task.prompt, result.seed);
        break;
      case StrategyKind::Base:
        transcript = run_base(*backend, task.prompt, limits_from(strategy.config), result.seed);
        break;
      case StrategyKind::S1:
        transcript = run_s1(*backend, strategy.config, task.prompt, strategy.max_suppressions,
                            result.seed);
        break;
      case StrategyKind::Cod:
        transcript = run_cod(*backend, strategy.cod_template, task.prompt,
                             limits_from(strategy.config), result.seed);
        break;
    }
    result.extracted_answer = extract_boxed_answer(transcript.text());
    result.correct = result.extracted_answer &&
                     check_answer(*result.extracted_answer, task.gold, task.checker);
    result.think_tokens = transcript.final_state.think_tokens;
    result.total_tokens = transcript.final_state.total_tokens;
    result.injections = transcript.final_state.injections;
    result.suppressions = transcript.final_state.suppressions;
    result.transcript = std::move(transcript);
  } catch (const RunAborted& e) {
    result.error = e.what();
    result.transcript = e.partial;
    result.correct = false;
  } catch (const std::exception& e) {
    result.error = e.what();
    result.correct = false;
  }
  result.wall_time_ms = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                            started)
          .count());
  return result;
}

std::vector<RunResult> evaluate_strategy_serial(const BackendFactory& factory,
                                                const StrategySpec& strategy,
                                                const std::vector<BenchmarkTask>& tasks,
                                                std::uint64_t master_seed, bool fail_fast) {
  std::vector<RunResult> results;
  results.reserve(tasks.size());
  for (const auto& task : tasks) {
    results.push_back(run_task(factory, strategy, task, master_seed));
    if (fail_fast && results.back().error) {
      throw std::runtime_error("task " + task.id + " failed: " + *results.back().error);
    }
  }
  return results;
}

std::vector<RunResult> evaluate_strategy(const BackendFactory& factory,
                                         const StrategySpec& strategy,
                                         const std::vector<BenchmarkTask>& tasks,
                                         std::uint64_t master_seed, int parallelism,
                                         bool fail_fast) {
  if (parallelism <= 1 || tasks.size() < 2) {
    return evaluate_strategy_serial(factory, strategy, tasks, master_seed, fail_fast);
  }
  std::vector<RunResult> results(tasks.size());
  const auto n = static_cast<std::int64_t>(tasks.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(parallelism)
#endif
  for (std::int64_t i = 0; i < n; ++i) {
    results[static_cast<std::size_t>(i)] =
        run_task(factory, strategy, tasks[static_cast<std::size_t>(i)], master_seed);
  }
  if (fail_fast) {
    for (std::size_t i = 0; i < results.size(); ++i) {
      if (results[i].error) {
        throw std::runtime_error("task " + tasks[i].id + " failed: " + *results[i].error);
      }
    }
  }
  return results;
}

double pass_at_1(const std::vector<RunResult>& results) {
  if (results.empty()) throw std::invalid_argument("pass_at_1: no results");
  std::size_t correct = 0;
  for (const auto& result : results) {
    if (result.correct) ++correct;
  }
  return 100.0 * static_cast<double>(correct) / static_cast<double>(results.size());
}

std::string to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::Alpha1: return "alpha1";
    case StrategyKind::Base: return "base";
    case StrategyKind::S1: return "s1";
    case StrategyKind::Cod: return "cod";
  }
  return "?";
}

StrategyKind strategy_kind_from_string(const std::string& name) {
  if (name == "alpha1") return StrategyKind::Alpha1;
  if (name == "base") return StrategyKind::Base;
  if (name == "s1") return StrategyKind::S1;
  if (name == "cod") return StrategyKind::Cod;
  throw std::invalid_argument("unknown strategy: " + name);
}

}  // namespace alpha1
