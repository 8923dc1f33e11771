// Compares the serial reference evaluator against the OpenMP-parallel one on
// a synthetic scripted workload: wall time per worker count, plus a byte-level
// check that parallel output matches the serial reference exactly.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "alpha1/harness.hpp"
#include "alpha1/serialize.hpp"

using namespace alpha1;

namespace {

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

Script workload_script(int events) {
  std::string emission;
  emission.reserve(static_cast<std::size_t>(events) * 8);
  for (int i = 0; i < events; ++i) emission += "mull it over\n\n";
  emission += "</think> The answer is \\boxed{42}.";
  Script script;
  script.rules.push_back({ScriptRule::Trigger::Always, "", std::move(emission)});
  return script;
}

}  // namespace

int main(int argc, char** argv) {
  const int n_tasks = argc > 1 ? std::atoi(argv[1]) : 64;
  const int events_per_task = argc > 2 ? std::atoi(argv[2]) : 400;

  ScriptedBackendFactory factory(workload_script(events_per_task));
  std::vector<BenchmarkTask> tasks;
  for (int i = 0; i < n_tasks; ++i) {
    tasks.push_back({"bench-task-" + std::to_string(i), "compute the answer", "42",
                     {CheckerKind::NumericEquivalent, 1e-4}, "synthetic"});
  }

  StrategySpec strategy;
  strategy.kind = StrategyKind::Alpha1;
  strategy.config.schedule.family = ScheduleFamily::LinearAnneal;
  strategy.config.schedule.t_m = static_cast<std::uint64_t>(events_per_task) * 4;
  strategy.config.max_total_tokens = 1u << 20;

  std::cout << "tasks=" << n_tasks << " delimiter_events/task=" << events_per_task << "\n";
#ifdef _OPENMP
  std::cout << "OpenMP max threads: " << omp_get_max_threads() << "\n";
#else
  std::cout << "OpenMP not available; every configuration runs serially\n";
#endif

  double t0 = now_seconds();
  const auto reference = evaluate_strategy_serial(factory, strategy, tasks, 1);
  const double serial_time = now_seconds() - t0;
  const std::string reference_bytes = results_to_jsonl(reference);
  std::cout << "serial reference:   " << serial_time << " s  (pass@1=" << pass_at_1(reference)
            << ")\n";

  bool all_match = true;
  for (const int workers : {2, 4, 8}) {
    t0 = now_seconds();
    const auto parallel = evaluate_strategy(factory, strategy, tasks, 1, workers);
    const double elapsed = now_seconds() - t0;
    const bool match = results_to_jsonl(parallel) == reference_bytes;
    all_match = all_match && match;
    std::cout << "parallel x" << workers << ":        " << elapsed << " s  speedup "
              << serial_time / elapsed << "  results " << (match ? "identical" : "MISMATCH")
              << "\n";
  }

  if (!all_match) {
    std::cerr << "parallel results diverged from the serial reference\n";
    return 1;
  }
  return 0;
}
