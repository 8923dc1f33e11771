#include "alpha1/budget.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include "alpha1/util.hpp"
#include "json.hpp"

namespace alpha1 {

std::uint64_t BudgetTable::lookup(const std::string& model_id,
                                  const std::string& benchmark_id) const {
  const auto it = entries.find({model_id, benchmark_id});
  if (it == entries.end()) {
    throw std::out_of_range("budget missing: no entry for " + model_id + "/" + benchmark_id);
  }
  return it->second;
}

void BudgetTable::set(const std::string& model_id, const std::string& benchmark_id,
                      std::uint64_t n_think_avg) {
  if (n_think_avg < 1) throw std::invalid_argument("budget entries must be >= 1");
  entries[{model_id, benchmark_id}] = n_think_avg;
}

BudgetTable bundled_budget_table() {
  static constexpr const char* kBenchmarks[] = {"AIME24",  "AMC23",         "Minerva",
                                                "MATH500", "LiveCodeBench", "OlympiadBench"};
  static constexpr struct {
    const char* model;
    std::uint64_t n[6];
  } kRows[] = {
      {"DeepSeek-R1-Distill-Qwen-1.5B", {4130, 3303, 3101, 2435, 2172, 3417}},
      {"DeepSeek-R1-Distill-Qwen-7B", {4751, 3243, 3064, 2352, 3120, 3330}},
      {"Qwen QwQ-32B", {2597, 2124, 1710, 1493, 4915, 2052}},
  };
  BudgetTable table;
  table.provenance.kind = BudgetProvenance::Kind::Manual;
  for (const auto& row : kRows) {
    for (std::size_t i = 0; i < 6; ++i) {
      table.set(row.model, kBenchmarks[i], row.n[i]);
    }
  }
  return table;
}

BudgetTable load_budget_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open budget table: " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("budget table " + path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_object()) {
    throw ParseError("budget table " + path.string() + ": expected {\"entries\": {...}}");
  }
  BudgetTable table;
  if (doc.contains("provenance")) {
    const auto& provenance = doc["provenance"];
    const std::string kind = provenance.value("kind", "manual");
    if (kind == "estimated") {
      table.provenance.kind = BudgetProvenance::Kind::Estimated;
      table.provenance.sample_n = provenance.value("sample_n", 0);
      table.provenance.seed = provenance.value("seed", std::uint64_t{0});
    }
  }
  for (const auto& [key, value] : doc["entries"].items()) {
    // Model ids may themselves contain '/'; the benchmark id never does.
    const std::size_t slash = key.rfind('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 == key.size()) {
      throw ParseError("budget table " + path.string() + ": bad key \"" + key +
                       "\" (want \"<model>/<benchmark>\")");
    }
    if (!value.is_number_unsigned() || value.get<std::uint64_t>() < 1) {
      throw ParseError("budget table " + path.string() + ": entry \"" + key +
                       "\" must be a positive integer");
    }
    table.set(key.substr(0, slash), key.substr(slash + 1), value.get<std::uint64_t>());
  }
  return table;
}

void store_budget_table(const BudgetTable& table, const std::filesystem::path& path) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = 1;
  if (table.provenance.kind == BudgetProvenance::Kind::Estimated) {
    doc["provenance"] = {{"kind", "estimated"},
                         {"sample_n", table.provenance.sample_n},
                         {"seed", table.provenance.seed}};
  } else {
    doc["provenance"] = {{"kind", "manual"}};
  }
  auto& entries = doc["entries"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : table.entries) {
    entries[key.first + "/" + key.second] = value;
  }
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << doc.dump(2) << "\n";
  }
  std::filesystem::rename(tmp, path);
}

BudgetEstimate estimate_thinking_budget(const BackendFactory& factory,
                                        const std::vector<BenchmarkTask>& tasks, int sample_n,
                                        std::uint64_t seed, const GenerationLimits& limits) {
  if (tasks.empty()) throw std::invalid_argument("estimate_thinking_budget: no tasks");
  if (sample_n < 1) throw std::invalid_argument("estimate_thinking_budget: sample_n must be >= 1");

  std::mt19937_64 rng(seed);
  const std::size_t n = tasks.size();
  std::vector<std::size_t> picked;
  if (static_cast<std::size_t>(sample_n) <= n) {
    // Partial Fisher-Yates; modulo draw keeps the procedure portable.
    std::vector<std::size_t> indices(n);
    std::iota(indices.begin(), indices.end(), std::size_t{0});
    for (int i = 0; i < sample_n; ++i) {
      const std::size_t j = static_cast<std::size_t>(i) + rng() % (n - static_cast<std::size_t>(i));
      std::swap(indices[static_cast<std::size_t>(i)], indices[j]);
      picked.push_back(indices[static_cast<std::size_t>(i)]);
    }
  } else {
    log_warn("estimate_thinking_budget: sample_n " + std::to_string(sample_n) + " exceeds " +
             std::to_string(n) + " tasks; sampling with replacement");
    for (int i = 0; i < sample_n; ++i) picked.push_back(rng() % n);
  }

  BudgetEstimate estimate;
  estimate.sampled_with_replacement = static_cast<std::size_t>(sample_n) > n;
  std::uint64_t sum = 0;
  for (const std::size_t index : picked) {
    const auto& task = tasks[index];
    const auto backend = factory.session_for(task.id);
    Transcript transcript;
    try {
      transcript = run_base(*backend, task.prompt, limits, derive_task_seed(seed, task.id));
    } catch (const RunAborted& e) {
      throw std::runtime_error("estimate_thinking_budget: task " + task.id +
                               " failed after " + std::to_string(estimate.samples.size()) +
                               " samples: " + e.what());
    }
    BudgetEstimate::Sample sample;
    sample.task_id = task.id;
    const std::string text = transcript.text();
    const std::size_t pos = text.find(limits.end_think_token);
    sample.saw_end_think = pos != std::string::npos;
    if (sample.saw_end_think) {
      sample.think_tokens = backend->count_tokens(std::string_view(text).substr(0, pos));
    } else {
      sample.think_tokens = transcript.final_state.total_tokens;
      log_warn("estimate_thinking_budget: task " + task.id +
               " never emitted the end-of-thinking token; using full completion length");
    }
    sum += sample.think_tokens;
    estimate.samples.push_back(std::move(sample));
  }
  const double mean = static_cast<double>(sum) / static_cast<double>(estimate.samples.size());
  estimate.n_think_avg =
      std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::floor(mean + 0.5)));
  return estimate;
}

}  // namespace alpha1
