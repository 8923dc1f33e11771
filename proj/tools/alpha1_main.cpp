// Command-line front end: budget estimation, strategy runs, and four-way
// comparisons over JSONL benchmarks, with results/report/transcript emission.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "alpha1/budget.hpp"
#include "alpha1/harness.hpp"
#include "alpha1/http_backend.hpp"
#include "alpha1/metrics.hpp"
#include "alpha1/serialize.hpp"
#include "alpha1/util.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace alpha1;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct CliOptions {
  std::string strategy = "alpha1";
  std::string script;
  std::string endpoint;
  std::string model;
  std::string benchmark;
  std::string benchmark_id;
  std::string output_dir = "alpha1-out";
  std::uint64_t seed = 0;
  int parallelism = 1;
  int samples = 1;
  bool fail_fast = false;

  double alpha = 1.4;
  std::string schedule = "linear-anneal";
  double p_constant = 1.0;
  double gamma = 0.3;
  std::string exp_time_base = "event";
  std::string transition_token = "Wait,";
  std::string early_end_policy = "respect";
  int max_suppressions = 2;
  std::uint64_t max_tokens = 8192;
  double temperature = 0.6;
  double top_p = 0.95;
  std::uint64_t n_think = 0;  // 0 means "resolve from a budget table"
  std::string budget_file;
  std::string cod_template = kDefaultCodTemplate;
  int estimate_n = 10;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Config file (JSON) mirrors the flag names; CLI flags win.
void apply_config_file(const fs::path& path, CliOptions& opts) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("config file " + path.string() + ": " + e.what());
  }
  const auto str = [&](const char* key, std::string& out) {
    if (doc.contains(key)) out = doc[key].get<std::string>();
  };
  const auto num = [&](const char* key, auto& out) {
    if (doc.contains(key)) out = doc[key].get<std::decay_t<decltype(out)>>();
  };
  str("strategy", opts.strategy);
  str("script", opts.script);
  str("endpoint", opts.endpoint);
  str("model", opts.model);
  str("benchmark", opts.benchmark);
  str("benchmark_id", opts.benchmark_id);
  str("output_dir", opts.output_dir);
  num("seed", opts.seed);
  num("parallelism", opts.parallelism);
  num("samples", opts.samples);
  if (doc.contains("fail_fast")) opts.fail_fast = doc["fail_fast"].get<bool>();
  num("alpha", opts.alpha);
  str("schedule", opts.schedule);
  num("p_constant", opts.p_constant);
  num("gamma", opts.gamma);
  str("exp_time_base", opts.exp_time_base);
  str("transition_token", opts.transition_token);
  str("early_end_policy", opts.early_end_policy);
  num("max_suppressions", opts.max_suppressions);
  num("max_tokens", opts.max_tokens);
  num("temperature", opts.temperature);
  num("top_p", opts.top_p);
  num("n_think", opts.n_think);
  str("budget_file", opts.budget_file);
  str("cod_template", opts.cod_template);
  num("estimate_n", opts.estimate_n);
}

std::unique_ptr<BackendFactory> make_factory(const CliOptions& opts) {
  const bool scripted = !opts.script.empty();
  std::string endpoint = opts.endpoint;
  if (endpoint.empty()) {
    if (const char* env = std::getenv("ALPHA1_ENDPOINT")) endpoint = env;
  }
  if (scripted && !endpoint.empty()) {
    throw UsageError("choose one backend: --script or --endpoint, not both");
  }
  if (scripted) {
    return std::make_unique<ScriptedBackendFactory>(load_script(opts.script));
  }
  if (!endpoint.empty()) {
    HttpBackendConfig config;
    config.endpoint = endpoint;
    if (const char* key = std::getenv("ALPHA1_API_KEY")) config.api_key = key;
    config.model = opts.model;
    return std::make_unique<HttpBackendFactory>(config);
  }
  throw UsageError("no backend selected: pass --script or --endpoint (or set ALPHA1_ENDPOINT)");
}

std::string effective_benchmark_id(const CliOptions& opts) {
  if (!opts.benchmark_id.empty()) return opts.benchmark_id;
  return fs::path(opts.benchmark).stem().string();
}

std::uint64_t resolve_n_think(const CliOptions& opts) {
  if (opts.n_think > 0) return opts.n_think;
  const std::string benchmark_id = effective_benchmark_id(opts);
  if (opts.model.empty()) {
    throw UsageError("budget missing: pass --n-think, or --model (with optional --budget-file) "
                     "so the budget table can be consulted");
  }
  try {
    const BudgetTable table = opts.budget_file.empty() ? bundled_budget_table()
                                                       : load_budget_table(opts.budget_file);
    return table.lookup(opts.model, benchmark_id);
  } catch (const std::out_of_range& e) {
    throw UsageError(e.what());
  }
}

ModulationConfig modulation_config(const CliOptions& opts, bool resolve_budget) {
  ModulationConfig config;
  config.alpha = opts.alpha;
  config.schedule.family = schedule_family_from_string(opts.schedule);
  config.schedule.p_constant = opts.p_constant;
  config.schedule.gamma = opts.gamma;
  config.schedule.time_base = exp_time_base_from_string(opts.exp_time_base);
  config.transition_token = opts.transition_token;
  config.early_end_policy = early_end_policy_from_string(opts.early_end_policy);
  config.max_total_tokens = opts.max_tokens;
  config.temperature = opts.temperature;
  config.top_p = opts.top_p;
  if (resolve_budget) {
    config.schedule.t_m = compute_alpha_moment(config.alpha, resolve_n_think(opts));
  }
  if (const auto errors = validate(config); !errors.empty()) {
    std::string message = "invalid configuration:";
    for (const auto& error : errors) message += "\n  - " + error;
    throw UsageError(message);
  }
  return config;
}

StrategySpec make_strategy(const CliOptions& opts, StrategyKind kind) {
  StrategySpec strategy;
  strategy.kind = kind;
  strategy.config = modulation_config(opts, kind == StrategyKind::Alpha1);
  strategy.max_suppressions = opts.max_suppressions;
  strategy.cod_template = opts.cod_template;
  return strategy;
}

std::string safe_filename(const std::string& id) {
  std::string out;
  for (char c : id) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ||
                    c == '.';
    out += ok ? c : '_';
  }
  return out.empty() ? "task" : out;
}

std::vector<RunResult> run_samples(const BackendFactory& factory, const StrategySpec& strategy,
                                   const std::vector<BenchmarkTask>& tasks,
                                   const CliOptions& opts, const fs::path& transcript_dir) {
  fs::create_directories(transcript_dir);
  std::vector<RunResult> all;
  for (int sample = 0; sample < opts.samples; ++sample) {
    const std::uint64_t master = opts.seed + static_cast<std::uint64_t>(sample);
    auto results =
        evaluate_strategy(factory, strategy, tasks, master, opts.parallelism, opts.fail_fast);
    for (const auto& result : results) {
      const std::string suffix = opts.samples > 1 ? "__s" + std::to_string(sample) : "";
      save_transcript(result.transcript,
                      transcript_dir / (safe_filename(result.task_id) + suffix + ".json"));
    }
    all.insert(all.end(), std::make_move_iterator(results.begin()),
               std::make_move_iterator(results.end()));
  }
  return all;
}

void attach_sweep_metadata(AggregateReport& report, const StrategySpec& strategy) {
  if (strategy.kind != StrategyKind::Alpha1) return;
  report.alpha = strategy.config.alpha;
  if (strategy.config.schedule.family == ScheduleFamily::Constant) {
    report.p_constant = strategy.config.schedule.p_constant;
  }
}

void print_report_line(const AggregateReport& report) {
  std::cout << report.strategy << "  pass@1=" << report.pass_at_1
            << "  mean_total_tokens=" << report.mean_total_tokens
            << "  mean_think_tokens=" << report.mean_think_tokens;
  if (report.delta_p1) std::cout << "  delta_p1=" << *report.delta_p1;
  if (report.rep) std::cout << "  rep=" << *report.rep;
  std::cout << "\n";
}

int cmd_run(const CliOptions& opts) {
  if (opts.benchmark.empty()) throw UsageError("missing --benchmark");
  const auto tasks = load_benchmark(opts.benchmark);
  const auto factory = make_factory(opts);
  const StrategySpec strategy = make_strategy(opts, strategy_kind_from_string(opts.strategy));
  const std::string benchmark_id = effective_benchmark_id(opts);

  const fs::path out_dir(opts.output_dir);
  fs::create_directories(out_dir);
  const auto results = run_samples(*factory, strategy, tasks, opts, out_dir / "transcripts");
  write_results_jsonl(results, out_dir / "results.jsonl");

  AggregateReport report =
      aggregate(results, to_string(strategy.kind), benchmark_id, std::nullopt,
                static_cast<double>(opts.max_tokens));
  attach_sweep_metadata(report, strategy);
  emit_report({report}, ReportFormat::Csv, out_dir / "report.csv");
  emit_report({report}, ReportFormat::Json, out_dir / "report.json");
  print_report_line(report);
  return kExitOk;
}

int cmd_compare(const CliOptions& opts) {
  if (opts.benchmark.empty()) throw UsageError("missing --benchmark");
  const auto tasks = load_benchmark(opts.benchmark);
  const auto factory = make_factory(opts);
  const std::string benchmark_id = effective_benchmark_id(opts);
  const fs::path out_dir(opts.output_dir);
  fs::create_directories(out_dir);

  // Base first: the other strategies report delta and REP against it.
  const StrategyKind order[] = {StrategyKind::Base, StrategyKind::S1, StrategyKind::Cod,
                                StrategyKind::Alpha1};
  std::optional<AggregateReport> base_report;
  std::vector<AggregateReport> reports;
  for (const StrategyKind kind : order) {
    const StrategySpec strategy = make_strategy(opts, kind);
    const std::string name = to_string(kind);
    const auto results =
        run_samples(*factory, strategy, tasks, opts, out_dir / "transcripts" / name);
    write_results_jsonl(results, out_dir / ("results-" + name + ".jsonl"));
    AggregateReport report =
        aggregate(results, name, benchmark_id,
                  kind == StrategyKind::Base ? std::nullopt : base_report,
                  static_cast<double>(opts.max_tokens));
    if (kind == StrategyKind::Base) {
      // Self-reference pins the base row at delta 0, REP 0.
      report = aggregate(results, name, benchmark_id, report, static_cast<double>(opts.max_tokens));
      base_report = report;
    }
    attach_sweep_metadata(report, strategy);
    print_report_line(report);
    reports.push_back(std::move(report));
  }
  emit_report(reports, ReportFormat::Csv, out_dir / "report.csv");
  emit_report(reports, ReportFormat::Json, out_dir / "report.json");
  return kExitOk;
}

int cmd_estimate_budget(const CliOptions& opts) {
  if (opts.benchmark.empty()) throw UsageError("missing --benchmark");
  const auto tasks = load_benchmark(opts.benchmark);
  const auto factory = make_factory(opts);
  GenerationLimits limits;
  limits.max_total_tokens = opts.max_tokens;
  limits.temperature = opts.temperature;
  limits.top_p = opts.top_p;

  const BudgetEstimate estimate =
      estimate_thinking_budget(*factory, tasks, opts.estimate_n, opts.seed, limits);
  for (const auto& sample : estimate.samples) {
    std::cerr << "sample " << sample.task_id << ": think_tokens=" << sample.think_tokens
              << (sample.saw_end_think ? "" : " (no end-of-thinking token)") << "\n";
  }
  std::cout << estimate.n_think_avg << "\n";

  if (!opts.budget_file.empty()) {
    if (opts.model.empty()) throw UsageError("--budget-file needs --model to key the entry");
    BudgetTable table;
    if (fs::exists(opts.budget_file)) table = load_budget_table(opts.budget_file);
    table.set(opts.model, effective_benchmark_id(opts), estimate.n_think_avg);
    table.provenance = {BudgetProvenance::Kind::Estimated, opts.estimate_n, opts.seed};
    store_budget_table(table, opts.budget_file);
    std::cerr << "updated " << opts.budget_file << "\n";
  }
  return kExitOk;
}

void add_common_options(CLI::App* app, CliOptions& opts) {
  app->add_option("--config", [&opts](const std::vector<std::string>& values) {
    apply_config_file(values.back(), opts);
    return true;
  }, "JSON config file; flags override it")->trigger_on_parse();
  app->add_option("--script", opts.script, "scripted backend: path to a script JSON");
  app->add_option("--endpoint", opts.endpoint,
                  "HTTP backend: OpenAI-compatible base URL (or env ALPHA1_ENDPOINT)");
  app->add_option("--model", opts.model, "model id (HTTP request + budget table key)");
  app->add_option("--benchmark", opts.benchmark, "benchmark JSONL path");
  app->add_option("--benchmark-id", opts.benchmark_id,
                  "benchmark id for budget lookups (default: file stem)");
  app->add_option("--seed", opts.seed, "master seed; all randomness flows from it");
  app->add_option("--max-tokens", opts.max_tokens, "total completion token cap");
  app->add_option("--temperature", opts.temperature, "sampling temperature");
  app->add_option("--top-p", opts.top_p, "nucleus sampling threshold");
}

void add_strategy_options(CLI::App* app, CliOptions& opts) {
  app->add_option("--output-dir", opts.output_dir, "where results/report/transcripts go");
  app->add_option("--parallelism", opts.parallelism, "task-level worker count");
  app->add_option("--samples", opts.samples, "independent single-sample runs to average");
  app->add_flag("--fail-fast", opts.fail_fast, "abort the batch on the first task failure");
  app->add_option("--alpha", opts.alpha, "thinking-phase scale factor");
  app->add_option("--schedule", opts.schedule,
                  "{constant,linear-increase,linear-anneal,exp-anneal}");
  app->add_option("--p-constant", opts.p_constant, "probability for the constant schedule");
  app->add_option("--gamma", opts.gamma, "exponential annealing speed");
  app->add_option("--exp-time-base", opts.exp_time_base,
                  "{token,event}: argument unit of the exponential schedule");
  app->add_option("--transition-token", opts.transition_token, "slow-thinking transition token");
  app->add_option("--early-end-policy", opts.early_end_policy,
                  "{respect,suppress}: pre-alpha natural end handling");
  app->add_option("--max-suppressions", opts.max_suppressions,
                  "s1: end-of-thinking attempts to suppress");
  app->add_option("--n-think", opts.n_think, "average thinking length (skips table lookup)");
  app->add_option("--budget-file", opts.budget_file, "budget table JSON path");
  app->add_option("--cod-template", opts.cod_template, "CoD prompt template with {task}");
}

}  // namespace

int main(int argc, char** argv) {
  CliOptions opts;
  CLI::App app{"alpha1: test-time reasoning modulation for large reasoning models"};
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand("run", "evaluate one strategy over a benchmark");
  run->add_option("--strategy", opts.strategy, "{alpha1,base,s1,cod}");
  add_common_options(run, opts);
  add_strategy_options(run, opts);

  CLI::App* compare =
      app.add_subcommand("compare", "evaluate base, s1, cod, alpha1 with shared seeds");
  add_common_options(compare, opts);
  add_strategy_options(compare, opts);

  CLI::App* estimate = app.add_subcommand("estimate-budget",
                                          "estimate the average thinking-phase token length");
  add_common_options(estimate, opts);
  estimate->add_option("--n", opts.estimate_n, "number of sampled tasks");
  estimate->add_option("--budget-file", opts.budget_file, "budget table to update");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(opts);
    if (compare->parsed()) return cmd_compare(opts);
    if (estimate->parsed()) return cmd_estimate_budget(opts);
    std::cerr << "error: no subcommand\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
