#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "alpha1/harness.hpp"

namespace alpha1 {

struct AggregateReport {
  std::string strategy;
  std::string benchmark;
  double pass_at_1 = 0.0;
  double mean_total_tokens = 0.0;
  double mean_think_tokens = 0.0;
  double mean_injections = 0.0;
  std::optional<double> delta_p1;  // vs. a base report on the same benchmark
  std::optional<double> rep;
  // Sweep metadata so series files can be emitted from reports alone.
  std::optional<double> alpha;
  std::optional<double> p_constant;
};

// Reasoning efficiency-performance: accuracy gain over base divided by the
// normalized thinking-phase token length (think_tokens / max_tokens).
// Rejects think_tokens == 0: a zero-length thinking phase is a caller bug,
// not an infinite efficiency.
double rep_metric(double a_method, double a_base, double think_tokens, double max_tokens);

// Means over the results; delta_p1/rep filled when a base report for the same
// benchmark is supplied.
AggregateReport aggregate(const std::vector<RunResult>& results, const std::string& strategy,
                          const std::string& benchmark,
                          const std::optional<AggregateReport>& base_report, double max_tokens);

enum class ReportFormat { Json, Csv };

void emit_report(const std::vector<AggregateReport>& reports, ReportFormat format,
                 const std::filesystem::path& path);
std::string report_csv(const std::vector<AggregateReport>& reports);
std::string report_json(const std::vector<AggregateReport>& reports);
std::vector<AggregateReport> parse_report_csv(const std::string& text);
std::vector<AggregateReport> parse_report_json(const std::string& text);

// Plot-ready two-column series with a header comment naming the sweep kind.
// AlphaSweep: (alpha, pass@1) sorted by alpha. FrequencySweep: (p_constant,
// pass@1) sorted by p. REPBars: (strategy, rep) for reports that carry one.
enum class SeriesKind { AlphaSweep, FrequencySweep, REPBars };

void emit_series(const std::vector<AggregateReport>& reports, SeriesKind kind,
                 const std::filesystem::path& path);
std::string series_csv(const std::vector<AggregateReport>& reports, SeriesKind kind);

}  // namespace alpha1
