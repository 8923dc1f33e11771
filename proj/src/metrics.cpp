#include "alpha1/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "alpha1/util.hpp"
#include "json.hpp"

namespace alpha1 {

namespace {

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string optional_cell(const std::optional<double>& value) {
  return value ? format_double(*value) : std::string();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::optional<double> parse_optional(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  return std::stod(cell);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

double rep_metric(double a_method, double a_base, double think_tokens, double max_tokens) {
  if (!(max_tokens > 0.0)) throw std::invalid_argument("rep_metric: max_tokens must be > 0");
  if (think_tokens < 0.0) throw std::invalid_argument("rep_metric: think_tokens must be >= 0");
  if (think_tokens == 0.0) {
    throw std::invalid_argument("rep_metric: think_tokens is zero (T_norm would divide by zero)");
  }
  return (a_method - a_base) / (think_tokens / max_tokens);
}

AggregateReport aggregate(const std::vector<RunResult>& results, const std::string& strategy,
                          const std::string& benchmark,
                          const std::optional<AggregateReport>& base_report, double max_tokens) {
  if (results.empty()) throw std::invalid_argument("aggregate: no results");
  if (base_report && base_report->benchmark != benchmark) {
    throw std::invalid_argument("aggregate: base report is for benchmark \"" +
                                base_report->benchmark + "\", not \"" + benchmark + "\"");
  }
  AggregateReport report;
  report.strategy = strategy;
  report.benchmark = benchmark;
  report.pass_at_1 = pass_at_1(results);
  const auto n = static_cast<double>(results.size());
  for (const auto& result : results) {
    report.mean_total_tokens += static_cast<double>(result.total_tokens);
    report.mean_think_tokens += static_cast<double>(result.think_tokens);
    report.mean_injections += static_cast<double>(result.injections);
  }
  report.mean_total_tokens /= n;
  report.mean_think_tokens /= n;
  report.mean_injections /= n;
  if (base_report) {
    report.delta_p1 = report.pass_at_1 - base_report->pass_at_1;
    report.rep = rep_metric(report.pass_at_1, base_report->pass_at_1, report.mean_think_tokens,
                            max_tokens);
  }
  return report;
}

std::string report_csv(const std::vector<AggregateReport>& reports) {
  std::string out =
      "strategy,benchmark,pass_at_1,mean_total_tokens,mean_think_tokens,mean_injections,"
      "delta_p1,rep\n";
  for (const auto& r : reports) {
    out += r.strategy + ',' + r.benchmark + ',' + format_double(r.pass_at_1) + ',' +
           format_double(r.mean_total_tokens) + ',' + format_double(r.mean_think_tokens) + ',' +
           format_double(r.mean_injections) + ',' + optional_cell(r.delta_p1) + ',' +
           optional_cell(r.rep) + '\n';
  }
  return out;
}

std::vector<AggregateReport> parse_report_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("strategy,benchmark,", 0) != 0) {
    throw ParseError("report CSV: missing header");
  }
  std::vector<AggregateReport> reports;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 8) throw ParseError("report CSV: expected 8 cells", line_no);
    AggregateReport r;
    r.strategy = cells[0];
    r.benchmark = cells[1];
    r.pass_at_1 = std::stod(cells[2]);
    r.mean_total_tokens = std::stod(cells[3]);
    r.mean_think_tokens = std::stod(cells[4]);
    r.mean_injections = std::stod(cells[5]);
    r.delta_p1 = parse_optional(cells[6]);
    r.rep = parse_optional(cells[7]);
    reports.push_back(std::move(r));
  }
  return reports;
}

std::string report_json(const std::vector<AggregateReport>& reports) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json item;
    item["strategy"] = r.strategy;
    item["benchmark"] = r.benchmark;
    item["pass_at_1"] = r.pass_at_1;
    item["mean_total_tokens"] = r.mean_total_tokens;
    item["mean_think_tokens"] = r.mean_think_tokens;
    item["mean_injections"] = r.mean_injections;
    if (r.delta_p1) item["delta_p1"] = *r.delta_p1;
    if (r.rep) item["rep"] = *r.rep;
    if (r.alpha) item["alpha"] = *r.alpha;
    if (r.p_constant) item["p_constant"] = *r.p_constant;
    doc.push_back(std::move(item));
  }
  return doc.dump(2) + "\n";
}

std::vector<AggregateReport> parse_report_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("report JSON: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError("report JSON: expected an array");
  std::vector<AggregateReport> reports;
  for (const auto& item : doc) {
    AggregateReport r;
    r.strategy = item.at("strategy").get<std::string>();
    r.benchmark = item.at("benchmark").get<std::string>();
    r.pass_at_1 = item.at("pass_at_1").get<double>();
    r.mean_total_tokens = item.at("mean_total_tokens").get<double>();
    r.mean_think_tokens = item.at("mean_think_tokens").get<double>();
    r.mean_injections = item.at("mean_injections").get<double>();
    if (item.contains("delta_p1")) r.delta_p1 = item["delta_p1"].get<double>();
    if (item.contains("rep")) r.rep = item["rep"].get<double>();
    if (item.contains("alpha")) r.alpha = item["alpha"].get<double>();
    if (item.contains("p_constant")) r.p_constant = item["p_constant"].get<double>();
    reports.push_back(std::move(r));
  }
  return reports;
}

void emit_report(const std::vector<AggregateReport>& reports, ReportFormat format,
                 const std::filesystem::path& path) {
  write_file(path, format == ReportFormat::Csv ? report_csv(reports) : report_json(reports));
}

std::string series_csv(const std::vector<AggregateReport>& reports, SeriesKind kind) {
  std::string out;
  if (kind == SeriesKind::REPBars) {
    out += "# series: rep-bars\nstrategy,rep\n";
    for (const auto& r : reports) {
      if (r.rep) out += r.strategy + ',' + format_double(*r.rep) + '\n';
    }
    return out;
  }
  const bool alpha_sweep = kind == SeriesKind::AlphaSweep;
  out += alpha_sweep ? "# series: alpha-sweep\nalpha,pass_at_1\n"
                     : "# series: frequency-sweep\np_constant,pass_at_1\n";
  std::vector<std::pair<double, double>> points;
  for (const auto& r : reports) {
    const auto& x = alpha_sweep ? r.alpha : r.p_constant;
    if (!x) {
      throw std::invalid_argument("series_csv: report for \"" + r.strategy +
                                  "\" lacks the sweep parameter");
    }
    points.emplace_back(*x, r.pass_at_1);
  }
  std::sort(points.begin(), points.end());
  for (const auto& [x, y] : points) {
    out += format_double(x) + ',' + format_double(y) + '\n';
  }
  return out;
}

void emit_series(const std::vector<AggregateReport>& reports, SeriesKind kind,
                 const std::filesystem::path& path) {
  write_file(path, series_csv(reports, kind));
}

}  // namespace alpha1
