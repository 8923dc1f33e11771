#include "alpha1/benchmark.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "alpha1/util.hpp"
#include "json.hpp"

namespace alpha1 {

namespace {

BenchmarkTask parse_task(const nlohmann::json& doc, int line_no) {
  if (!doc.is_object()) throw ParseError("task must be a JSON object", line_no);
  BenchmarkTask task;
  for (const char* field : {"id", "prompt", "gold"}) {
    if (!doc.contains(field) || !doc[field].is_string()) {
      throw ParseError(std::string("missing string field \"") + field + "\"", line_no);
    }
  }
  task.id = doc["id"].get<std::string>();
  task.prompt = doc["prompt"].get<std::string>();
  task.gold = doc["gold"].get<std::string>();
  if (task.gold.empty()) throw ParseError("field \"gold\" must be non-empty", line_no);
  if (doc.contains("domain")) task.domain = doc["domain"].get<std::string>();
  if (doc.contains("checker")) {
    const auto& checker = doc["checker"];
    if (checker.is_string() && checker.get<std::string>() == "exact") {
      task.checker.kind = CheckerKind::ExactMatch;
    } else if (checker.is_object() && checker.contains("numeric")) {
      task.checker.kind = CheckerKind::NumericEquivalent;
      const auto& numeric = checker["numeric"];
      if (numeric.is_object() && numeric.contains("rel_tol")) {
        task.checker.rel_tol = numeric["rel_tol"].get<double>();
      }
    } else {
      throw ParseError("field \"checker\" must be \"exact\" or {\"numeric\": {...}}", line_no);
    }
  }
  return task;
}

}  // namespace

std::vector<BenchmarkTask> parse_benchmark_jsonl(const std::string& text) {
  std::vector<BenchmarkTask> tasks;
  std::unordered_set<std::string> seen_ids;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(e.what(), line_no);
    }
    BenchmarkTask task = parse_task(doc, line_no);
    if (!seen_ids.insert(task.id).second) {
      throw ParseError("duplicate task id \"" + task.id + "\"", line_no);
    }
    tasks.push_back(std::move(task));
  }
  return tasks;
}

std::vector<BenchmarkTask> load_benchmark(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open benchmark file: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_benchmark_jsonl(text);
}

}  // namespace alpha1
