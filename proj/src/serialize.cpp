#include "alpha1/serialize.hpp"

#include <fstream>

#include "alpha1/util.hpp"
#include "json.hpp"

namespace alpha1 {

namespace {

using Json = nlohmann::ordered_json;

Json schedule_to_json(const ScheduleSpec& spec) {
  Json doc;
  doc["family"] = to_string(spec.family);
  doc["p_constant"] = spec.p_constant;
  doc["gamma"] = spec.gamma;
  doc["time_base"] = to_string(spec.time_base);
  doc["t_m"] = spec.t_m;
  return doc;
}

ScheduleSpec schedule_from_json(const nlohmann::json& doc) {
  ScheduleSpec spec;
  spec.family = schedule_family_from_string(doc.at("family").get<std::string>());
  spec.p_constant = doc.at("p_constant").get<double>();
  spec.gamma = doc.at("gamma").get<double>();
  spec.time_base = exp_time_base_from_string(doc.at("time_base").get<std::string>());
  spec.t_m = doc.at("t_m").get<std::uint64_t>();
  return spec;
}

Json config_to_json(const ModulationConfig& config) {
  Json doc;
  doc["alpha"] = config.alpha;
  doc["schedule"] = schedule_to_json(config.schedule);
  doc["transition_token"] = config.transition_token;
  doc["delimiter"] = config.delimiter;
  doc["end_think_token"] = config.end_think_token;
  doc["post_alpha_wait_variants"] = config.post_alpha_wait_variants;
  doc["max_total_tokens"] = config.max_total_tokens;
  doc["early_end_policy"] = to_string(config.early_end_policy);
  doc["temperature"] = config.temperature;
  doc["top_p"] = config.top_p;
  return doc;
}

ModulationConfig config_from_json(const nlohmann::json& doc) {
  ModulationConfig config;
  config.alpha = doc.at("alpha").get<double>();
  config.schedule = schedule_from_json(doc.at("schedule"));
  config.transition_token = doc.at("transition_token").get<std::string>();
  config.delimiter = doc.at("delimiter").get<std::string>();
  config.end_think_token = doc.at("end_think_token").get<std::string>();
  config.post_alpha_wait_variants =
      doc.at("post_alpha_wait_variants").get<std::vector<std::string>>();
  config.max_total_tokens = doc.at("max_total_tokens").get<std::uint64_t>();
  config.early_end_policy = early_end_policy_from_string(doc.at("early_end_policy").get<std::string>());
  config.temperature = doc.at("temperature").get<double>();
  config.top_p = doc.at("top_p").get<double>();
  return config;
}

}  // namespace

std::string transcript_to_json(const Transcript& transcript) {
  Json doc;
  doc["schema_version"] = 1;
  doc["strategy"] = transcript.strategy;
  doc["seed"] = transcript.seed;
  doc["prompt"] = transcript.prompt;
  doc["config"] = config_to_json(transcript.config_snapshot);
  doc["token_counts_approximate"] = transcript.token_counts_approximate;

  Json state;
  state["phase"] = to_string(transcript.final_state.phase);
  state["think_tokens"] = transcript.final_state.think_tokens;
  state["total_tokens"] = transcript.final_state.total_tokens;
  state["delimiter_events"] = transcript.final_state.delimiter_events;
  state["injections"] = transcript.final_state.injections;
  state["suppressions"] = transcript.final_state.suppressions;
  if (transcript.final_state.finish) {
    state["finish"] = to_string(*transcript.final_state.finish);
  }
  doc["final_state"] = std::move(state);

  Json segments = Json::array();
  for (const auto& segment : transcript.segments) {
    Json item;
    item["text"] = segment.text;
    item["origin"] = to_string(segment.origin);
    item["phase"] = to_string(segment.phase);
    item["token_count"] = segment.token_count;
    segments.push_back(std::move(item));
  }
  doc["segments"] = std::move(segments);

  Json decisions = Json::array();
  for (const auto& decision : transcript.delimiter_decisions) {
    Json item;
    item["t"] = decision.t;
    item["event"] = decision.event_index;
    item["prob"] = decision.prob;
    item["injected"] = decision.injected;
    decisions.push_back(std::move(item));
  }
  doc["delimiter_decisions"] = std::move(decisions);
  return doc.dump(2) + "\n";
}

Transcript transcript_from_json(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("transcript: ") + e.what());
  }
  if (doc.value("schema_version", 0) != 1) {
    throw ParseError("transcript: unsupported schema_version");
  }
  Transcript transcript;
  transcript.strategy = doc.at("strategy").get<std::string>();
  transcript.seed = doc.at("seed").get<std::uint64_t>();
  transcript.prompt = doc.value("prompt", std::string());
  transcript.config_snapshot = config_from_json(doc.at("config"));
  transcript.token_counts_approximate = doc.value("token_counts_approximate", false);

  const auto& state = doc.at("final_state");
  transcript.final_state.phase = phase_from_string(state.at("phase").get<std::string>());
  transcript.final_state.think_tokens = state.at("think_tokens").get<std::uint64_t>();
  transcript.final_state.total_tokens = state.at("total_tokens").get<std::uint64_t>();
  transcript.final_state.delimiter_events = state.at("delimiter_events").get<std::uint64_t>();
  transcript.final_state.injections = state.at("injections").get<std::uint64_t>();
  transcript.final_state.suppressions = state.at("suppressions").get<std::uint64_t>();
  if (state.contains("finish")) {
    transcript.final_state.finish = run_finish_from_string(state["finish"].get<std::string>());
  }

  for (const auto& item : doc.at("segments")) {
    TranscriptSegment segment;
    segment.text = item.at("text").get<std::string>();
    segment.origin = segment_origin_from_string(item.at("origin").get<std::string>());
    segment.phase = phase_from_string(item.at("phase").get<std::string>());
    segment.token_count = item.at("token_count").get<std::uint64_t>();
    transcript.segments.push_back(std::move(segment));
  }
  if (doc.contains("delimiter_decisions")) {
    for (const auto& item : doc["delimiter_decisions"]) {
      DelimiterDecision decision;
      decision.t = item.at("t").get<std::uint64_t>();
      decision.event_index = item.at("event").get<std::uint64_t>();
      decision.prob = item.at("prob").get<double>();
      decision.injected = item.at("injected").get<bool>();
      transcript.delimiter_decisions.push_back(decision);
    }
  }
  return transcript;
}

void save_transcript(const Transcript& transcript, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << transcript_to_json(transcript);
}

Transcript load_transcript(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open transcript: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return transcript_from_json(text);
}

std::string results_to_jsonl(const std::vector<RunResult>& results) {
  std::string out;
  for (const auto& result : results) {
    Json item;
    item["task_id"] = result.task_id;
    item["seed"] = result.seed;
    item["correct"] = result.correct;
    if (result.extracted_answer) item["extracted_answer"] = *result.extracted_answer;
    item["think_tokens"] = result.think_tokens;
    item["total_tokens"] = result.total_tokens;
    item["injections"] = result.injections;
    item["suppressions"] = result.suppressions;
    if (result.transcript.final_state.finish) {
      item["finish"] = to_string(*result.transcript.final_state.finish);
    }
    if (result.error) item["error"] = *result.error;
    out += item.dump();
    out += '\n';
  }
  return out;
}

void write_results_jsonl(const std::vector<RunResult>& results,
                         const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << results_to_jsonl(results);
}

}  // namespace alpha1
