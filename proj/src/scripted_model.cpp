#include "alpha1/scripted_model.hpp"

#include <fstream>
#include <limits>

#include "alpha1/util.hpp"
#include "json.hpp"

namespace alpha1 {

namespace {

void validate_script(const Script& script) {
  if (script.rules.empty()) {
    throw ParseError("no rules");
  }
  for (std::size_t i = 0; i < script.rules.size(); ++i) {
    const auto& rule = script.rules[i];
    if (rule.emit.empty()) {
      throw ParseError("rule " + std::to_string(i) + ": empty emission");
    }
    if (rule.trigger == ScriptRule::Trigger::AfterInjected && rule.trigger_token.empty()) {
      throw ParseError("rule " + std::to_string(i) + ": empty after_injected token");
    }
  }
}

// Does (head + tail) end with suffix? Avoids materializing the concatenation.
bool concat_ends_with(std::string_view head, std::string_view tail, std::string_view suffix) {
  if (suffix.size() <= tail.size()) {
    return tail.substr(tail.size() - suffix.size()) == suffix;
  }
  const std::size_t need = suffix.size() - tail.size();
  if (head.size() < need) return false;
  return head.substr(head.size() - need) == suffix.substr(0, need) &&
         tail == suffix.substr(need);
}

}  // namespace

Script parse_script(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("script parse error: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("rules") || !doc["rules"].is_array()) {
    throw ParseError("script must be an object with a \"rules\" array");
  }
  Script script;
  for (const auto& item : doc["rules"]) {
    ScriptRule rule;
    if (item.contains("trigger")) {
      const auto& trig = item["trigger"];
      if (trig.is_string() && trig.get<std::string>() == "always") {
        rule.trigger = ScriptRule::Trigger::Always;
      } else if (trig.is_object() && trig.contains("after_injected")) {
        rule.trigger = ScriptRule::Trigger::AfterInjected;
        rule.trigger_token = trig["after_injected"].get<std::string>();
      } else {
        throw ParseError("rule " + std::to_string(script.rules.size()) +
                         ": trigger must be \"always\" or {\"after_injected\": ...}");
      }
    }
    if (!item.contains("emit") || !item["emit"].is_string()) {
      throw ParseError("rule " + std::to_string(script.rules.size()) +
                       ": missing string field \"emit\"");
    }
    rule.emit = item["emit"].get<std::string>();
    script.rules.push_back(std::move(rule));
  }
  validate_script(script);
  return script;
}

Script load_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open script file: " + path.string());
  }
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_script(text);
}

ScriptedModel::ScriptedModel(Script script) : script_(std::move(script)) {
  validate_script(script_);
}

std::uint64_t ScriptedModel::count_tokens(std::string_view text) const {
  return count_words(text);
}

GenerationChunk ScriptedModel::generate(const GenerationRequest& request) {
  if (request.context.empty()) {
    throw BackendError(BackendErrorKind::Config, "generate: context must be non-empty");
  }
  if (request.max_new_tokens == 0) {
    return {"", 0, FinishReason::Length, std::nullopt, false};
  }

  std::string buffer = std::move(pending_);
  pending_.clear();

  const auto cap_cut = [&](std::string_view buf) -> GenerationChunk {
    const std::size_t cut = word_cut_offset(buf, request.max_new_tokens);
    GenerationChunk chunk;
    chunk.text.assign(buf.substr(0, cut));
    chunk.new_token_count = count_words(chunk.text);
    chunk.finish = FinishReason::Length;
    pending_.assign(buf.substr(cut));
    return chunk;
  };

  for (;;) {
    // Earliest full stop match; ties broken by longest stop.
    std::size_t best_pos = std::string::npos;
    const std::string* best_stop = nullptr;
    for (const auto& stop : request.stop_sequences) {
      if (stop.empty()) continue;
      const std::size_t pos = buffer.find(stop);
      if (pos == std::string::npos) continue;
      if (pos < best_pos || (pos == best_pos && stop.size() > best_stop->size())) {
        best_pos = pos;
        best_stop = &stop;
      }
    }

    if (best_stop != nullptr) {
      std::string prefix = buffer.substr(0, best_pos);
      const std::uint64_t words = count_words(prefix);
      if (words > request.max_new_tokens) {
        return cap_cut(buffer);
      }
      pending_ = buffer.substr(best_pos + best_stop->size());
      return {std::move(prefix), words, FinishReason::StopMatched, *best_stop, false};
    }

    const std::uint64_t buffered_words = count_words(buffer);
    if (buffered_words >= request.max_new_tokens) {
      return cap_cut(buffer);
    }

    // Advance the cursor to the next applicable rule; conditional rules whose
    // trigger does not currently hold are skipped for good.
    while (cursor_ < script_.rules.size()) {
      const auto& rule = script_.rules[cursor_];
      if (rule.trigger == ScriptRule::Trigger::Always ||
          concat_ends_with(request.context, buffer, rule.trigger_token)) {
        break;
      }
      ++cursor_;
    }
    if (cursor_ >= script_.rules.size()) {
      // Script exhausted: whatever is buffered is the end of the stream.
      return {std::move(buffer), buffered_words, FinishReason::Eos, std::nullopt, false};
    }
    buffer += script_.rules[cursor_].emit;
    ++cursor_;
  }
}

}  // namespace alpha1
