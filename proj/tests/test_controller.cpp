#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>

#include "alpha1/controller.hpp"
#include "alpha1/scripted_model.hpp"
#include "alpha1/util.hpp"
#include "doctest.h"

using namespace alpha1;

namespace {

Script always(std::initializer_list<const char*> emissions) {
  Script script;
  for (const char* e : emissions) script.rules.push_back({ScriptRule::Trigger::Always, "", e});
  return script;
}

// Three delimiter-separated thinking steps, a natural end of thinking, then
// the answer.
Script script_a() {
  return always({"step one\n\n", "step two\n\n", "step three\n\n",
                 "</think> The answer is \\boxed{42}."});
}

// Crosses the alpha moment, then tries to keep slow-thinking with "Wait".
Script script_b() {
  Script script = always({"t1 t2 t3 t4\n\n", "deep thought Wait"});
  script.rules.push_back({ScriptRule::Trigger::AfterInjected, "Wait", " going deeper Wait"});
  script.rules.push_back({ScriptRule::Trigger::AfterInjected, "</think>",
                          " The answer is \\boxed{7}."});
  return script;
}

ModulationConfig config_with(ScheduleFamily family, double p_constant, std::uint64_t t_m) {
  ModulationConfig config;
  config.schedule.family = family;
  config.schedule.p_constant = p_constant;
  config.schedule.t_m = t_m;
  return config;
}

// One "x\n\n" unit per delimiter event, then a natural end.
Script uniform_event_script(int n_events) {
  std::string emission;
  emission.reserve(static_cast<std::size_t>(n_events) * 3 + 16);
  for (int i = 0; i < n_events; ++i) emission += "x\n\n";
  emission += "</think> fin";
  return always({emission.c_str()});
}

struct RecordingBackend final : Backend {
  mutable std::vector<GenerationRequest> requests;
  GenerationChunk generate(const GenerationRequest& request) override {
    requests.push_back(request);
    return {"ok \\boxed{1}", 2, FinishReason::Eos, std::nullopt, false};
  }
  std::uint64_t count_tokens(std::string_view text) const override { return count_words(text); }
};

struct RogueBackend final : Backend {
  GenerationChunk generate(const GenerationRequest&) override {
    return {"x", 1, FinishReason::StopMatched, std::string("NOT-A-STOP"), false};
  }
  std::uint64_t count_tokens(std::string_view text) const override { return count_words(text); }
};

}  // namespace

TEST_CASE("stop sets per phase") {
  ModulationConfig config;
  RunState state;
  state.phase = Phase::PreAlpha;
  CHECK(stop_sequences_for(state, config) == std::vector<std::string>{"\n\n", "</think>"});
  state.phase = Phase::PostAlphaThinking;
  CHECK(stop_sequences_for(state, config) ==
        std::vector<std::string>{"Wait", "wait", "</think>"});
  state.phase = Phase::Answering;
  CHECK(stop_sequences_for(state, config).empty());
  state.phase = Phase::Done;
  CHECK_THROWS_AS(stop_sequences_for(state, config), std::invalid_argument);
}

TEST_CASE("decision table") {
  ModulationConfig config = config_with(ScheduleFamily::LinearAnneal, 0.0, 1000);
  RunState state;
  state.rng.seed(1);
  const auto pre_stops = stop_sequences_for(state, config);

  SUBCASE("delimiter at t=0 under linear anneal always injects") {
    const auto decision =
        on_generation_event(state, config, FinishReason::StopMatched, std::string("\n\n"),
                            pre_stops);
    CHECK(decision.kind == Decision::Kind::InjectTransition);
    CHECK(state.delimiter_events == 1);
    CHECK(state.injections == 1);
  }

  SUBCASE("constant p=0 never injects") {
    config = config_with(ScheduleFamily::Constant, 0.0, 1000);
    for (int i = 0; i < 64; ++i) {
      const auto decision =
          on_generation_event(state, config, FinishReason::StopMatched, std::string("\n\n"),
                              pre_stops);
      CHECK(decision.kind == Decision::Kind::ContinueGeneration);
    }
    CHECK(state.injections == 0);
    CHECK(state.delimiter_events == 64);
  }

  SUBCASE("early natural end, respect policy") {
    const auto decision = on_generation_event(state, config, FinishReason::StopMatched,
                                              std::string("</think>"), pre_stops);
    CHECK(decision.kind == Decision::Kind::TerminateThinking);
  }

  SUBCASE("early natural end, suppress policy") {
    config.early_end_policy = EarlyEndPolicy::SuppressEarlyEnd;
    const auto decision = on_generation_event(state, config, FinishReason::StopMatched,
                                              std::string("</think>"), pre_stops);
    CHECK(decision.kind == Decision::Kind::InjectTransition);
    CHECK(state.suppressions == 1);
    CHECK(state.injections == 0);  // not a delimiter injection
  }

  SUBCASE("post-alpha wait variants terminate, case-insensitively") {
    state.phase = Phase::PostAlphaThinking;
    const auto post_stops = stop_sequences_for(state, config);
    for (const char* variant : {"Wait", "wait"}) {
      RunState fresh;
      fresh.phase = Phase::PostAlphaThinking;
      const auto decision = on_generation_event(fresh, config, FinishReason::StopMatched,
                                                std::string(variant), post_stops);
      CHECK(decision.kind == Decision::Kind::TerminateThinking);
    }
  }

  SUBCASE("length and EOS finish the run") {
    auto decision = on_generation_event(state, config, FinishReason::Length, std::nullopt, {});
    CHECK(decision.kind == Decision::Kind::FinishRun);
    CHECK(decision.finish == RunFinish::LengthCap);
    decision = on_generation_event(state, config, FinishReason::Eos, std::nullopt, {});
    CHECK(decision.finish == RunFinish::NaturalEOS);
    state.phase = Phase::Answering;
    decision = on_generation_event(state, config, FinishReason::Eos, std::nullopt, {});
    CHECK(decision.finish == RunFinish::AnswerComplete);
  }

  SUBCASE("stop outside the active set is a contract violation") {
    CHECK_THROWS_AS(on_generation_event(state, config, FinishReason::StopMatched,
                                        std::string("Hmm,"), pre_stops),
                    std::runtime_error);
  }
}

TEST_CASE("degeneracy: constant p=0 reproduces the base run byte for byte") {
  ModulationConfig config = config_with(ScheduleFamily::Constant, 0.0, 50);
  config.alpha = 1.0;

  ScriptedModel alpha_model(script_a());
  const Transcript modulated = run_alpha_one(alpha_model, config, "Q: six times seven?", 99);

  ScriptedModel base_model(script_a());
  const Transcript base = run_base(base_model, "Q: six times seven?", limits_from(config), 99);

  CHECK(modulated.text() == base.text());
  CHECK(modulated.final_state.injections == 0);
  CHECK(modulated.final_state.delimiter_events == 3);
  CHECK(modulated.final_state.phase == Phase::Done);
  CHECK(modulated.final_state.finish == RunFinish::AnswerComplete);
}

TEST_CASE("post-alpha wait replacement: one end token, no post-alpha waits") {
  // t_m = 4: the first chunk (4 thinking tokens) crosses the alpha moment.
  ModulationConfig config = config_with(ScheduleFamily::LinearAnneal, 0.0, 4);
  ScriptedModel model(script_b());
  const Transcript transcript = run_alpha_one(model, config, "Q", 5);

  const std::string text = transcript.text();
  std::size_t end_tokens = 0;
  for (std::size_t pos = text.find("</think>"); pos != std::string::npos;
       pos = text.find("</think>", pos + 1)) {
    ++end_tokens;
  }
  CHECK(end_tokens == 1);
  CHECK(text == "t1 t2 t3 t4\n\ndeep thought </think> The answer is \\boxed{7}.");
  // The crossing delimiter is re-emitted without a Bernoulli draw.
  CHECK(transcript.delimiter_decisions.empty());
  CHECK(transcript.final_state.injections == 0);
  // The replacement token is ours, not the model's.
  bool saw_injected_end = false;
  for (const auto& segment : transcript.segments) {
    if (segment.text == "</think>" && segment.origin == SegmentOrigin::Injected) {
      saw_injected_end = true;
    }
  }
  CHECK(saw_injected_end);
}

TEST_CASE("constant p=1 injects at every delimiter event") {
  ModulationConfig config = config_with(ScheduleFamily::Constant, 1.0, 0);
  config.alpha = 1.4;
  config.schedule.t_m = compute_alpha_moment(config.alpha, 50);
  ScriptedModel model(script_a());
  const Transcript transcript = run_alpha_one(model, config, "Q", 123);
  CHECK(transcript.final_state.delimiter_events == 3);
  CHECK(transcript.final_state.injections == 3);
  std::size_t injected = 0;
  for (const auto& segment : transcript.segments) {
    if (segment.origin == SegmentOrigin::Injected && segment.text == "Wait,") ++injected;
  }
  CHECK(injected == 3);
}

TEST_CASE("injection placement: after a delimiter, before the alpha moment") {
  ModulationConfig config = config_with(ScheduleFamily::LinearAnneal, 0.0, 40);
  ScriptedModel model(uniform_event_script(30));
  const Transcript transcript = run_alpha_one(model, config, "Q", 7);

  for (std::size_t i = 0; i < transcript.segments.size(); ++i) {
    const auto& segment = transcript.segments[i];
    if (segment.origin == SegmentOrigin::Injected && segment.phase == Phase::PreAlpha &&
        segment.text == config.transition_token) {
      REQUIRE(i > 0);
      const auto& before = transcript.segments[i - 1];
      REQUIRE(before.text.size() >= config.delimiter.size());
      CHECK(before.text.substr(before.text.size() - config.delimiter.size()) ==
            config.delimiter);
    }
  }
  for (const auto& decision : transcript.delimiter_decisions) {
    if (decision.injected) CHECK(decision.t < config.schedule.t_m);
  }
  CHECK(transcript.final_state.injections >= 1);
}

TEST_CASE("monotone phase over segments") {
  ModulationConfig config = config_with(ScheduleFamily::LinearAnneal, 0.0, 10);
  ScriptedModel model(uniform_event_script(30));
  const Transcript transcript = run_alpha_one(model, config, "Q", 11);
  int prev = 0;
  for (const auto& segment : transcript.segments) {
    const int phase = static_cast<int>(segment.phase);
    CHECK(phase >= prev);
    prev = phase;
  }
  CHECK(transcript.final_state.phase == Phase::Done);
}

TEST_CASE("token accounting matches the segment sum") {
  for (std::uint64_t t_m : {4ULL, 40ULL, 100000ULL}) {
    ModulationConfig config = config_with(ScheduleFamily::LinearAnneal, 0.0, t_m);
    ScriptedModel model(uniform_event_script(60));
    const Transcript transcript = run_alpha_one(model, config, "Q", 13);
    CHECK(transcript.final_state.total_tokens == transcript.segment_token_sum());
    CHECK(transcript.final_state.injections <= transcript.final_state.delimiter_events);
  }
}

TEST_CASE("bernoulli frequency sanity at p=0.5") {
  ModulationConfig config = config_with(ScheduleFamily::Constant, 0.5, 100000);
  const int events = 2000;
  ScriptedModel model(uniform_event_script(events));
  const Transcript transcript = run_alpha_one(model, config, "Q", 2024);
  REQUIRE(transcript.final_state.delimiter_events == static_cast<std::uint64_t>(events));
  const double fraction = static_cast<double>(transcript.final_state.injections) / events;
  const double sigma = std::sqrt(0.25 / events);
  CHECK(std::fabs(fraction - 0.5) <= 3.0 * sigma);
}

TEST_CASE("reproducibility and seed sensitivity") {
  ModulationConfig config = config_with(ScheduleFamily::Constant, 0.5, 100000);
  const auto run = [&](std::uint64_t seed) {
    ScriptedModel model(uniform_event_script(50));
    return run_alpha_one(model, config, "Q", seed);
  };
  const Transcript first = run(42);
  const Transcript second = run(42);
  CHECK(first.text() == second.text());
  REQUIRE(first.delimiter_decisions.size() == second.delimiter_decisions.size());
  for (std::size_t i = 0; i < first.delimiter_decisions.size(); ++i) {
    CHECK(first.delimiter_decisions[i].injected == second.delimiter_decisions[i].injected);
  }

  const Transcript other = run(43);
  bool any_difference = false;
  for (std::size_t i = 0; i < first.delimiter_decisions.size(); ++i) {
    if (first.delimiter_decisions[i].injected != other.delimiter_decisions[i].injected) {
      any_difference = true;
      break;
    }
  }
  CHECK(any_difference);  // ~2^-50 odds of colliding on 50 events
}

TEST_CASE("pre-alpha length cap leaves no end token") {
  ModulationConfig config = config_with(ScheduleFamily::Constant, 0.0, 100000);
  config.max_total_tokens = 10;
  ScriptedModel model(uniform_event_script(50));
  const Transcript transcript = run_alpha_one(model, config, "Q", 3);
  CHECK(transcript.final_state.finish == RunFinish::LengthCap);
  CHECK(transcript.final_state.total_tokens <= 10);
  CHECK(transcript.text().find("</think>") == std::string::npos);
}

TEST_CASE("suppress-early-end policy replaces a pre-alpha natural end") {
  ModulationConfig config = config_with(ScheduleFamily::Constant, 0.0, 1000);
  config.early_end_policy = EarlyEndPolicy::SuppressEarlyEnd;
  Script script = always({"quick thought </think>"});
  script.rules.push_back({ScriptRule::Trigger::AfterInjected, "Wait,", " more </think>"});
  script.rules.push_back({ScriptRule::Trigger::AfterInjected, "Wait,", " done"});
  ScriptedModel model(script);
  const Transcript transcript = run_alpha_one(model, config, "Q", 17);
  // Every natural end keeps getting suppressed; the run ends by EOS while
  // still thinking.
  CHECK(transcript.final_state.suppressions == 2);
  CHECK(transcript.text() == "quick thought Wait, more Wait, done");
  CHECK(transcript.final_state.finish == RunFinish::NaturalEOS);
}

TEST_CASE("contract violation aborts with partial transcript") {
  ModulationConfig config = config_with(ScheduleFamily::Constant, 0.0, 1000);
  RogueBackend backend;
  CHECK_THROWS_AS(run_alpha_one(backend, config, "Q", 1), RunAborted);
  try {
    run_alpha_one(backend, config, "Q", 1);
  } catch (const RunAborted& e) {
    CHECK(std::string(e.what()).find("NOT-A-STOP") != std::string::npos);
    CHECK(e.partial.segments.size() == 1);  // the chunk was accounted first
  }
}

TEST_CASE("invalid config is rejected up front") {
  ModulationConfig config;
  config.transition_token.clear();
  ScriptedModel model(script_a());
  CHECK_THROWS_AS(run_alpha_one(model, config, "Q", 1), std::invalid_argument);
}

TEST_CASE("run_base is a pure passthrough") {
  ScriptedModel model(script_a());
  const Transcript transcript = run_base(model, "Q", {}, 1);
  CHECK(transcript.final_state.injections == 0);
  for (const auto& segment : transcript.segments) {
    CHECK(segment.origin == SegmentOrigin::Model);
  }
  CHECK(transcript.text() ==
        "step one\n\nstep two\n\nstep three\n\n</think> The answer is \\boxed{42}.");
  // Thinking length: everything before the natural end of thinking.
  CHECK(transcript.final_state.think_tokens == 6);
  CHECK(transcript.final_state.finish == RunFinish::NaturalEOS);
}

TEST_CASE("run_base respects the token cap") {
  GenerationLimits limits;
  limits.max_total_tokens = 10;
  ScriptedModel model(uniform_event_script(50));
  const Transcript transcript = run_base(model, "Q", limits, 1);
  CHECK(transcript.final_state.finish == RunFinish::LengthCap);
  CHECK(transcript.final_state.total_tokens <= 10);
}

TEST_CASE("run_base determinism") {
  const auto run = [] {
    ScriptedModel model(script_a());
    return run_base(model, "Q", {}, 7).text();
  };
  CHECK(run() == run());
}

TEST_CASE("s1 suppresses the first two end attempts") {
  ModulationConfig config;
  Script script = always({"t1 </think>"});
  script.rules.push_back({ScriptRule::Trigger::AfterInjected, "Wait,", " t2 </think>"});
  script.rules.push_back({ScriptRule::Trigger::AfterInjected, "Wait,", " t3 </think>"});
  script.rules.push_back({ScriptRule::Trigger::AfterInjected, "Wait,", " t4 </think>"});
  script.rules.push_back({ScriptRule::Trigger::AfterInjected, "</think>", " answer \\boxed{9}"});

  ScriptedModel model(script);
  const Transcript transcript = run_s1(model, config, "Q", 2, 21);
  CHECK(transcript.final_state.suppressions == 2);
  const std::string text = transcript.text();
  std::size_t end_tokens = 0;
  for (std::size_t pos = text.find("</think>"); pos != std::string::npos;
       pos = text.find("</think>", pos + 1)) {
    ++end_tokens;
  }
  CHECK(end_tokens == 1);
  CHECK(text == "t1 Wait, t2 Wait, t3 </think> answer \\boxed{9}");
}

TEST_CASE("s1 with zero suppressions equals the base run") {
  ModulationConfig config;
  ScriptedModel s1_model(script_a());
  const Transcript s1_run = run_s1(s1_model, config, "Q", 0, 4);
  ScriptedModel base_model(script_a());
  const Transcript base_run = run_base(base_model, "Q", limits_from(config), 4);
  CHECK(s1_run.text() == base_run.text());
  CHECK(s1_run.final_state.suppressions == 0);
}

TEST_CASE("s1 on a model that never ends thinking") {
  ModulationConfig config;
  config.max_total_tokens = 20;
  ScriptedModel model(always({"a b c d e f g h i j k l m n o p q r s t u v w x y z"}));
  const Transcript transcript = run_s1(model, config, "Q", 2, 9);
  CHECK(transcript.final_state.suppressions == 0);
  CHECK(transcript.final_state.finish == RunFinish::LengthCap);
}

TEST_CASE("cod wraps the prompt verbatim") {
  RecordingBackend backend;
  const std::string tmpl = std::string(kDefaultCodTemplate);
  run_cod(backend, tmpl, "What is 2+2?", {}, 1);
  REQUIRE(backend.requests.size() == 1);
  CHECK(backend.requests[0].context ==
        "Think step by step, but keep each thinking step to no more than five words. "
        "What is 2+2?");

  backend.requests.clear();
  run_cod(backend, tmpl, "", {}, 1);
  CHECK(backend.requests[0].context ==
        "Think step by step, but keep each thinking step to no more than five words. ");
}

TEST_CASE("cod template without placeholder is a config error") {
  RecordingBackend backend;
  CHECK_THROWS_AS(run_cod(backend, "no placeholder here", "task", {}, 1),
                  std::invalid_argument);
}

TEST_CASE("cod determinism") {
  const auto run = [] {
    ScriptedModel model(script_a());
    return run_cod(model, kDefaultCodTemplate, "Q", {}, 5).text();
  };
  CHECK(run() == run());
}

TEST_CASE("injected tokens advance the thinking budget") {
  ModulationConfig config = config_with(ScheduleFamily::Constant, 1.0, 1000);
  ScriptedModel model(uniform_event_script(5));
  const Transcript transcript = run_alpha_one(model, config, "Q", 2);
  // 5 "x" tokens + 5 injected "Wait," tokens, delimiter itself has no words.
  CHECK(transcript.final_state.think_tokens == 10);
  CHECK(transcript.final_state.injections == 5);
}
