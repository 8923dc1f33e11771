#include "alpha1/controller.hpp"

#include <algorithm>
#include <sstream>

#include "alpha1/util.hpp"

namespace alpha1 {

namespace {

// Backend misbehavior detected by the controller (stop outside the active
// set, no forward progress). Wrapped into RunAborted by the run loops.
struct ContractViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& part : parts) {
    if (!out.empty()) out += "; ";
    out += part;
  }
  return out;
}

bool contains(const std::vector<std::string>& haystack, const std::string& needle) {
  return std::find(haystack.begin(), haystack.end(), needle) != haystack.end();
}

bool is_wait_variant(const ModulationConfig& config, const std::string& stop) {
  for (const auto& variant : config.post_alpha_wait_variants) {
    if (iequals(variant, stop)) return true;
  }
  return false;
}

void require_valid(const ModulationConfig& config) {
  if (auto errors = validate(config); !errors.empty()) {
    throw std::invalid_argument("invalid ModulationConfig: " + join(errors));
  }
}

// Shared mechanics of the segment-by-segment run loops.
struct RunLoop {
  Backend& backend;
  Transcript transcript;
  RunState state;
  std::string context;
  std::uint64_t max_total_tokens;
  double temperature;
  double top_p;
  std::uint64_t seed;
  std::uint64_t stalled_events = 0;

  RunLoop(Backend& b, std::string strategy, const std::string& prompt, std::uint64_t run_seed,
          std::uint64_t max_tokens, double temp, double tp)
      : backend(b), context(prompt), max_total_tokens(max_tokens), temperature(temp),
        top_p(tp), seed(run_seed) {
    transcript.strategy = std::move(strategy);
    transcript.prompt = prompt;
    transcript.seed = run_seed;
    state.rng.seed(run_seed);
  }

  void append(std::string text, SegmentOrigin origin, std::uint64_t tokens, bool counts_think,
              bool approximate) {
    if (text.empty() && tokens == 0) return;
    context += text;
    state.total_tokens += tokens;
    if (counts_think) state.think_tokens += tokens;
    transcript.token_counts_approximate |= approximate;
    transcript.segments.push_back({std::move(text), origin, state.phase, tokens});
  }

  bool cap_reached() const { return state.total_tokens >= max_total_tokens; }

  GenerationChunk request(const std::vector<std::string>& stops) {
    GenerationRequest req;
    req.context = context;
    req.stop_sequences = stops;
    req.max_new_tokens = max_total_tokens - state.total_tokens;
    req.temperature = temperature;
    req.top_p = top_p;
    req.seed = seed;
    GenerationChunk chunk;
    try {
      chunk = backend.generate(req);
    } catch (const BackendError& e) {
      abort_run(std::string("backend error: ") + e.what());
    }
    if (chunk.finish == FinishReason::StopMatched && !chunk.matched_stop) {
      abort_run("backend reported StopMatched without a matched stop");
    }
    // A stop-matched chunk that moved nothing forward is legitimate (the
    // stream began with the stop), but an endless sequence of them means the
    // backend is replaying itself.
    if (chunk.new_token_count == 0 && chunk.text.empty() &&
        chunk.finish == FinishReason::StopMatched) {
      if (++stalled_events > 65536) abort_run("backend made no progress for 65536 events");
    } else {
      stalled_events = 0;
    }
    return chunk;
  }

  [[noreturn]] void abort_run(const std::string& why) {
    transcript.final_state = state;
    throw RunAborted(why, std::move(transcript));
  }

  Transcript finish() {
    transcript.final_state = state;
    return std::move(transcript);
  }
};

}  // namespace

std::vector<std::string> stop_sequences_for(const RunState& state, const ModulationConfig& config) {
  switch (state.phase) {
    case Phase::PreAlpha:
      return {config.delimiter, config.end_think_token};
    case Phase::PostAlphaThinking: {
      std::vector<std::string> stops = config.post_alpha_wait_variants;
      if (!contains(stops, config.end_think_token)) stops.push_back(config.end_think_token);
      return stops;
    }
    case Phase::Answering:
      return {};
    case Phase::Done:
      break;
  }
  throw std::invalid_argument("stop_sequences_for: run already finished");
}

Decision on_generation_event(RunState& state, const ModulationConfig& config,
                             FinishReason finish, const std::optional<std::string>& matched_stop,
                             const std::vector<std::string>& active_stops,
                             std::vector<DelimiterDecision>* decision_log) {
  switch (finish) {
    case FinishReason::Length:
      return {Decision::Kind::FinishRun, RunFinish::LengthCap};
    case FinishReason::Eos:
      return {Decision::Kind::FinishRun,
              state.phase == Phase::Answering ? RunFinish::AnswerComplete : RunFinish::NaturalEOS};
    case FinishReason::StopMatched:
      break;
  }

  if (!matched_stop) {
    throw ContractViolation("StopMatched event without a matched stop string");
  }
  const std::string& stop = *matched_stop;
  if (!contains(active_stops, stop)) {
    throw ContractViolation("backend matched stop \"" + stop + "\" outside the active stop set");
  }

  switch (state.phase) {
    case Phase::PreAlpha: {
      if (stop == config.delimiter) {
        const bool event_timed = config.schedule.family == ScheduleFamily::ExponentialAnneal &&
                                 config.schedule.time_base == ExpTimeBase::EventIndex;
        const std::uint64_t t =
            std::min(event_timed ? state.delimiter_events : state.think_tokens,
                     config.schedule.t_m);
        const double p = eval_schedule(config.schedule, t);
        const bool inject = uniform_unit(state.rng) < p;
        if (decision_log != nullptr) {
          decision_log->push_back({state.think_tokens, state.delimiter_events, p, inject});
        }
        ++state.delimiter_events;
        if (inject) {
          ++state.injections;
          return {Decision::Kind::InjectTransition, {}};
        }
        return {Decision::Kind::ContinueGeneration, {}};
      }
      if (stop == config.end_think_token) {
        if (config.early_end_policy == EarlyEndPolicy::RespectNaturalEnd) {
          return {Decision::Kind::TerminateThinking, {}};
        }
        ++state.suppressions;
        return {Decision::Kind::InjectTransition, {}};
      }
      break;
    }
    case Phase::PostAlphaThinking: {
      if (stop == config.end_think_token || is_wait_variant(config, stop)) {
        return {Decision::Kind::TerminateThinking, {}};
      }
      // The alpha moment was crossed mid-segment: the request went out with
      // the pre-alpha stop set, so a delimiter match can still arrive here.
      // No draw, no injection; just put the delimiter back.
      if (stop == config.delimiter) {
        return {Decision::Kind::ContinueGeneration, {}};
      }
      break;
    }
    case Phase::Answering:
    case Phase::Done:
      break;
  }
  throw ContractViolation("unexpected stop \"" + stop + "\" in phase " + to_string(state.phase));
}

Transcript run_alpha_one(Backend& backend, const ModulationConfig& config,
                         const std::string& prompt, std::uint64_t seed) {
  require_valid(config);
  RunLoop loop(backend, "alpha1", prompt, seed, config.max_total_tokens, config.temperature,
               config.top_p);
  loop.transcript.config_snapshot = config;
  const bool approx = backend.approximate_token_counts();

  const auto maybe_promote = [&] {
    if (loop.state.phase == Phase::PreAlpha && loop.state.think_tokens >= config.schedule.t_m) {
      loop.state.phase = Phase::PostAlphaThinking;
    }
  };

  while (loop.state.phase != Phase::Done) {
    if (loop.cap_reached()) {
      loop.state.finish = RunFinish::LengthCap;
      loop.state.phase = Phase::Done;
      break;
    }
    const auto stops = stop_sequences_for(loop.state, config);
    const GenerationChunk chunk = loop.request(stops);

    const bool thinking = loop.state.phase != Phase::Answering;
    loop.append(chunk.text, SegmentOrigin::Model, chunk.new_token_count, thinking,
                chunk.approximate_count);
    maybe_promote();

    Decision decision;
    try {
      decision = on_generation_event(loop.state, config, chunk.finish, chunk.matched_stop, stops,
                                     &loop.transcript.delimiter_decisions);
    } catch (const ContractViolation& e) {
      loop.abort_run(e.what());
    }

    switch (decision.kind) {
      case Decision::Kind::ContinueGeneration:
        loop.append(*chunk.matched_stop, SegmentOrigin::Model,
                    backend.count_tokens(*chunk.matched_stop), true, approx);
        break;
      case Decision::Kind::InjectTransition:
        if (*chunk.matched_stop == config.delimiter) {
          loop.append(config.delimiter, SegmentOrigin::Model,
                      backend.count_tokens(config.delimiter), true, approx);
        }
        loop.append(config.transition_token, SegmentOrigin::Injected,
                    backend.count_tokens(config.transition_token), true, approx);
        break;
      case Decision::Kind::TerminateThinking: {
        // A natural end is the model's own token; a replaced wait variant is
        // ours. The terminator itself is not charged to the thinking budget.
        const bool natural = (*chunk.matched_stop == config.end_think_token);
        loop.append(config.end_think_token,
                    natural ? SegmentOrigin::Model : SegmentOrigin::Injected,
                    backend.count_tokens(config.end_think_token), false, approx);
        loop.state.phase = Phase::Answering;
        break;
      }
      case Decision::Kind::FinishRun:
        loop.state.finish = decision.finish;
        loop.state.phase = Phase::Done;
        break;
    }
    maybe_promote();
  }
  return loop.finish();
}

Transcript run_base(Backend& backend, const std::string& prompt, const GenerationLimits& limits,
                    std::uint64_t seed) {
  RunLoop loop(backend, "base", prompt, seed, limits.max_total_tokens, limits.temperature,
               limits.top_p);
  while (loop.state.phase != Phase::Done) {
    if (loop.cap_reached()) {
      loop.state.finish = RunFinish::LengthCap;
      loop.state.phase = Phase::Done;
      break;
    }
    const GenerationChunk chunk = loop.request({});
    loop.append(chunk.text, SegmentOrigin::Model, chunk.new_token_count, false,
                chunk.approximate_count);
    if (chunk.finish == FinishReason::Eos) {
      loop.state.finish = RunFinish::NaturalEOS;
      loop.state.phase = Phase::Done;
    } else if (chunk.finish == FinishReason::StopMatched) {
      loop.abort_run("backend matched a stop on a request with no stop sequences");
    } else if (chunk.new_token_count == 0 && chunk.text.empty()) {
      // Length with no output and budget left: the backend is stuck.
      loop.state.finish = RunFinish::LengthCap;
      loop.state.phase = Phase::Done;
    }
    // Length with budget left otherwise means the backend clipped early; keep going.
  }
  // Thinking length is derived after the fact: everything before the first
  // end-of-thinking token, or the whole completion if it never shows up.
  const std::string text = loop.transcript.text();
  const std::size_t pos = text.find(limits.end_think_token);
  loop.state.think_tokens = pos == std::string::npos
                                ? loop.state.total_tokens
                                : backend.count_tokens(std::string_view(text).substr(0, pos));
  return loop.finish();
}

Transcript run_s1(Backend& backend, const ModulationConfig& config, const std::string& prompt,
                  int max_suppressions, std::uint64_t seed) {
  require_valid(config);
  if (max_suppressions < 0) throw std::invalid_argument("max_suppressions must be >= 0");
  RunLoop loop(backend, "s1", prompt, seed, config.max_total_tokens, config.temperature,
               config.top_p);
  loop.transcript.config_snapshot = config;
  const bool approx = backend.approximate_token_counts();

  while (loop.state.phase != Phase::Done) {
    if (loop.cap_reached()) {
      loop.state.finish = RunFinish::LengthCap;
      loop.state.phase = Phase::Done;
      break;
    }
    const bool answering = loop.state.phase == Phase::Answering;
    const std::vector<std::string> stops =
        answering ? std::vector<std::string>{} : std::vector<std::string>{config.end_think_token};
    const GenerationChunk chunk = loop.request(stops);
    loop.append(chunk.text, SegmentOrigin::Model, chunk.new_token_count, !answering,
                chunk.approximate_count);

    switch (chunk.finish) {
      case FinishReason::StopMatched:
        if (*chunk.matched_stop != config.end_think_token) {
          loop.abort_run("backend matched stop \"" + *chunk.matched_stop +
                         "\" outside the active stop set");
        }
        if (loop.state.suppressions < static_cast<std::uint64_t>(max_suppressions)) {
          ++loop.state.suppressions;
          loop.append(config.transition_token, SegmentOrigin::Injected,
                      backend.count_tokens(config.transition_token), true, approx);
        } else {
          loop.append(config.end_think_token, SegmentOrigin::Model,
                      backend.count_tokens(config.end_think_token), false, approx);
          loop.state.phase = Phase::Answering;
        }
        break;
      case FinishReason::Eos:
        loop.state.finish = answering ? RunFinish::AnswerComplete : RunFinish::NaturalEOS;
        loop.state.phase = Phase::Done;
        break;
      case FinishReason::Length:
        loop.state.finish = RunFinish::LengthCap;
        loop.state.phase = Phase::Done;
        break;
    }
  }
  return loop.finish();
}

std::string wrap_cod_prompt(const std::string& prompt_template, const std::string& prompt) {
  static constexpr std::string_view kPlaceholder = "{task}";
  if (prompt_template.find(kPlaceholder) == std::string::npos) {
    throw std::invalid_argument("CoD template has no {task} placeholder");
  }
  std::string wrapped;
  std::size_t from = 0;
  for (;;) {
    const std::size_t pos = prompt_template.find(kPlaceholder, from);
    if (pos == std::string::npos) {
      wrapped += prompt_template.substr(from);
      return wrapped;
    }
    wrapped += prompt_template.substr(from, pos - from);
    wrapped += prompt;
    from = pos + kPlaceholder.size();
  }
}

Transcript run_cod(Backend& backend, const std::string& prompt_template, const std::string& prompt,
                   const GenerationLimits& limits, std::uint64_t seed) {
  Transcript transcript = run_base(backend, wrap_cod_prompt(prompt_template, prompt), limits, seed);
  transcript.strategy = "cod";
  return transcript;
}

}  // namespace alpha1
