#pragma once

#include <optional>
#include <string>
#include <vector>

#include "alpha1/backend.hpp"
#include "alpha1/config.hpp"
#include "alpha1/transcript.hpp"

namespace alpha1 {

// Outcome of one generation event. Exactly one per backend chunk.
struct Decision {
  enum class Kind { ContinueGeneration, InjectTransition, TerminateThinking, FinishRun };
  Kind kind = Kind::ContinueGeneration;
  RunFinish finish = RunFinish::NaturalEOS;  // FinishRun only
};

// A run aborted mid-flight: backend failure or a backend that violated the
// generation contract. Carries whatever transcript had accumulated.
struct RunAborted : std::runtime_error {
  RunAborted(const std::string& what, Transcript partial_transcript)
      : std::runtime_error(what), partial(std::move(partial_transcript)) {}
  Transcript partial;
};

// Active stop set per phase: pre-alpha stops at structural delimiters and the
// end-of-thinking token; post-alpha stops at slow-thinking transition tokens
// (to replace them) and the end-of-thinking token; the answering phase runs
// uninterrupted to EOS or the token cap.
std::vector<std::string> stop_sequences_for(const RunState& state, const ModulationConfig& config);

// The alpha1 decision table. `active_stops` is the stop set that was sent
// with the request that produced this event; a matched stop outside it is a
// backend contract violation. Mutates decision-related counters and the
// Bernoulli RNG; segment emission and phase changes are the run loop's job.
// Appends one record per delimiter decision to `decision_log` if non-null.
Decision on_generation_event(RunState& state, const ModulationConfig& config,
                             FinishReason finish, const std::optional<std::string>& matched_stop,
                             const std::vector<std::string>& active_stops,
                             std::vector<DelimiterDecision>* decision_log = nullptr);

// Scaled thinking-phase budgeting: Bernoulli-scheduled transition-token
// injection at delimiters before the alpha moment, deterministic thinking
// termination after it.
Transcript run_alpha_one(Backend& backend, const ModulationConfig& config,
                         const std::string& prompt, std::uint64_t seed);

// Vanilla single-pass generation; no stop sequences, no interventions.
Transcript run_base(Backend& backend, const std::string& prompt,
                    const GenerationLimits& limits, std::uint64_t seed = 0);

// Budget forcing: the first `max_suppressions` end-of-thinking attempts are
// replaced with the transition token; the next one is honored.
Transcript run_s1(Backend& backend, const ModulationConfig& config,
                  const std::string& prompt, int max_suppressions = 2, std::uint64_t seed = 0);

// Chain-of-draft-style prompting: wraps the task in a template and generates
// without runtime intervention.
Transcript run_cod(Backend& backend, const std::string& prompt_template,
                   const std::string& prompt, const GenerationLimits& limits,
                   std::uint64_t seed = 0);

inline constexpr const char* kDefaultCodTemplate =
    "Think step by step, but keep each thinking step to no more than five words. {task}";

// Substitutes every "{task}" occurrence; throws std::invalid_argument if the
// template has no placeholder.
std::string wrap_cod_prompt(const std::string& prompt_template, const std::string& prompt);

}  // namespace alpha1
