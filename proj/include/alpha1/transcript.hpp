#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "alpha1/config.hpp"

namespace alpha1 {

// Phases are strictly ordered; a run may skip forward but never revisits an
// earlier phase.
enum class Phase { PreAlpha, PostAlphaThinking, Answering, Done };

enum class SegmentOrigin { Model, Injected };

enum class RunFinish { NaturalEOS, LengthCap, AnswerComplete };

struct RunState {
  Phase phase = Phase::PreAlpha;
  std::uint64_t think_tokens = 0;
  std::uint64_t total_tokens = 0;
  std::uint64_t delimiter_events = 0;  // pre-alpha delimiter stops
  std::uint64_t injections = 0;        // delimiter-triggered transition insertions
  std::uint64_t suppressions = 0;      // end-of-thinking interceptions
  std::optional<RunFinish> finish;
  std::mt19937_64 rng;
};

// One contiguous piece of the completion. Concatenating segment texts in
// order reproduces the final completion byte for byte.
struct TranscriptSegment {
  std::string text;
  SegmentOrigin origin = SegmentOrigin::Model;
  Phase phase = Phase::PreAlpha;
  std::uint64_t token_count = 0;
};

// Record of one pre-alpha delimiter decision, for schedule-conformance
// analysis: thinking-token timestamp, event index, the scheduled probability,
// and the Bernoulli outcome.
struct DelimiterDecision {
  std::uint64_t t = 0;
  std::uint64_t event_index = 0;
  double prob = 0.0;
  bool injected = false;
};

struct Transcript {
  std::string strategy;
  std::string prompt;
  std::vector<TranscriptSegment> segments;
  std::vector<DelimiterDecision> delimiter_decisions;
  RunState final_state;
  ModulationConfig config_snapshot;
  std::uint64_t seed = 0;
  bool token_counts_approximate = false;

  std::string text() const;
  std::uint64_t segment_token_sum() const;
};

std::string to_string(Phase phase);
std::string to_string(SegmentOrigin origin);
std::string to_string(RunFinish finish);
Phase phase_from_string(const std::string& name);
SegmentOrigin segment_origin_from_string(const std::string& name);
RunFinish run_finish_from_string(const std::string& name);

}  // namespace alpha1
