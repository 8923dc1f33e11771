#include "alpha1/transcript.hpp"

#include <stdexcept>

namespace alpha1 {

std::string Transcript::text() const {
  std::string out;
  for (const auto& segment : segments) out += segment.text;
  return out;
}

std::uint64_t Transcript::segment_token_sum() const {
  std::uint64_t sum = 0;
  for (const auto& segment : segments) sum += segment.token_count;
  return sum;
}

std::string to_string(Phase phase) {
  switch (phase) {
    case Phase::PreAlpha: return "pre_alpha";
    case Phase::PostAlphaThinking: return "post_alpha_thinking";
    case Phase::Answering: return "answering";
    case Phase::Done: return "done";
  }
  return "?";
}

std::string to_string(SegmentOrigin origin) {
  return origin == SegmentOrigin::Model ? "model" : "injected";
}

std::string to_string(RunFinish finish) {
  switch (finish) {
    case RunFinish::NaturalEOS: return "natural_eos";
    case RunFinish::LengthCap: return "length_cap";
    case RunFinish::AnswerComplete: return "answer_complete";
  }
  return "?";
}

Phase phase_from_string(const std::string& name) {
  if (name == "pre_alpha") return Phase::PreAlpha;
  if (name == "post_alpha_thinking") return Phase::PostAlphaThinking;
  if (name == "answering") return Phase::Answering;
  if (name == "done") return Phase::Done;
  throw std::invalid_argument("unknown phase: " + name);
}

SegmentOrigin segment_origin_from_string(const std::string& name) {
  if (name == "model") return SegmentOrigin::Model;
  if (name == "injected") return SegmentOrigin::Injected;
  throw std::invalid_argument("unknown segment origin: " + name);
}

RunFinish run_finish_from_string(const std::string& name) {
  if (name == "natural_eos") return RunFinish::NaturalEOS;
  if (name == "length_cap") return RunFinish::LengthCap;
  if (name == "answer_complete") return RunFinish::AnswerComplete;
  throw std::invalid_argument("unknown finish reason: " + name);
}

}  // namespace alpha1
