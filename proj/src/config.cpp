#include "alpha1/config.hpp"

#include <stdexcept>

namespace alpha1 {

std::vector<std::string> validate(const ModulationConfig& config) {
  std::vector<std::string> errors;
  if (!(config.alpha > 0.0)) errors.push_back("alpha must be > 0");
  if (config.transition_token.empty()) errors.push_back("transition_token must be non-empty");
  if (config.delimiter.empty()) errors.push_back("delimiter must be non-empty");
  if (config.end_think_token.empty()) errors.push_back("end_think_token must be non-empty");
  if (config.transition_token == config.delimiter ||
      config.transition_token == config.end_think_token ||
      config.delimiter == config.end_think_token) {
    errors.push_back("transition_token, delimiter, end_think_token must be pairwise distinct");
  }
  if (config.post_alpha_wait_variants.empty()) {
    errors.push_back("post_alpha_wait_variants must be non-empty");
  }
  for (const auto& variant : config.post_alpha_wait_variants) {
    if (variant.empty()) {
      errors.push_back("post_alpha_wait_variants must not contain empty strings");
      break;
    }
  }
  // OpenAI-compatible servers accept at most 4 stop sequences per request; the
  // post-alpha stop set is the wait variants plus the end-of-thinking token.
  if (config.post_alpha_wait_variants.size() + 1 > 4) {
    errors.push_back("post-alpha stop set exceeds 4 stop sequences");
  }
  if (config.max_total_tokens < 1) errors.push_back("max_total_tokens must be >= 1");
  if (!(config.temperature >= 0.0)) errors.push_back("temperature must be >= 0");
  if (!(config.top_p > 0.0 && config.top_p <= 1.0)) errors.push_back("top_p must be in (0,1]");
  for (const auto& err : validate(config.schedule)) {
    errors.push_back("schedule: " + err);
  }
  return errors;
}

GenerationLimits limits_from(const ModulationConfig& config) {
  return {config.max_total_tokens, config.temperature, config.top_p, config.end_think_token};
}

std::string to_string(EarlyEndPolicy policy) {
  return policy == EarlyEndPolicy::RespectNaturalEnd ? "respect" : "suppress";
}

EarlyEndPolicy early_end_policy_from_string(const std::string& name) {
  if (name == "respect") return EarlyEndPolicy::RespectNaturalEnd;
  if (name == "suppress") return EarlyEndPolicy::SuppressEarlyEnd;
  throw std::invalid_argument("unknown early-end policy: " + name);
}

}  // namespace alpha1
