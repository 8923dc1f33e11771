#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "alpha1/schedule.hpp"

namespace alpha1 {

// What to do when the model emits the end-of-thinking token before the alpha
// moment: honor it, or replace it with the transition token (s1-style).
enum class EarlyEndPolicy { RespectNaturalEnd, SuppressEarlyEnd };

// Full parameter set of the alpha1 control procedure. Defaults follow the
// reference configuration: alpha 1.4, linear-anneal schedule, "Wait," after
// "\n\n" delimiters, temperature 0.6 / top-p 0.95 / 8192-token budget.
struct ModulationConfig {
  double alpha = 1.4;
  ScheduleSpec schedule;  // schedule.t_m must be resolved before running
  std::string transition_token = "Wait,";
  std::string delimiter = "\n\n";
  std::string end_think_token = "</think>";
  std::vector<std::string> post_alpha_wait_variants = {"Wait", "wait"};
  std::uint64_t max_total_tokens = 8192;
  EarlyEndPolicy early_end_policy = EarlyEndPolicy::RespectNaturalEnd;
  double temperature = 0.6;
  double top_p = 0.95;
};

std::vector<std::string> validate(const ModulationConfig& config);

// Limits shared by the passthrough strategies (base, CoD).
struct GenerationLimits {
  std::uint64_t max_total_tokens = 8192;
  double temperature = 0.6;
  double top_p = 0.95;
  std::string end_think_token = "</think>";
};

GenerationLimits limits_from(const ModulationConfig& config);

std::string to_string(EarlyEndPolicy policy);
EarlyEndPolicy early_end_policy_from_string(const std::string& name);

}  // namespace alpha1
