#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace alpha1 {

// Slow-thinking activation probability schedule S(t) over the pre-alpha
// window t in [0, t_m]. Four families; the linear ones take t in thinking
// tokens, the exponential one decays in either tokens or delimiter-event
// index (token-based decay with gamma=0.3 is numerically dead after ~50
// tokens, so event index is the default).
enum class ScheduleFamily { Constant, LinearIncrease, LinearAnneal, ExponentialAnneal };
enum class ExpTimeBase { TokenCount, EventIndex };

struct ScheduleSpec {
  ScheduleFamily family = ScheduleFamily::LinearAnneal;
  double p_constant = 1.0;  // Constant only
  double gamma = 0.3;       // ExponentialAnneal only
  ExpTimeBase time_base = ExpTimeBase::EventIndex;  // ExponentialAnneal only
  std::uint64_t t_m = 1;    // alpha moment, in thinking-phase tokens
};

// Empty result means the spec is valid; otherwise one message per violated
// field.
std::vector<std::string> validate(const ScheduleSpec& spec);

// S(t) for t <= spec.t_m, clamped to [0,1]. Throws std::invalid_argument on an
// invalid spec or t > t_m.
double eval_schedule(const ScheduleSpec& spec, std::uint64_t t);

// t_m = round(alpha * n_think_avg), half-up, minimum 1. Throws on
// non-positive inputs.
std::uint64_t compute_alpha_moment(double alpha, std::uint64_t n_think_avg);

std::string to_string(ScheduleFamily family);
std::string to_string(ExpTimeBase base);
ScheduleFamily schedule_family_from_string(const std::string& name);
ExpTimeBase exp_time_base_from_string(const std::string& name);

}  // namespace alpha1
