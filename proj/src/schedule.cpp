#include "alpha1/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace alpha1 {

std::vector<std::string> validate(const ScheduleSpec& spec) {
  std::vector<std::string> errors;
  if (spec.family == ScheduleFamily::Constant &&
      !(spec.p_constant >= 0.0 && spec.p_constant <= 1.0)) {
    errors.push_back("p_constant out of [0,1]");
  }
  if (spec.family == ScheduleFamily::ExponentialAnneal && !(spec.gamma > 0.0)) {
    errors.push_back("gamma must be > 0");
  }
  if (spec.t_m < 1) {
    errors.push_back("t_m must be >= 1");
  }
  return errors;
}

double eval_schedule(const ScheduleSpec& spec, std::uint64_t t) {
  if (auto errors = validate(spec); !errors.empty()) {
    throw std::invalid_argument("invalid ScheduleSpec: " + errors.front());
  }
  if (t > spec.t_m) {
    throw std::invalid_argument("eval_schedule: t=" + std::to_string(t) +
                                " exceeds t_m=" + std::to_string(spec.t_m));
  }
  double p = 0.0;
  const double ratio = static_cast<double>(t) / static_cast<double>(spec.t_m);
  switch (spec.family) {
    case ScheduleFamily::Constant:
      p = spec.p_constant;
      break;
    case ScheduleFamily::LinearIncrease:
      p = ratio;
      break;
    case ScheduleFamily::LinearAnneal:
      p = 1.0 - ratio;
      break;
    case ScheduleFamily::ExponentialAnneal:
      p = std::exp(-spec.gamma * static_cast<double>(t));
      break;
  }
  return std::clamp(p, 0.0, 1.0);
}

std::uint64_t compute_alpha_moment(double alpha, std::uint64_t n_think_avg) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("compute_alpha_moment: alpha must be > 0");
  }
  if (n_think_avg < 1) {
    throw std::invalid_argument("compute_alpha_moment: n_think_avg must be >= 1");
  }
  const double scaled = alpha * static_cast<double>(n_think_avg);
  const auto rounded = static_cast<std::uint64_t>(std::floor(scaled + 0.5));
  return std::max<std::uint64_t>(rounded, 1);
}

std::string to_string(ScheduleFamily family) {
  switch (family) {
    case ScheduleFamily::Constant: return "constant";
    case ScheduleFamily::LinearIncrease: return "linear-increase";
    case ScheduleFamily::LinearAnneal: return "linear-anneal";
    case ScheduleFamily::ExponentialAnneal: return "exp-anneal";
  }
  return "?";
}

std::string to_string(ExpTimeBase base) {
  return base == ExpTimeBase::TokenCount ? "token" : "event";
}

ScheduleFamily schedule_family_from_string(const std::string& name) {
  if (name == "constant") return ScheduleFamily::Constant;
  if (name == "linear-increase") return ScheduleFamily::LinearIncrease;
  if (name == "linear-anneal") return ScheduleFamily::LinearAnneal;
  if (name == "exp-anneal") return ScheduleFamily::ExponentialAnneal;
  throw std::invalid_argument("unknown schedule family: " + name);
}

ExpTimeBase exp_time_base_from_string(const std::string& name) {
  if (name == "token") return ExpTimeBase::TokenCount;
  if (name == "event") return ExpTimeBase::EventIndex;
  throw std::invalid_argument("unknown exp time base: " + name);
}

}  // namespace alpha1
