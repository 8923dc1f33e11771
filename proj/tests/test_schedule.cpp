#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "alpha1/schedule.hpp"
#include "doctest.h"

using namespace alpha1;

namespace {

ScheduleSpec make(ScheduleFamily family, std::uint64_t t_m) {
  ScheduleSpec spec;
  spec.family = family;
  spec.t_m = t_m;
  return spec;
}

}  // namespace

TEST_CASE("linear anneal boundaries") {
  auto spec = make(ScheduleFamily::LinearAnneal, 1000);
  CHECK(eval_schedule(spec, 0) == 1.0);
  CHECK(eval_schedule(spec, 1000) == 0.0);
}

TEST_CASE("linear increase boundaries and midpoint") {
  auto spec = make(ScheduleFamily::LinearIncrease, 1000);
  CHECK(eval_schedule(spec, 0) == 0.0);
  CHECK(eval_schedule(spec, 500) == 0.5);
  CHECK(eval_schedule(spec, 1000) == 1.0);
}

TEST_CASE("exponential anneal against a long-double oracle") {
  auto spec = make(ScheduleFamily::ExponentialAnneal, 100);
  spec.gamma = 0.3;
  spec.time_base = ExpTimeBase::EventIndex;
  CHECK(eval_schedule(spec, 0) == 1.0);
  // Oracle: expl(-0.3L) = 0.740818220681717866...
  const double oracle = static_cast<double>(expl(-0.3L));
  CHECK(eval_schedule(spec, 1) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(std::fabs(eval_schedule(spec, 1) - 0.7408) <= 1e-4);
}

TEST_CASE("constant schedule ignores t") {
  auto spec = make(ScheduleFamily::Constant, 1000);
  spec.p_constant = 0.25;
  for (std::uint64_t t : {0ULL, 1ULL, 317ULL, 999ULL, 1000ULL}) {
    CHECK(eval_schedule(spec, t) == 0.25);
  }
}

TEST_CASE("validate names each violated field") {
  auto spec = make(ScheduleFamily::Constant, 100);
  spec.p_constant = 1.2;
  auto errors = validate(spec);
  REQUIRE(errors.size() == 1);
  CHECK(errors[0] == "p_constant out of [0,1]");

  spec = make(ScheduleFamily::ExponentialAnneal, 100);
  spec.gamma = 0.3;
  CHECK(validate(spec).empty());
  spec.gamma = -1.0;
  errors = validate(spec);
  REQUIRE(errors.size() == 1);
  CHECK(errors[0] == "gamma must be > 0");

  spec = make(ScheduleFamily::LinearAnneal, 0);
  errors = validate(spec);
  REQUIRE(errors.size() == 1);
  CHECK(errors[0] == "t_m must be >= 1");
}

TEST_CASE("eval rejects t beyond the alpha moment and invalid specs") {
  auto spec = make(ScheduleFamily::LinearAnneal, 10);
  CHECK_THROWS_AS(eval_schedule(spec, 11), std::invalid_argument);
  spec.t_m = 0;
  CHECK_THROWS_AS(eval_schedule(spec, 0), std::invalid_argument);
}

TEST_CASE("range and monotonicity over a dense grid") {
  std::mt19937_64 rng(7);
  for (int iter = 0; iter < 50; ++iter) {
    ScheduleSpec spec;
    spec.t_m = 1 + rng() % 5000;
    spec.p_constant = static_cast<double>(rng() % 1001) / 1000.0;
    spec.gamma = 0.05 + static_cast<double>(rng() % 100) / 50.0;
    const ScheduleFamily families[] = {ScheduleFamily::Constant, ScheduleFamily::LinearIncrease,
                                       ScheduleFamily::LinearAnneal,
                                       ScheduleFamily::ExponentialAnneal};
    spec.family = families[rng() % 4];

    double prev = eval_schedule(spec, 0);
    CHECK(prev >= 0.0);
    CHECK(prev <= 1.0);
    const std::uint64_t step = std::max<std::uint64_t>(1, spec.t_m / 200);
    for (std::uint64_t t = step; t <= spec.t_m; t += step) {
      const double p = eval_schedule(spec, t);
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
      switch (spec.family) {
        case ScheduleFamily::Constant:
          CHECK(p == spec.p_constant);
          break;
        case ScheduleFamily::LinearIncrease:
          CHECK(p >= prev);
          break;
        case ScheduleFamily::LinearAnneal:
        case ScheduleFamily::ExponentialAnneal:
          CHECK(p <= prev);
          break;
      }
      prev = p;
    }
  }
}

TEST_CASE("alpha moment arithmetic") {
  CHECK(compute_alpha_moment(1.4, 4130) == 5782);
  CHECK(compute_alpha_moment(1.0, 2435) == 2435);
  CHECK(compute_alpha_moment(1.4, 1493) == 2090);
  CHECK(compute_alpha_moment(0.001, 10) == 1);  // floor at 1
  CHECK_THROWS_AS(compute_alpha_moment(0.0, 100), std::invalid_argument);
  CHECK_THROWS_AS(compute_alpha_moment(-1.4, 100), std::invalid_argument);
  CHECK_THROWS_AS(compute_alpha_moment(1.4, 0), std::invalid_argument);
}

TEST_CASE("name round trips") {
  for (auto family : {ScheduleFamily::Constant, ScheduleFamily::LinearIncrease,
                      ScheduleFamily::LinearAnneal, ScheduleFamily::ExponentialAnneal}) {
    CHECK(schedule_family_from_string(to_string(family)) == family);
  }
  CHECK_THROWS(schedule_family_from_string("quadratic"));
}
