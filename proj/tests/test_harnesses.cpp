#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nldamp/averaged.hpp"
#include "nldamp/harnesses.hpp"

using namespace nldamp;

TEST_CASE("logistic closed form without perturbations") {
  PropRSpec spec;
  spec.z_infinity = 2.0;
  spec.z0 = 1.0;
  const double t_end = 20.0;
  const PropRReport rep = prop_r_harness(spec, t_end);
  const double exact = spec.z_infinity / (1.0 + (spec.z_infinity / spec.z0 - 1.0) * std::exp(-t_end));
  for (const ScheduleResult& s : rep.schedules)
    CHECK(std::abs(s.final_value - exact) < 1e-8);
  CHECK(rep.converged);
  CHECK(rep.hypotheses_ok);
}

TEST_CASE("constant solution stays constant") {
  PropRSpec spec;
  spec.z_infinity = 2.0;
  spec.z0 = 2.0;
  const PropRReport rep = prop_r_harness(spec, 10.0);
  for (const ScheduleResult& s : rep.schedules)
    CHECK(std::abs(s.final_value - 2.0) < 1e-10);
}

TEST_CASE("oscillatory forcing still converges for every adversary schedule") {
  PropRSpec spec;
  spec.z_infinity = 2.0;
  spec.psi1 = [](double t) { return std::cos(std::exp(t)); };
  spec.psi2 = [](double t) { return std::exp(-t); };
  spec.z0 = 1.0;
  const PropRReport rep = prop_r_harness(spec, 40.0);
  CHECK(rep.hypotheses_ok);
  CHECK(rep.converged);
  for (const ScheduleResult& s : rep.schedules)
    CHECK(std::abs(s.final_value - 2.0) < 5e-3);
}

TEST_CASE("hypothesis violations flag the run but do not abort") {
  PropRSpec spec;
  spec.z_infinity = 2.0;
  spec.psi2 = [](double) { return 0.5; };  // does not vanish
  spec.z0 = 1.0;
  const PropRReport rep = prop_r_harness(spec, 10.0);
  CHECK_FALSE(rep.hypotheses_ok);
  CHECK(!rep.flags.empty());
  CHECK(rep.schedules.size() == 4);  // the integration still ran
}

TEST_CASE("bernoulli limit with unit damping") {
  BernoulliSpec spec;
  spec.alpha = [](double) { return 1.0; };
  spec.L1 = 1.0;
  spec.z0 = 3.0;
  const BernoulliReport rep = bernoulli_harness(spec, 30.0);
  CHECK(rep.hypotheses_ok);
  CHECK(std::abs(rep.final_value - 1.0) < 1e-6);
}

TEST_CASE("threshold computation and capped excursion") {
  BernoulliSpec spec;
  spec.alpha = [](double) { return 1.0; };
  spec.beta = [](double t) { return std::cos(std::exp(t)); };
  spec.L0 = 0.0;
  spec.L1 = 1.0;
  spec.L2 = 1.0;
  spec.z0 = 1.0;
  const BernoulliReport rep = bernoulli_harness(spec, 30.0);
  // 74 e^{-t0} < log 2  =>  t0 = log(74 / log 2)
  CHECK(rep.t0_threshold == doctest::Approx(std::log(74.0 / std::log(2.0))).epsilon(1e-6));
  CHECK(rep.t0_threshold == doctest::Approx(4.6708).epsilon(1e-3));
  CHECK(rep.sup_after_t0 <= 2.0);
  CHECK(rep.sup_after_t0 >= 1.0 - 1e-9);
}

TEST_CASE("imported averaged-flow damping reproduces the quotient dynamics") {
  AveragedState init;
  init.rho = {1.0, 0.5};
  const double s_end = 40.0;
  const AveragedTrajectory traj = integrate_averaged(init, s_end, 1e-11, 4001);
  REQUIRE(traj.ok());

  auto rho_h_sq = [&](double s) {
    const double ds = traj.s[1] - traj.s[0];
    const double pos = std::min(std::max(s / ds, 0.0), double(traj.size() - 1));
    const std::size_t i = std::min(static_cast<std::size_t>(pos), traj.size() - 2);
    const double w = pos - static_cast<double>(i);
    const double r = (1.0 - w) * traj.rho[i][0] + w * traj.rho[i + 1][0];
    return r * r;
  };

  BernoulliSpec spec;
  spec.alpha = [&](double t) { return rho_h_sq(t) / 8.0; };
  spec.L1 = 1.0;
  spec.z0 = 0.5;  // = Q(0)
  const BernoulliReport rep = bernoulli_harness(spec, s_end, 1e-10);

  const double q_end = traj.rho.back()[1] / traj.rho.back()[0];
  CHECK(std::abs(rep.final_value - q_end) < 1e-4);
  CHECK(std::abs(rep.final_value - 1.0) < 1e-2);
}

TEST_CASE("argument validation") {
  PropRSpec bad;
  bad.z_infinity = -1.0;
  CHECK_THROWS_AS(prop_r_harness(bad, 10.0), std::invalid_argument);
  BernoulliSpec nofn;
  CHECK_THROWS_AS(bernoulli_harness(nofn, 10.0), std::invalid_argument);
}
