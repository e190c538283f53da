#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nldamp/errors.hpp"
#include "nldamp/full_system.hpp"

using namespace nldamp;

namespace {

ModalState two_mode_initial(const Spectrum& spec, double amp1, double amp2) {
  ModalState st;
  st.u = {amp1 / spec[0], amp2 / spec[1]};
  st.du = {-st.u[0] / 2.0, -st.u[1] / 2.0};
  return st;
}

}  // namespace

TEST_CASE("zero initial state stays identically zero") {
  const Spectrum spec = make_spectrum({1.0, 2.0});
  ModalState zero;
  zero.u = {0.0, 0.0};
  zero.du = {0.0, 0.0};
  IntegratorConfig cfg;
  cfg.t_end = 100.0;
  cfg.sample_count = 50;
  const Trajectory traj = integrate_full(zero, spec, cfg);
  REQUIRE(traj.ok());
  CHECK(traj.active.empty());
  for (const ModalState& s : traj.samples) {
    CHECK(s.u[0] == 0.0);
    CHECK(s.u[1] == 0.0);
    CHECK(s.du[0] == 0.0);
    CHECK(s.du[1] == 0.0);
  }
  CHECK(verify_energy_identity(traj) == 0.0);
  CHECK_THROWS_AS(fit_decay(traj), degenerate_input);
}

TEST_CASE("single-mode reference run hits the rescaled energy window") {
  const Spectrum spec = make_spectrum({1.0});
  ModalState init;
  init.u = {1.0};
  init.du = {0.0};
  IntegratorConfig cfg;
  cfg.t_end = 1e3;
  cfg.rel_tol = 1e-10;
  cfg.abs_tol = 1e-12;
  cfg.sample_count = 1000;
  const Trajectory traj = integrate_full(init, spec, cfg);
  REQUIRE(traj.ok());

  // t * E(t) at the final sample, limit 4/3.
  const double tE =
      traj.samples.back().t * traj.diagnostics.back().energy;
  CHECK(tE > 1.28);
  CHECK(tE < 1.39);

  // Energy identity at this sampling density.
  CHECK(verify_energy_identity(traj) < 1e-4);

  // Monotone energy up to tolerance slack.
  for (std::size_t i = 0; i + 1 < traj.size(); ++i)
    CHECK(traj.diagnostics[i + 1].energy <=
          traj.diagnostics[i].energy * (1.0 + 10.0 * cfg.rel_tol));

  const DecayFit fit = fit_decay(traj);
  CHECK(fit.m1 > 0.0);
  CHECK(fit.m1 <= fit.m2);
}

TEST_CASE("masked modes stay bit-exact zero while others move") {
  const Spectrum spec = make_spectrum({1.0, 2.0, 3.0});
  ModalState init;
  init.u = {1.0, 0.0, 0.3};
  init.du = {0.0, 0.0, 0.1};
  IntegratorConfig cfg;
  cfg.t_end = 50.0;
  cfg.sample_count = 100;
  const Trajectory traj = integrate_full(init, spec, cfg);
  REQUIRE(traj.ok());
  CHECK(traj.active.indices == std::vector<std::size_t>{0, 2});
  for (const ModalState& s : traj.samples) {
    CHECK(s.u[1] == 0.0);
    CHECK(s.du[1] == 0.0);
  }
  CHECK(traj.samples.back().u[0] != 0.0);
}

TEST_CASE("degenerate pair keeps proportional components") {
  const Spectrum spec = make_spectrum({1.0, 1.0});
  const double c = 0.5;
  ModalState init;
  init.u = {1.0, c};
  init.du = {-0.5, -0.5 * c};
  IntegratorConfig cfg;
  cfg.t_end = 1e3;
  cfg.rel_tol = 1e-10;
  cfg.abs_tol = 1e-13;
  cfg.sample_count = 400;
  const Trajectory traj = integrate_full(init, spec, cfg);
  REQUIRE(traj.ok());
  double worst = 0.0;
  for (const ModalState& s : traj.samples) {
    const double scale = std::sqrt(s.u[0] * s.u[0] + s.du[0] * s.du[0]);
    const double du = s.u[1] - c * s.u[0];
    const double dv = s.du[1] - c * s.du[0];
    if (scale > 0.0) worst = std::max(worst, std::sqrt(du * du + dv * dv) / scale);
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("rotating frame agrees with the adaptive baseline") {
  const Spectrum spec = make_spectrum({1.0, 2.0});
  const ModalState init = two_mode_initial(spec, 1.0, 0.8);
  IntegratorConfig cfg;
  cfg.t_end = 300.0;
  cfg.rel_tol = 1e-6;
  cfg.abs_tol = 1e-10;
  cfg.sample_count = 200;
  const Trajectory base = integrate_full(init, spec, cfg);
  cfg.scheme = Scheme::rotating_frame;
  const Trajectory rot = integrate_full(init, spec, cfg);
  REQUIRE(base.ok());
  REQUIRE(rot.ok());
  REQUIRE(base.size() == rot.size());
  const double allowed = 5.0 * std::sqrt(cfg.rel_tol);
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (base.samples[i].t < 1.0) continue;  // overlap window in rescaled variables
    const double a = base.diagnostics[i].rescaled_energy;
    const double b = rot.diagnostics[i].rescaled_energy;
    CHECK(std::abs(a - b) <= allowed * std::abs(a));
  }
}

TEST_CASE("energy identity flags violations on doctored data") {
  const Spectrum spec = make_spectrum({1.0});
  ModalState init;
  init.u = {1.0};
  init.du = {0.0};
  IntegratorConfig cfg;
  cfg.t_end = 200.0;
  cfg.rel_tol = 1e-10;
  cfg.sample_count = 300;
  Trajectory traj = integrate_full(init, spec, cfg);
  REQUIRE(traj.ok());
  const double clean = verify_energy_identity(traj);
  // Inject an energy bump between two samples.
  traj.diagnostics[150].energy *= 1.5;
  const double doctored = verify_energy_identity(traj);
  CHECK(doctored > 100.0 * clean);

  Trajectory tiny = traj;
  tiny.samples.resize(1);
  tiny.diagnostics.resize(1);
  CHECK_THROWS_AS(verify_energy_identity(tiny), std::invalid_argument);
}

TEST_CASE("fit_decay checks the horizon and returns the decay slope") {
  const Spectrum spec = make_spectrum({1.0});
  ModalState init;
  init.u = {1.0};
  init.du = {0.0};
  IntegratorConfig cfg;
  cfg.t_end = 50.0;  // less than two decades
  cfg.sample_count = 60;
  const Trajectory short_run = integrate_full(init, spec, cfg);
  CHECK_THROWS_AS(fit_decay(short_run), std::invalid_argument);

  cfg.t_end = 2e3;
  cfg.sample_count = 500;
  const Trajectory run = integrate_full(init, spec, cfg);
  const DecayFit fit = fit_decay(run);
  CHECK(fit.slope > -1.1);
  CHECK(fit.slope < -0.9);
}

TEST_CASE("config validation") {
  const Spectrum spec = make_spectrum({1.0});
  ModalState init;
  init.u = {1.0};
  init.du = {0.0};
  IntegratorConfig cfg;
  cfg.t_end = -1.0;
  CHECK_THROWS_AS(integrate_full(init, spec, cfg), std::invalid_argument);
  cfg.t_end = 10.0;
  cfg.rel_tol = 0.5;  // outside (0, 1e-2]
  CHECK_THROWS_AS(integrate_full(init, spec, cfg), std::invalid_argument);
  cfg.rel_tol = 1e-8;
  ModalState bad;
  bad.u = {std::numeric_limits<double>::quiet_NaN()};
  bad.du = {0.0};
  CHECK_THROWS_AS(integrate_full(bad, spec, cfg), std::invalid_argument);
}
