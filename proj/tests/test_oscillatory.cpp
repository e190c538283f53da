#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nldamp/averaged.hpp"
#include "nldamp/errors.hpp"
#include "nldamp/oscillatory.hpp"
#include "nldamp/util.hpp"

using namespace nldamp;

namespace {
const PhaseFunction kNoPhase{};
}

TEST_CASE("reference value for the plain phase integral") {
  // int_0^30 cos(e^tau) dtau reduces to int_1^{e^30} cos(x)/x dx; the upper
  // tail is negligible, so the value is -Ci(1) = -0.3374039229096505.
  const OscIntegral r = osc_integral(1.0, kNoPhase, 0.0, 30.0, 1e-11);
  CHECK(r.value == doctest::Approx(-0.3374039229096505).epsilon(1e-7));
  CHECK(r.bound == doctest::Approx(3.0));
  CHECK(std::abs(r.value) <= r.bound);
}

TEST_CASE("bound formula scales with alpha and t") {
  const OscIntegral a = osc_integral(10.0, kNoPhase, 0.0, 5.0, 1e-9);
  CHECK(a.bound == doctest::Approx(0.3));
  const double t0 = std::log(10.0);
  const OscIntegral b = osc_integral(10.0, kNoPhase, t0, t0 + 5.0, 1e-9);
  CHECK(b.bound == doctest::Approx(0.03));
}

TEST_CASE("short spans match direct quadrature") {
  // Richardson-style oracle: midpoint rule with many panels on [0, 2].
  auto brute = [](double alpha, double slope, double a, double b) {
    const int n = 200000;
    double acc = 0.0;
    const double h = (b - a) / n;
    for (int i = 0; i < n; ++i) {
      const double x = a + (i + 0.5) * h;
      acc += std::cos(alpha * std::exp(x) + slope * x) * h;
    }
    return acc;
  };
  for (double alpha : {0.5, 1.0, 3.0}) {
    for (double slope : {-5.0, 0.0, 2.0}) {
      PhaseFunction psi;
      psi.value = [slope](double t) { return slope * t; };
      psi.derivative = [slope](double) { return slope; };
      psi.lipschitz_bound = std::abs(slope);
      const OscIntegral r = osc_integral(alpha, psi, 0.0, 2.0, 1e-11);
      CHECK(r.value == doctest::Approx(brute(alpha, slope, 0.0, 2.0)).epsilon(1e-6));
    }
  }
}

TEST_CASE("lipschitz bound is spot checked") {
  PhaseFunction psi;
  psi.value = [](double t) { return 3.0 * t; };
  psi.derivative = [](double) { return 3.0; };
  psi.lipschitz_bound = 1.0;  // declared too small
  CHECK_THROWS_AS(osc_integral(1.0, psi, 0.0, 5.0, 1e-9), std::invalid_argument);
}

TEST_CASE("randomized sweep never violates the decay bound") {
  std::mt19937_64 rng(20240901);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (double alpha : {0.5, 1.0, 5.0, 20.0}) {
    for (double slope : {-5.0, -1.0, 0.0, 1.0, 5.0}) {
      for (double t : {0.0, 2.0, 4.0, 8.0}) {
        const double span = 0.5 + 19.5 * unif(rng);
        const double phase0 = 6.2831853 * unif(rng);
        PhaseFunction psi;
        psi.value = [slope, phase0](double x) { return phase0 + slope * x; };
        psi.derivative = [slope](double) { return slope; };
        psi.lipschitz_bound = std::abs(slope);
        const OscIntegral r = osc_integral(alpha, psi, t, t + span, 1e-9);
        CHECK(std::abs(r.value) <= r.bound);
      }
    }
  }
}

TEST_CASE("time averages at T = 50") {
  CHECK(std::abs(time_average_sin2(1.0, 50.0) - 0.5) < 0.02);
  CHECK(std::abs(time_average_sin4(2.0, 50.0) - 0.375) < 0.02);
  CHECK(std::abs(time_average_sin2sin2(1.0, 2.0, 50.0) - 0.25) < 0.02);
  // Equal frequencies: independence fails and the limit moves to 3/8.
  CHECK(std::abs(time_average_sin2sin2(1.0, 1.0, 50.0) - 0.375) < 0.02);
  CHECK(std::abs(time_average_sin2sin2(1.0, 1.0, 50.0) - 0.25) > 0.05);
}

TEST_CASE("running averages converge at rate 1/T") {
  std::vector<double> xs, ys;
  for (double T : {8.0, 16.0, 32.0, 64.0, 128.0}) {
    const double dev = std::abs(time_average_sin2(1.0, T) - 0.5);
    xs.push_back(std::log(T));
    ys.push_back(std::log(std::max(dev, 1e-14)));
  }
  const double slope = linear_fit(xs, ys).first;
  CHECK(slope <= -0.8);
}

TEST_CASE("semi-integrability probe classifications") {
  std::vector<double> grid;
  for (int i = 0; i <= 12; ++i) grid.push_back(0.5 * i);

  const ProbeReport fast =
      semi_integrability_probe([](double t) { return std::cos(std::exp(t)); }, grid, 12.0);
  CHECK(fast.classification == EnvelopeClass::semi_integrable_exponential);
  CHECK(fast.fitted_constant <= 4.0);
  for (const EnvelopePoint& p : fast.envelope)
    CHECK(p.sup_abs_integral <= 4.0 * std::exp(-p.t));

  const ProbeReport diverging =
      semi_integrability_probe([](double t) { return 1.0 / (1.0 + t); }, grid, 12.0);
  CHECK(diverging.classification == EnvelopeClass::not_semi_integrable);

  const ProbeReport slow = semi_integrability_probe(
      [](double t) { return std::cos(t) / (1.0 + t); }, grid, 12.0);
  const bool accepted = slow.classification == EnvelopeClass::semi_integrable ||
                        slow.classification == EnvelopeClass::semi_integrable_exponential;
  CHECK(accepted);
}

TEST_CASE("trig corrections stay inside their pointwise bounds") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> angle(-30.0, 30.0);
  for (int trial = 0; trial < 5000; ++trial) {
    const double th = angle(rng), tk = angle(rng);
    CHECK(std::abs(trig_a(th)) <= 0.5 + 1e-15);
    CHECK(std::abs(trig_b(th)) <= 0.625 + 1e-15);
    CHECK(std::abs(trig_c(th, tk)) <= 0.75 + 1e-15);
    CHECK(std::abs(trig_a(th)) <= 1.0);
    CHECK(std::abs(trig_b(th)) <= 1.0);
    CHECK(std::abs(trig_c(th, tk)) <= 1.0);
  }
}

TEST_CASE("product bound for slow envelopes times certified oscillators") {
  // g = a(theta(s)) with theta ~ -lambda e^s has partial integrals bounded by
  // L4 e^{-t}; f = rho^2 from an averaged run is bounded with bounded
  // derivative. The product inherits |int_t^s g f| <= 3 L4 L5 e^{-t}.
  AveragedState init;
  init.rho = {1.0, 0.7};
  const AveragedTrajectory traj = integrate_averaged(init, 6.0, 1e-10, 2001);
  REQUIRE(traj.ok());
  const double lambda = 2.0;

  auto theta = [lambda](double s) { return -lambda * std::exp(s); };
  auto rho_sq = [&](double s) {
    // linear interpolation on the uniform sample grid
    const double ds = traj.s[1] - traj.s[0];
    const double pos = std::min(std::max(s / ds, 0.0), double(traj.size() - 1));
    const std::size_t i = std::min(static_cast<std::size_t>(pos), traj.size() - 2);
    const double w = pos - static_cast<double>(i);
    const double r = (1.0 - w) * traj.rho[i][0] + w * traj.rho[i + 1][0];
    return r * r;
  };

  // Certify L4 from the pure oscillator bound and L5 by sampling.
  const double l4 = (3.0 + 0.0) / (2.0 * lambda);  // a(theta) = -cos(2 theta)/2
  double l5 = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double s = 6.0 * i / 400.0;
    const double fd = (rho_sq(std::min(s + 1e-4, 6.0)) - rho_sq(std::max(s - 1e-4, 0.0))) / 2e-4;
    l5 = std::max(l5, std::max(std::abs(rho_sq(s)), std::abs(fd)));
  }

  // Dense quadrature of the product integral on a fine grid.
  const int n = 1 << 21;
  std::vector<double> vals(n + 1);
  const double h = 5.5 / n;
  for (int i = 0; i <= n; ++i) {
    const double s = h * i;
    vals[static_cast<std::size_t>(i)] = trig_a(theta(s)) * rho_sq(s);
  }
  std::vector<double> cum(n + 1, 0.0);
  for (int i = 1; i <= n; ++i)
    cum[static_cast<std::size_t>(i)] =
        cum[static_cast<std::size_t>(i - 1)] +
        0.5 * h * (vals[static_cast<std::size_t>(i - 1)] + vals[static_cast<std::size_t>(i)]);
  for (double t : {0.0, 1.0, 2.0, 3.0}) {
    const std::size_t i0 = static_cast<std::size_t>(t / h);
    double sup = 0.0;
    for (std::size_t i = i0; i <= static_cast<std::size_t>(n); ++i)
      sup = std::max(sup, std::abs(cum[i] - cum[i0]));
    CHECK(sup <= 3.0 * l4 * l5 * std::exp(-t) * 1.05);
  }
}

TEST_CASE("series bound for mode sums of corrections") {
  // Truncated series sum_k a_k rho_k^2 with theta_k = -lambda_k e^s and
  // amplitudes from an averaged run; |int_t^s| <= 3 L7 L8 e^{-t}.
  const std::size_t n_modes = 6;
  AveragedState init;
  init.rho.resize(n_modes);
  for (std::size_t k = 0; k < n_modes; ++k)
    init.rho[k] = std::pow(static_cast<double>(k + 2), -0.7);
  const AveragedTrajectory traj = integrate_averaged(init, 5.0, 1e-10, 2001);
  REQUIRE(traj.ok());

  std::vector<double> lambdas(n_modes);
  for (std::size_t k = 0; k < n_modes; ++k) lambdas[k] = static_cast<double>(k + 1);

  auto rho_at = [&](double s, std::size_t k) {
    const double ds = traj.s[1] - traj.s[0];
    const double pos = std::min(std::max(s / ds, 0.0), double(traj.size() - 1));
    const std::size_t i = std::min(static_cast<std::size_t>(pos), traj.size() - 2);
    const double w = pos - static_cast<double>(i);
    return (1.0 - w) * traj.rho[i][k] + w * traj.rho[i + 1][k];
  };

  const double l7 = 3.0 / (2.0 * lambdas.front());
  double l8 = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double s = 5.0 * i / 200.0;
    double sum = 0.0, dsum = 0.0;
    for (std::size_t k = 0; k < n_modes; ++k) {
      const double r = rho_at(s, k);
      const double fd =
          (rho_at(std::min(s + 1e-4, 5.0), k) - rho_at(std::max(s - 1e-4, 0.0), k)) / 2e-4;
      sum += r * r;
      dsum += std::abs(2.0 * r * fd);
    }
    l8 = std::max(l8, std::max(sum, dsum));
  }

  const int n = 1 << 21;
  const double h = 4.5 / n;
  std::vector<double> cum(static_cast<std::size_t>(n) + 1, 0.0);
  double prev = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double s = h * i;
    double val = 0.0;
    for (std::size_t k = 0; k < n_modes; ++k) {
      const double r = rho_at(s, k);
      val += trig_a(-lambdas[k] * std::exp(s)) * r * r;
    }
    if (i > 0) cum[static_cast<std::size_t>(i)] = cum[static_cast<std::size_t>(i - 1)] + 0.5 * h * (prev + val);
    prev = val;
  }
  for (double t : {0.0, 1.0, 2.0}) {
    const std::size_t i0 = static_cast<std::size_t>(t / h);
    double sup = 0.0;
    for (std::size_t i = i0; i < cum.size(); ++i) sup = std::max(sup, std::abs(cum[i] - cum[i0]));
    CHECK(sup <= 3.0 * l7 * l8 * std::exp(-t) * 1.05);
  }
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(osc_integral(-1.0, kNoPhase, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(osc_integral(1.0, kNoPhase, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(time_average_sin2(0.0, 50.0), std::invalid_argument);
  CHECK_THROWS_AS(time_average_sin2(1.0, 0.5), std::invalid_argument);
}
