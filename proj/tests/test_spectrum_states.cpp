#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nldamp/spectrum.hpp"
#include "nldamp/states.hpp"
#include "nldamp/util.hpp"

using namespace nldamp;

TEST_CASE("dirichlet string spectrum") {
  const double pi = 3.14159265358979323846;
  const Spectrum s = make_spectrum_dirichlet(pi, 3);
  CHECK(s.size() == 3);
  CHECK(s[0] == doctest::Approx(1.0));
  CHECK(s[1] == doctest::Approx(2.0));
  CHECK(s[2] == doctest::Approx(3.0));
  CHECK(s.simple);
  // min_gap equals pi/length within one ulp
  const Spectrum s2 = make_spectrum_dirichlet(3.0, 41);
  const double expect = pi / 3.0;
  CHECK(std::abs(s2.min_gap - expect) <= std::ldexp(expect, -52));
}

TEST_CASE("spectrum generators and validation") {
  const Spectrum a = make_spectrum_arithmetic(1.0, 0.5, 2);
  CHECK(a[0] == 1.0);
  CHECK(a[1] == 1.5);
  CHECK(a.min_gap == doctest::Approx(0.5));

  const Spectrum degenerate = make_spectrum({1.0, 1.0});
  CHECK_FALSE(degenerate.simple);
  CHECK(degenerate.min_gap == 0.0);

  const Spectrum c = make_spectrum_clustered(1.0, 1.0, 0.01, 5);
  CHECK(c[0] == 1.0);
  CHECK(c[1] == doctest::Approx(1.01));
  CHECK(c[2] == 2.0);
  CHECK(c.min_gap == doctest::Approx(0.01));

  CHECK_THROWS_AS(make_spectrum_dirichlet(-1.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(make_spectrum_dirichlet(1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_spectrum({2.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_spectrum({0.0, 1.0}), std::invalid_argument);

  const Spectrum single = make_spectrum({2.5});
  CHECK(std::isinf(single.min_gap));
}

TEST_CASE("classical energy") {
  const Spectrum s = make_spectrum({1.0, 2.0});
  ModalState st;
  st.t = 0.0;

  st.u = {0.0, 0.0};
  st.du = {1.0, 0.0};
  EnergyBreakdown e = classical_energy(st, s);
  CHECK(e.total == doctest::Approx(1.0));
  CHECK(e.modal[0] == doctest::Approx(1.0));
  CHECK(e.modal[1] == 0.0);

  st.u = {0.0, 0.0};
  st.du = {0.0, 0.0};
  CHECK(classical_energy(st, s).total == 0.0);

  st.u = {1.0, 0.0};  // 1/lambda_1 with lambda_1 = 1
  st.du = {0.0, 0.0};
  CHECK(classical_energy(st, s).total == doctest::Approx(1.0));

  ModalState bad;
  bad.u = {1.0};
  bad.du = {0.0};
  CHECK_THROWS_AS(classical_energy(bad, s), std::invalid_argument);
}

TEST_CASE("energy summation order is reproducible") {
  const std::size_t n = 257;
  const Spectrum s = make_spectrum_dirichlet(3.14159265358979323846, n);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  ModalState st;
  st.u.resize(n);
  st.du.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    st.u[k] = unif(rng);
    st.du[k] = unif(rng);
  }
  const double e1 = classical_energy(st, s).total;
  const double e2 = classical_energy(st, s).total;
  CHECK(e1 == e2);
  OrderedAccumulator acc;
  for (std::size_t k = 0; k < n; ++k) {
    const double lu = s[k] * st.u[k];
    acc.add(st.du[k] * st.du[k] + lu * lu);
  }
  CHECK(e1 == acc.value());
}

TEST_CASE("to_polar examples") {
  // t=0, lambda=1, u=1, du=-1/2: v=1, v'=0
  const Spectrum s1 = make_spectrum({1.0});
  ModalState st;
  st.t = 0.0;
  st.u = {1.0};
  st.du = {-0.5};
  PolarState p = to_polar(st, s1);
  CHECK(p.s == 0.0);
  CHECK(p.rho[0] == doctest::Approx(1.0));
  CHECK(p.theta[0] == doctest::Approx(0.0));

  st.u = {0.0};
  st.du = {0.0};
  p = to_polar(st, s1);
  CHECK(p.rho[0] == 0.0);
  CHECK(p.theta[0] == 0.0);  // convention at rho == 0

  const Spectrum s2 = make_spectrum({2.0});
  st.u = {0.0};
  st.du = {1.0};
  p = to_polar(st, s2);
  CHECK(p.rho[0] == doctest::Approx(1.0));
  CHECK(p.theta[0] == doctest::Approx(1.5707963267948966));
}

TEST_CASE("polar round trip on random states") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.1, 2.0);
  std::uniform_real_distribution<double> angle(-3.1, 3.1);
  std::uniform_real_distribution<double> times(0.0, 500.0);
  const Spectrum s = make_spectrum_dirichlet(2.0, 6);
  for (int trial = 0; trial < 200; ++trial) {
    PolarState p;
    p.s = std::log1p(times(rng));
    p.rho.resize(6);
    p.theta.resize(6);
    for (std::size_t k = 0; k < 6; ++k) {
      p.rho[k] = unif(rng);
      p.theta[k] = angle(rng);
    }
    const ModalState m = from_polar(p, s);
    const PolarState q = to_polar(m, s);
    for (std::size_t k = 0; k < 6; ++k) {
      CHECK(q.rho[k] == doctest::Approx(p.rho[k]).epsilon(1e-12));
      const double dtheta = std::remainder(q.theta[k] - p.theta[k], 2.0 * 3.14159265358979323846);
      CHECK(std::abs(dtheta) < 1e-11);
    }
  }
}

TEST_CASE("support uses exact-zero semantics") {
  const std::vector<double> u0{1.0, 0.0, 0.0};
  const std::vector<double> u1{0.0, 0.0, 2.0};
  const ModeSet j = support(u0, u1);
  CHECK(j.indices == std::vector<std::size_t>{0, 2});

  const std::vector<double> z(3, 0.0);
  CHECK(support(z, z).empty());

  const std::vector<double> tiny{0.0, 1e-300};
  const std::vector<double> zz{0.0, 0.0};
  const ModeSet d = support(tiny, zz);
  CHECK(d.indices == std::vector<std::size_t>{1});

  CHECK_THROWS_AS(support(u0, tiny), std::invalid_argument);
}
