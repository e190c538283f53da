#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "nldamp/dopri5.hpp"

using namespace nldamp;

namespace {
std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}
}  // namespace

TEST_CASE("exponential decay against the closed form") {
  std::vector<double> y{1.0};
  StepControl ctl;
  ctl.rel_tol = 1e-10;
  ctl.abs_tol = 1e-14;
  auto rhs = [](double, std::span<const double> z, std::span<double> dz) { dz[0] = -z[0]; };
  double worst = 0.0;
  const std::vector<double> ts = linspace(0.0, 10.0, 101);
  auto on_sample = std::function<void(double, std::span<const double>)>(
      [&](double t, std::span<const double> z) {
        worst = std::max(worst, std::abs(z[0] - std::exp(-t)));
      });
  const StepperStatus st = dopri5_integrate(rhs, 0.0, 10.0, y, ctl, ts, on_sample);
  CHECK(st == StepperStatus::ok);
  CHECK(worst < 1e-9);
  CHECK(y[0] == doctest::Approx(std::exp(-10.0)).epsilon(1e-8));
}

TEST_CASE("harmonic oscillator dense output accuracy") {
  std::vector<double> y{1.0, 0.0};
  StepControl ctl;
  ctl.rel_tol = 1e-9;
  ctl.abs_tol = 1e-12;
  const double w = 3.0;
  auto rhs = [w](double, std::span<const double> z, std::span<double> dz) {
    dz[0] = z[1];
    dz[1] = -w * w * z[0];
  };
  double worst = 0.0;
  const std::vector<double> ts = linspace(0.0, 20.0, 777);
  auto on_sample = std::function<void(double, std::span<const double>)>(
      [&](double t, std::span<const double> z) {
        worst = std::max(worst, std::abs(z[0] - std::cos(w * t)));
      });
  const StepperStatus st = dopri5_integrate(rhs, 0.0, 20.0, y, ctl, ts, on_sample);
  CHECK(st == StepperStatus::ok);
  CHECK(worst < 1e-6);
}

TEST_CASE("logistic equation matches the closed form") {
  // z' = z - z^2/2, z(0) = 1 -> z(t) = 2 / (1 + e^{-t})
  std::vector<double> y{1.0};
  StepControl ctl;
  ctl.rel_tol = 1e-11;
  ctl.abs_tol = 1e-14;
  auto rhs = [](double, std::span<const double> z, std::span<double> dz) {
    dz[0] = z[0] - 0.5 * z[0] * z[0];
  };
  const std::vector<double> ts{40.0};
  auto on_sample =
      std::function<void(double, std::span<const double>)>([](double, std::span<const double>) {});
  dopri5_integrate(rhs, 0.0, 40.0, y, ctl, ts, on_sample);
  CHECK(std::abs(y[0] - 2.0 / (1.0 + std::exp(-40.0))) < 1e-8);
}

TEST_CASE("projection pins masked components") {
  std::vector<double> y{1.0, 0.0};
  StepControl ctl;
  ctl.rel_tol = 1e-8;
  ctl.abs_tol = 1e-12;
  auto rhs = [](double, std::span<const double> z, std::span<double> dz) {
    dz[0] = -z[0] + 1e-30;  // tiny leak into both components
    dz[1] = 1e-30;
  };
  auto project = std::function<void(std::span<double>)>([](std::span<double> z) { z[1] = 0.0; });
  const std::vector<double> ts = linspace(0.0, 5.0, 11);
  bool always_zero = true;
  auto on_sample = std::function<void(double, std::span<const double>)>(
      [&](double, std::span<const double> z) { always_zero = always_zero && z[1] == 0.0; });
  dopri5_integrate(rhs, 0.0, 5.0, y, ctl, ts, on_sample, project);
  CHECK(always_zero);
  CHECK(y[1] == 0.0);
}

TEST_CASE("NaN detection fails the run") {
  std::vector<double> y{1.0};
  StepControl ctl;
  auto rhs = [](double t, std::span<const double> z, std::span<double> dz) {
    dz[0] = (t > 0.5) ? std::numeric_limits<double>::quiet_NaN() : -z[0];
  };
  const std::vector<double> ts{1.0};
  auto on_sample =
      std::function<void(double, std::span<const double>)>([](double, std::span<const double>) {});
  const StepperStatus st = dopri5_integrate(rhs, 0.0, 1.0, y, ctl, ts, on_sample);
  CHECK(st == StepperStatus::nan_detected);
}

TEST_CASE("step underflow is reported") {
  std::vector<double> y{1.0};
  StepControl ctl;
  ctl.rel_tol = 1e-10;
  ctl.abs_tol = 1e-14;
  // Derivative blows up in finite time: z' = z^2, singular at t = 1.
  auto rhs = [](double, std::span<const double> z, std::span<double> dz) { dz[0] = z[0] * z[0]; };
  const std::vector<double> ts{2.0};
  auto on_sample =
      std::function<void(double, std::span<const double>)>([](double, std::span<const double>) {});
  const StepperStatus st = dopri5_integrate(rhs, 0.0, 2.0, y, ctl, ts, on_sample);
  CHECK(st != StepperStatus::ok);
}

TEST_CASE("early stop freezes the remaining samples") {
  std::vector<double> y{1.0};
  StepControl ctl;
  ctl.rel_tol = 1e-10;
  ctl.abs_tol = 1e-14;
  auto rhs = [](double, std::span<const double> z, std::span<double> dz) { dz[0] = -z[0]; };
  int quiet = 0;
  auto stop = std::function<bool(double, std::span<const double>, std::span<const double>)>(
      [&](double, std::span<const double>, std::span<const double> dz) {
        quiet = (std::abs(dz[0]) < 1e-12) ? quiet + 1 : 0;
        return quiet >= 10;
      });
  std::vector<double> seen;
  const std::vector<double> ts = linspace(0.0, 100.0, 21);
  auto on_sample = std::function<void(double, std::span<const double>)>(
      [&](double, std::span<const double> z) { seen.push_back(z[0]); });
  const StepperStatus st = dopri5_integrate(rhs, 0.0, 100.0, y, ctl, ts, on_sample, {}, stop);
  CHECK(st == StepperStatus::ok);
  CHECK(seen.size() == 21);           // tail filled after the early stop
  CHECK(seen.back() == seen[20 - 1]); // frozen value repeated
}
