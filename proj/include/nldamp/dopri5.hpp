#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace nldamp {

struct StepControl {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  // 0 = choose automatically
};

enum class StepperStatus { ok, step_underflow, nan_detected };

// Dormand-Prince 5(4) embedded pair with the standard order-4 continuous
// extension. Requested sample times (ascending, inside [t0, t1]) are served
// from the dense output, so the step sequence is independent of sampling.
//
// project, when present, runs after every accepted step (used to pin
// exact-zero modes). stop, when present, is polled after accepted steps and
// ends the run early; remaining samples are emitted with the frozen state.
template <typename Rhs>
StepperStatus dopri5_integrate(
    Rhs&& f, double t0, double t1, std::vector<double>& y, const StepControl& ctl,
    std::span<const double> samples,
    const std::function<void(double, std::span<const double>)>& on_sample,
    const std::function<void(std::span<double>)>& project = {},
    const std::function<bool(double, std::span<const double>, std::span<const double>)>& stop = {}) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                          a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

  const std::size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);
  std::vector<double> r2(n), r3(n), r4(n), r5(n);

  std::size_t next_sample = 0;
  auto emit_at = [&](double ts, std::span<const double> ys) { on_sample(ts, ys); };
  while (next_sample < samples.size() && samples[next_sample] <= t0) {
    emit_at(samples[next_sample], y);
    ++next_sample;
  }
  if (t1 <= t0) return StepperStatus::ok;

  f(t0, y, k1);

  double h = ctl.initial_step;
  if (h <= 0.0) {
    double d0 = 0.0, d1n = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sc = ctl.abs_tol + ctl.rel_tol * std::abs(y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      d1n += (k1[i] / sc) * (k1[i] / sc);
    }
    d0 = std::sqrt(d0 / static_cast<double>(n));
    d1n = std::sqrt(d1n / static_cast<double>(n));
    h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
  }
  h = std::min({h, ctl.max_step, t1 - t0});

  double t = t0;
  bool rejected = false;
  auto frozen_tail = [&]() {
    while (next_sample < samples.size()) {
      emit_at(samples[next_sample], y);
      ++next_sample;
    }
  };

  while (t < t1) {
    if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0)) {
      return StepperStatus::step_underflow;
    }
    if (t + h > t1) h = t1 - t;

    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
    f(t + c2 * h, ytmp, k2);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    f(t + c3 * h, ytmp, k3);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(t + c4 * h, ytmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(t + c5 * h, ytmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    f(t + h, ytmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    f(t + h, ynew, k7);

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ei =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = ctl.abs_tol + ctl.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err += (ei / sc) * (ei / sc);
    }
    err = std::sqrt(err / static_cast<double>(n));
    if (!std::isfinite(err)) return StepperStatus::nan_detected;

    if (err > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      rejected = true;
      continue;
    }

    // Accepted: build the continuous extension, serve samples in (t, t+h].
    if (next_sample < samples.size() && samples[next_sample] <= t + h) {
      for (std::size_t i = 0; i < n; ++i) {
        const double ydiff = ynew[i] - y[i];
        const double bspl = h * k1[i] - ydiff;
        r2[i] = ydiff;
        r3[i] = bspl;
        r4[i] = ydiff - h * k7[i] - bspl;
        r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
      }
      while (next_sample < samples.size() && samples[next_sample] <= t + h) {
        const double ts = samples[next_sample];
        const double th = (ts - t) / h, th1 = 1.0 - th;
        for (std::size_t i = 0; i < n; ++i)
          ytmp[i] = y[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
        if (project) project(ytmp);
        emit_at(ts, ytmp);
        ++next_sample;
      }
    }

    t += h;
    y.swap(ynew);
    if (project) project(y);
    k1.swap(k7);  // FSAL

    if (stop && stop(t, y, k1)) {
      frozen_tail();
      return StepperStatus::ok;
    }

    double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
    fac = std::min(rejected ? 1.0 : 5.0, std::max(0.2, fac));
    rejected = false;
    h = std::min(h * fac, ctl.max_step);
  }
  // t1 reached; any samples numerically tied to t1 are served from the state.
  while (next_sample < samples.size() && samples[next_sample] <= t1) {
    emit_at(samples[next_sample], y);
    ++next_sample;
  }
  return StepperStatus::ok;
}

}  // namespace nldamp
