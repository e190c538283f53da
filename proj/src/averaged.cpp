#include "nldamp/averaged.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "nldamp/dopri5.hpp"
#include "nldamp/errors.hpp"
#include "nldamp/util.hpp"

namespace nldamp {

double functional_value(std::span<const double> rho) {
  OrderedAccumulator s2, s4;
  for (double r : rho) {
    const double r2 = r * r;
    s2.add(r2);
    s4.add(r2 * r2);
  }
  const double a = s2.value();
  return -0.25 * a + 0.0625 * a * a + 0.03125 * s4.value();
}

std::vector<double> averaged_rhs(std::span<const double> rho) {
  OrderedAccumulator s2;
  for (double r : rho) s2.add(r * r);
  const double total = s2.value();
  std::vector<double> out(rho.size());
  for (std::size_t k = 0; k < rho.size(); ++k)
    out[k] = rho[k] * (0.5 - 0.125 * rho[k] * rho[k] - 0.25 * total);
  return out;
}

std::vector<double> functional_gradient(std::span<const double> rho) {
  std::vector<double> g = averaged_rhs(rho);
  for (double& x : g) x = -x;
  return g;
}

StationaryProfile stationary_profile(const ModeSet& J) {
  StationaryProfile p;
  p.support = J;
  const double j = static_cast<double>(J.size());
  if (!J.empty()) {
    p.amplitude_defined = true;
    p.amplitude = 2.0 / std::sqrt(2.0 * j + 1.0);
    p.energy = 4.0 * j / (2.0 * j + 1.0);
  }
  return p;
}

AveragedTrajectory integrate_averaged(const AveragedState& initial, double s_end, double tol,
                                      std::size_t sample_count) {
  if (!(s_end > 0.0)) throw std::invalid_argument("integrate_averaged: s_end must be positive");
  if (!(tol > 0.0) || tol > 1e-2)
    throw std::invalid_argument("integrate_averaged: tol must lie in (0, 1e-2]");
  if (sample_count < 2) throw std::invalid_argument("integrate_averaged: need >= 2 samples");
  for (double r : initial.rho)
    if (!(r >= 0.0) || !std::isfinite(r))
      throw std::invalid_argument("integrate_averaged: amplitudes must be finite and >= 0");

  const std::size_t n = initial.rho.size();
  AveragedTrajectory traj;
  traj.tol = tol;
  {
    const std::vector<double> zeros(n, 0.0);
    traj.active = support(initial.rho, zeros);
  }
  std::vector<bool> masked(n);
  for (std::size_t k = 0; k < n; ++k) masked[k] = !traj.active.contains(k);

  auto rhs = [&](double, std::span<const double> y, std::span<double> dy) {
    OrderedAccumulator s2;
    for (std::size_t k = 0; k < n; ++k) s2.add(y[k] * y[k]);
    const double total = s2.value();
    for (std::size_t k = 0; k < n; ++k)
      dy[k] = y[k] * (0.5 - 0.125 * y[k] * y[k] - 0.25 * total);
  };
  auto project = std::function<void(std::span<double>)>([&](std::span<double> y) {
    for (std::size_t k = 0; k < n; ++k)
      if (masked[k]) y[k] = 0.0;
  });

  // Stationary points are hyperbolic along the flow; once the vector field is
  // numerically zero for a while the state no longer moves.
  int quiet = 0;
  auto stop = std::function<bool(double, std::span<const double>, std::span<const double>)>(
      [&](double, std::span<const double>, std::span<const double> dy) {
        double norm = 0.0;
        for (double d : dy) norm = std::max(norm, std::abs(d));
        quiet = (norm < 1e-12) ? quiet + 1 : 0;
        return quiet >= 10;
      });

  std::vector<double> ts(sample_count);
  for (std::size_t i = 0; i < sample_count; ++i)
    ts[i] = s_end * static_cast<double>(i) / static_cast<double>(sample_count - 1);
  ts.back() = s_end;

  StepControl ctl;
  ctl.rel_tol = tol;
  ctl.abs_tol = 1e-14;

  std::vector<double> y = initial.rho;
  auto on_sample = std::function<void(double, std::span<const double>)>(
      [&](double s, std::span<const double> state) {
        traj.s.push_back(s);
        traj.rho.emplace_back(state.begin(), state.end());
        OrderedAccumulator s2;
        for (double r : state) s2.add(r * r);
        traj.total.push_back(s2.value());
        traj.functional.push_back(functional_value(state));
      });

  const StepperStatus st = dopri5_integrate(rhs, 0.0, s_end, y, ctl, ts, on_sample, project, stop);
  if (st == StepperStatus::nan_detected) {
    traj.status = RunStatus::nan_detected;
    traj.status_message = "non-finite state detected";
  } else if (st == StepperStatus::step_underflow) {
    traj.status = RunStatus::step_underflow;
    traj.status_message = "step size underflow";
  }
  for (std::size_t i = 0; i < traj.size() && traj.ok(); ++i)
    for (std::size_t k = 0; k < n; ++k)
      if (traj.rho[i][k] < 0.0) {
        traj.status = RunStatus::nan_detected;
        traj.status_message = "nonnegativity violated at sample " + std::to_string(i);
      }
  return traj;
}

AveragedIdentityReport verify_averaged_identities(const AveragedTrajectory& traj) {
  if (traj.size() < 8)
    throw std::invalid_argument("verify_averaged_identities: trajectory too short");
  AveragedIdentityReport rep;

  const std::size_t m = traj.size();
  for (std::size_t i = 1; i + 1 < m; ++i) {
    const double h1 = traj.s[i] - traj.s[i - 1];
    const double h2 = traj.s[i + 1] - traj.s[i];
    if (h1 <= 0.0 || h2 <= 0.0) continue;
    const double w0 = -h2 / (h1 * (h1 + h2));
    const double w1 = (h2 - h1) / (h1 * h2);
    const double w2 = h1 / (h2 * (h1 + h2));
    const double dR = w0 * traj.total[i - 1] + w1 * traj.total[i] + w2 * traj.total[i + 1];
    OrderedAccumulator s4;
    for (double r : traj.rho[i]) s4.add(r * r * r * r);
    const double R = traj.total[i];
    const double rhs = R - 0.5 * R * R - 0.25 * s4.value();
    rep.sup_residual_energy = std::max(rep.sup_residual_energy, std::abs(dR - rhs));
  }

  if (traj.active.size() >= 2) {
    rep.quotient_checked = true;
    const std::size_t h = traj.active.indices[0];
    const std::size_t k = traj.active.indices[1];
    for (std::size_t i = 1; i + 1 < m; ++i) {
      const double h1 = traj.s[i] - traj.s[i - 1];
      const double h2 = traj.s[i + 1] - traj.s[i];
      if (h1 <= 0.0 || h2 <= 0.0) continue;
      const double w0 = -h2 / (h1 * (h1 + h2));
      const double w1 = (h2 - h1) / (h1 * h2);
      const double w2 = h1 / (h2 * (h1 + h2));
      auto q = [&](std::size_t idx) { return traj.rho[idx][k] / traj.rho[idx][h]; };
      const double dQ = w0 * q(i - 1) + w1 * q(i) + w2 * q(i + 1);
      const double Q = q(i);
      const double rh = traj.rho[i][h];
      const double rhs = 0.125 * rh * rh * Q * (1.0 - Q * Q);
      rep.sup_residual_quotient = std::max(rep.sup_residual_quotient, std::abs(dQ - rhs));
    }
  } else {
    rep.quotient_notice = "single active mode: quotient check skipped";
  }

  rep.trailing_min = std::numeric_limits<double>::infinity();
  rep.trailing_max = 0.0;
  for (std::size_t i = m / 2; i < m; ++i) {
    rep.trailing_min = std::min(rep.trailing_min, traj.total[i]);
    rep.trailing_max = std::max(rep.trailing_max, traj.total[i]);
  }
  return rep;
}

}  // namespace nldamp
