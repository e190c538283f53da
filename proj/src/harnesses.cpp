#include "nldamp/harnesses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nldamp/dopri5.hpp"
#include "nldamp/oscillatory.hpp"

namespace nldamp {

namespace {

// Integrate a scalar ODE over [t0, t1], tracking the supremum of z on the
// way (accepted steps plus a few dense points per step).
struct ScalarRun {
  double final_value = 0.0;
  double sup = 0.0;
  bool ok = true;
};

template <typename F>
ScalarRun integrate_scalar(F&& f, double t0, double t1, double z0, double rel_tol) {
  std::vector<double> y{z0};
  StepControl ctl;
  ctl.rel_tol = rel_tol;
  ctl.abs_tol = 1e-13;
  ScalarRun run;
  run.sup = z0;
  auto rhs = [&](double t, std::span<const double> z, std::span<double> dz) { dz[0] = f(t, z[0]); };
  // Track the sup through sample callbacks on a modest uniform grid plus the
  // accepted end state.
  std::vector<double> probes;
  const int m = std::max(200, static_cast<int>((t1 - t0) * 8.0));
  probes.reserve(static_cast<std::size_t>(m) + 1);
  for (int i = 0; i <= m; ++i) probes.push_back(t0 + (t1 - t0) * i / m);
  auto on_sample = std::function<void(double, std::span<const double>)>(
      [&](double, std::span<const double> z) { run.sup = std::max(run.sup, z[0]); });
  const StepperStatus st = dopri5_integrate(rhs, t0, t1, y, ctl, probes, on_sample);
  run.ok = (st == StepperStatus::ok);
  run.final_value = y[0];
  run.sup = std::max(run.sup, y[0]);
  return run;
}

double eval_or_zero(const std::function<double(double)>& f, double t) { return f ? f(t) : 0.0; }

}  // namespace

PropRReport prop_r_harness(const PropRSpec& spec, double t_end, double rel_tol) {
  if (!(spec.z_infinity > 0.0))
    throw std::invalid_argument("prop_r_harness: z_infinity must be positive");
  if (!(t_end > 0.0)) throw std::invalid_argument("prop_r_harness: t_end must be positive");

  PropRReport rep;

  // Sampled hypothesis checks; violations flag the run but do not abort.
  if (!(spec.z0 > 0.0)) {
    rep.hypotheses_ok = false;
    rep.flags.push_back("initial value is not bounded away from zero");
  }
  if (spec.psi2) {
    double trailing = 0.0;
    for (int i = 0; i <= 64; ++i)
      trailing = std::max(trailing, std::abs(spec.psi2(t_end / 2.0 + (t_end / 2.0) * i / 64.0)));
    if (trailing > 1e-2) {
      rep.hypotheses_ok = false;
      rep.flags.push_back("psi2 does not appear to vanish at infinity");
    }
  }
  if (spec.psi1) {
    std::vector<double> grid;
    const double probe_end = std::min(t_end, 12.0);
    for (int i = 0; i < 8; ++i) grid.push_back(probe_end * 0.5 * i / 8.0);
    const ProbeReport probe = semi_integrability_probe(spec.psi1, grid, probe_end);
    if (probe.classification == EnvelopeClass::not_semi_integrable) {
      rep.hypotheses_ok = false;
      rep.flags.push_back("psi1 fails the semi-integrability probe");
    }
  }

  struct Schedule {
    std::string name;
    std::function<double(double)> xi;
    double period;  // 0 = constant
  };
  const std::vector<Schedule> schedules = {
      {"plus_one", [](double) { return 1.0; }, 0.0},
      {"minus_one", [](double) { return -1.0; }, 0.0},
      {"square_1", [](double t) { return std::fmod(t, 1.0) < 0.5 ? 1.0 : -1.0; }, 1.0},
      {"square_5", [](double t) { return std::fmod(t, 5.0) < 2.5 ? 1.0 : -1.0; }, 5.0},
  };

  rep.converged = true;
  double worst_dev = -1.0;
  for (const Schedule& sched : schedules) {
    auto rhs = [&](double t, double z) {
      return z - z * z / spec.z_infinity + eval_or_zero(spec.psi1, t) +
             sched.xi(t) * eval_or_zero(spec.psi2, t);
    };
    // Integrate piecewise between switch points so the discontinuous forcing
    // never sits inside a step.
    double z = spec.z0;
    double t = 0.0;
    const double seg = (sched.period > 0.0) ? sched.period / 2.0 : t_end;
    bool ok = true;
    while (t < t_end && ok) {
      const double t_next = std::min(t + seg, t_end);
      const ScalarRun run = integrate_scalar(rhs, t, t_next, z, rel_tol);
      ok = run.ok;
      z = run.final_value;
      t = t_next;
    }
    rep.schedules.push_back({sched.name, z});
    const double dev = std::abs(z - spec.z_infinity);
    if (!ok || dev >= 5e-3) rep.converged = false;
    if (dev > worst_dev) {
      worst_dev = dev;
      rep.final_value = z;
    }
  }
  return rep;
}

BernoulliReport bernoulli_harness(const BernoulliSpec& spec, double t_end, double rel_tol) {
  if (!spec.alpha) throw std::invalid_argument("bernoulli_harness: alpha is required");
  if (!(t_end > 0.0)) throw std::invalid_argument("bernoulli_harness: t_end must be positive");
  if (!(spec.z0 > 0.0)) throw std::invalid_argument("bernoulli_harness: z0 must be positive");

  BernoulliReport rep;

  // Sampled hypotheses.
  {
    const double fd = 1e-6;
    for (int i = 0; i <= 128; ++i) {
      const double t = t_end * i / 128.0;
      const double a = spec.alpha(t);
      if (!(a > 0.0)) {
        rep.hypotheses_ok = false;
        rep.flags.push_back("alpha is not positive everywhere");
        break;
      }
      const double da = (spec.alpha(t + fd) - spec.alpha(std::max(t - fd, 0.0))) /
                        (t < fd ? fd : 2.0 * fd);
      if (spec.L0 > 0.0 && std::abs(da) > spec.L0 * a * 1.05 + 1e-9) {
        rep.hypotheses_ok = false;
        rep.flags.push_back("|alpha'| exceeds L0 * alpha");
        break;
      }
    }
  }
  if (spec.L1 > 0.0) {
    for (int i = 0; i <= 128; ++i) {
      const double t = t_end * i / 128.0;
      const double worst = std::max({std::abs(spec.alpha(t)), std::abs(eval_or_zero(spec.beta, t)),
                                     std::abs(eval_or_zero(spec.gamma, t))});
      if (worst > spec.L1 * (1.0 + 1e-9)) {
        rep.hypotheses_ok = false;
        rep.flags.push_back("coefficient bound L1 violated");
        break;
      }
    }
  }

  auto rhs = [&](double t, double z) {
    const double a = spec.alpha(t);
    return a * z * (1.0 - z * z) + a * eval_or_zero(spec.beta, t) * z * z * z +
           eval_or_zero(spec.gamma, t) * z;
  };

  const ScalarRun full = integrate_scalar(rhs, 0.0, t_end, spec.z0, rel_tol);
  rep.final_value = full.final_value;
  if (!full.ok) rep.flags.push_back("full run did not finish cleanly");

  // Threshold: L2 (1 + 9 L1 + 32 L1^2 + 32 L1^3) e^{-t0} < log 2.
  const double c = spec.L2 * (1.0 + 9.0 * spec.L1 + 32.0 * spec.L1 * spec.L1 +
                              32.0 * spec.L1 * spec.L1 * spec.L1);
  rep.t0_threshold = (c > 0.0) ? std::max(0.0, std::log(c / std::log(2.0))) + 1e-9 : 0.0;

  if (rep.t0_threshold < t_end) {
    const ScalarRun capped = integrate_scalar(rhs, rep.t0_threshold, t_end, 1.0, rel_tol);
    rep.sup_after_t0 = capped.sup;
    if (!capped.ok) rep.flags.push_back("restarted run did not finish cleanly");
  } else {
    rep.sup_after_t0 = 1.0;
    rep.flags.push_back("t0 threshold beyond t_end; sup check vacuous");
  }
  return rep;
}

}  // namespace nldamp
