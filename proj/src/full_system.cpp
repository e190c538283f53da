#include "nldamp/full_system.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "nldamp/dopri5.hpp"
#include "nldamp/errors.hpp"
#include "nldamp/parallel.hpp"
#include "nldamp/util.hpp"

namespace nldamp {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_initial(const ModalState& initial, const Spectrum& spec) {
  if (initial.u.size() != spec.size() || initial.du.size() != spec.size())
    throw std::invalid_argument("integrate_full: state/spectrum length mismatch");
  for (std::size_t k = 0; k < spec.size(); ++k)
    if (!std::isfinite(initial.u[k]) || !std::isfinite(initial.du[k]))
      throw std::invalid_argument("integrate_full: initial data must be finite");
}

RunStatus to_run_status(StepperStatus s) {
  switch (s) {
    case StepperStatus::ok: return RunStatus::ok;
    case StepperStatus::step_underflow: return RunStatus::step_underflow;
    default: return RunStatus::nan_detected;
  }
}

Trajectory integrate_adaptive(const ModalState& initial, const Spectrum& spec,
                              const IntegratorConfig& cfg) {
  const std::size_t n = spec.size();
  Trajectory traj;
  traj.spectrum = spec;
  traj.config = cfg;
  traj.active = support(initial.u, initial.du);

  std::vector<bool> masked(n);
  for (std::size_t k = 0; k < n; ++k) masked[k] = !traj.active.contains(k);

  std::vector<double> y(2 * n);
  std::copy(initial.u.begin(), initial.u.end(), y.begin());
  std::copy(initial.du.begin(), initial.du.end(), y.begin() + static_cast<std::ptrdiff_t>(n));

  std::vector<double> vel(n);
  auto rhs = [&](double /*t*/, std::span<const double> state, std::span<double> dy) {
    for (std::size_t k = 0; k < n; ++k) {
      const double v = state[n + k];
      vel[k] = v * v;
    }
    const double damping = kahan_sum(vel);  // couples every mode
    for (std::size_t k = 0; k < n; ++k) {
      dy[k] = state[n + k];
      dy[n + k] = -damping * state[n + k] - spec[k] * spec[k] * state[k];
    }
  };
  auto project = std::function<void(std::span<double>)>([&](std::span<double> state) {
    for (std::size_t k = 0; k < n; ++k)
      if (masked[k]) {
        state[k] = 0.0;
        state[n + k] = 0.0;
      }
  });

  StepControl ctl;
  ctl.rel_tol = cfg.rel_tol;
  ctl.abs_tol = cfg.abs_tol;
  // Keep the controller inside the fastest oscillation period.
  ctl.max_step = std::min(cfg.max_step, kPi / spec.max_frequency());

  const std::vector<double> ts = sample_times(cfg);
  auto on_sample = std::function<void(double, std::span<const double>)>(
      [&](double t, std::span<const double> state) {
        ModalState m;
        m.t = t;
        m.u.assign(state.begin(), state.begin() + static_cast<std::ptrdiff_t>(n));
        m.du.assign(state.begin() + static_cast<std::ptrdiff_t>(n), state.end());
        traj.samples.push_back(std::move(m));
      });

  const StepperStatus st = dopri5_integrate(rhs, 0.0, cfg.t_end, y, ctl, ts, on_sample, project);
  traj.status = to_run_status(st);
  if (st == StepperStatus::step_underflow) traj.status_message = "step size underflow";
  if (st == StepperStatus::nan_detected) traj.status_message = "non-finite state detected";
  traj.diagnostics = par::batch_diagnostics(traj.samples, spec);
  return traj;
}

// Rotating-frame scheme: evolve a_k = e^{i lambda_k t} (lambda_k u_k + i u_k').
// Then a_k' = -(d(t)/2)(a_k - conj(a_k) e^{2 i lambda_k t}) with
// d = sum_i u_i'^2, and the oscillatory factors integrate exactly over a
// step once the amplitudes are frozen. A Heun pass over the frozen-amplitude
// integrals gives second order in the slow time scale, with steps
// proportional to (1+t) instead of the fastest period.
class RotatingFrame {
 public:
  RotatingFrame(const Spectrum& spec, const std::vector<bool>& masked)
      : spec_(spec), masked_(masked), n_(spec.size()) {}

  // Integral of e^{i w tau} over [t, t+h].
  static std::complex<double> phase_integral(double w, double t, double h) {
    if (w == 0.0) return {h, 0.0};
    const std::complex<double> iw(0.0, w);
    return std::exp(iw * t) * (std::exp(iw * h) - 1.0) / iw;
  }

  // Frozen-amplitude increment over [t, t+h].
  std::vector<std::complex<double>> increment(const std::vector<std::complex<double>>& a,
                                              double t, double h) const {
    std::vector<std::complex<double>> da(n_);
    double dbar = 0.0;
    for (std::size_t i = 0; i < n_; ++i) dbar += 0.5 * std::norm(a[i]);

    // d(tau) = dbar - (1/4) sum_i (a_i^2 e^{-2 i l_i tau} + conj)
    std::complex<double> int_d(h * dbar, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      if (a[i] == std::complex<double>(0.0, 0.0)) continue;
      const std::complex<double> phi = phase_integral(-2.0 * spec_[i], t, h);
      int_d -= 0.25 * (a[i] * a[i] * phi + std::conj(a[i] * a[i] * phi));
    }
    for (std::size_t k = 0; k < n_; ++k) {
      if (masked_[k]) continue;
      // int d(tau) e^{2 i l_k tau}
      std::complex<double> int_de = dbar * phase_integral(2.0 * spec_[k], t, h);
      for (std::size_t i = 0; i < n_; ++i) {
        if (a[i] == std::complex<double>(0.0, 0.0)) continue;
        int_de -= 0.25 * (a[i] * a[i] * phase_integral(2.0 * (spec_[k] - spec_[i]), t, h) +
                          std::conj(a[i] * a[i]) * phase_integral(2.0 * (spec_[k] + spec_[i]), t, h));
      }
      da[k] = -0.5 * (a[k] * int_d - std::conj(a[k]) * int_de);
    }
    return da;
  }

  void step(std::vector<std::complex<double>>& a, double t, double h) const {
    const std::vector<std::complex<double>> d1 = increment(a, t, h);
    std::vector<std::complex<double>> mid(n_);
    for (std::size_t k = 0; k < n_; ++k) mid[k] = a[k] + d1[k];
    const std::vector<std::complex<double>> d2 = increment(mid, t, h);
    for (std::size_t k = 0; k < n_; ++k) {
      a[k] += 0.5 * (d1[k] + d2[k]);
      if (masked_[k]) a[k] = 0.0;
    }
  }

 private:
  const Spectrum& spec_;
  const std::vector<bool>& masked_;
  std::size_t n_;
};

Trajectory integrate_rotating(const ModalState& initial, const Spectrum& spec,
                              const IntegratorConfig& cfg) {
  const std::size_t n = spec.size();
  Trajectory traj;
  traj.spectrum = spec;
  traj.config = cfg;
  traj.active = support(initial.u, initial.du);

  std::vector<bool> masked(n);
  for (std::size_t k = 0; k < n; ++k) masked[k] = !traj.active.contains(k);

  std::vector<std::complex<double>> a(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (masked[k]) continue;
    a[k] = std::complex<double>(spec[k] * initial.u[k], initial.du[k]);  // t = 0 phase is 1
  }

  auto record = [&](double t) {
    ModalState m;
    m.t = t;
    m.u.resize(n);
    m.du.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      if (masked[k]) {
        m.u[k] = 0.0;
        m.du[k] = 0.0;
        continue;
      }
      const std::complex<double> w = a[k] * std::exp(std::complex<double>(0.0, -spec[k] * t));
      m.u[k] = w.real() / spec[k];
      m.du[k] = w.imag();
    }
    traj.samples.push_back(std::move(m));
  };

  // Step fraction of the elapsed-time scale; the slow drift is O(1/(1+t)).
  const double eta = std::clamp(0.25 * std::pow(cfg.rel_tol, 0.25), 1e-4, 0.05);

  const std::vector<double> ts = sample_times(cfg);
  RotatingFrame frame(spec, masked);
  double t = 0.0;
  std::size_t next = 0;
  while (next < ts.size() && ts[next] <= 0.0) {
    record(0.0);
    ++next;
  }
  bool bad = false;
  while (t < cfg.t_end && !bad) {
    double h = std::min(eta * (1.0 + t), cfg.max_step);
    h = std::min(h, cfg.t_end - t);
    if (next < ts.size()) h = std::min(h, ts[next] - t);
    frame.step(a, t, h);
    t += h;
    for (std::size_t k = 0; k < n; ++k)
      if (!std::isfinite(a[k].real()) || !std::isfinite(a[k].imag())) bad = true;
    if (bad) break;
    while (next < ts.size() && ts[next] <= t) {
      record(ts[next]);
      ++next;
    }
  }
  if (bad) {
    traj.status = RunStatus::nan_detected;
    traj.status_message = "non-finite amplitude detected";
  }
  traj.diagnostics = par::batch_diagnostics(traj.samples, spec);
  return traj;
}

}  // namespace

Trajectory integrate_full(const ModalState& initial, const Spectrum& spec,
                          const IntegratorConfig& cfg) {
  cfg.validate();
  check_initial(initial, spec);
  return cfg.scheme == Scheme::rotating_frame ? integrate_rotating(initial, spec, cfg)
                                              : integrate_adaptive(initial, spec, cfg);
}

double verify_energy_identity(const Trajectory& traj) {
  if (traj.size() < 2) throw std::invalid_argument("verify_energy_identity: need >= 2 samples");
  const double e0 = traj.diagnostics.front().energy;
  if (e0 == 0.0) return 0.0;  // zero trajectory
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    const double dt = traj.samples[i + 1].t - traj.samples[i].t;
    if (dt <= 0.0) continue;
    const double de = traj.diagnostics[i + 1].energy - traj.diagnostics[i].energy;
    const double q0 = traj.diagnostics[i].velocity_sq;
    const double q1 = traj.diagnostics[i + 1].velocity_sq;
    const double resid = de / dt + 2.0 * 0.5 * (q0 * q0 + q1 * q1);
    worst = std::max(worst, std::abs(resid) / e0);
  }
  return worst;
}

DecayFit fit_decay(const Trajectory& traj) {
  if (traj.size() < 4) throw std::invalid_argument("fit_decay: need >= 4 samples");
  const double t_last = traj.samples.back().t;
  if (t_last < 100.0)
    throw std::invalid_argument("fit_decay: trajectory must span at least two decades");
  bool nontrivial = false;
  DecayFit fit;
  fit.m1 = std::numeric_limits<double>::infinity();
  fit.m2 = 0.0;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double e = traj.diagnostics[i].energy;
    if (e > 0.0) nontrivial = true;
    const double r = traj.diagnostics[i].rescaled_energy;
    fit.m1 = std::min(fit.m1, r);
    fit.m2 = std::max(fit.m2, r);
    if (traj.samples[i].t >= t_last / 10.0 && e > 0.0) {
      xs.push_back(std::log1p(traj.samples[i].t));
      ys.push_back(std::log(e));
    }
  }
  if (!nontrivial) throw degenerate_input("fit_decay: trajectory of the zero solution");
  if (xs.size() < 2) throw degenerate_input("fit_decay: too few positive-energy samples");
  fit.slope = linear_fit(xs, ys).first;
  return fit;
}

ReductionResidualReport verify_polar_reduction(const Trajectory& traj, const Spectrum& spec) {
  if (traj.active.empty()) throw degenerate_input("verify_polar_reduction: empty support");
  if (traj.size() < 8)
    throw std::invalid_argument("verify_polar_reduction: trajectory too short");
  if (spec.size() != traj.spectrum.size())
    throw std::invalid_argument("verify_polar_reduction: spectrum mismatch");

  const std::size_t m = traj.size();
  const std::vector<PolarState> polar = par::batch_polar(traj.samples, spec);

  // Per-sample slow coefficients from the v-picture.
  std::vector<double> g1(m), g2(m), svec(m);
  for (std::size_t i = 0; i < m; ++i) {
    const ModalState& st = traj.samples[i];
    const double tp1 = st.t + 1.0;
    const double sq = std::sqrt(tp1);
    OrderedAccumulator vv_acc, vpvp_acc, vvp_acc;
    for (std::size_t k = 0; k < spec.size(); ++k) {
      const double v = sq * st.u[k];
      const double vp = st.u[k] / (2.0 * sq) + sq * st.du[k];
      vv_acc.add(v * v);
      vpvp_acc.add(vp * vp);
      vvp_acc.add(v * vp);
    }
    const double vv = vv_acc.value(), vpvp = vpvp_acc.value(), vvp = vvp_acc.value();
    g1[i] = -0.75 / (tp1 * tp1) + 0.5 * vpvp / (tp1 * tp1) - 0.5 * vvp / (tp1 * tp1 * tp1) +
            0.125 * vv / (tp1 * tp1 * tp1 * tp1);
    g2[i] = vvp / (tp1 * tp1) - 0.25 * vv / (tp1 * tp1 * tp1);
    svec[i] = polar[i].s;
  }

  // Unwrapped phases per active mode.
  const std::size_t nact = traj.active.size();
  std::vector<std::vector<double>> theta(nact, std::vector<double>(m));
  for (std::size_t j = 0; j < nact; ++j) {
    const std::size_t k = traj.active.indices[j];
    theta[j][0] = polar[0].theta[k];
    for (std::size_t i = 1; i < m; ++i) {
      const double d = wrap_angle(polar[i].theta[k] - polar[i - 1].theta[k]);
      if (std::abs(d) > 0.95 * kPi)
        throw needs_denser_sampling("verify_polar_reduction: phase step near pi between samples");
      theta[j][i] = theta[j][i - 1] + d;
    }
  }

  ReductionResidualReport rep;
  rep.modes_checked = nact;
  rep.samples_used = m - 2;

  double m5 = 0.0, m6 = 0.0, m7 = 0.0;
  std::vector<double> env_t, env_v;  // |g1|+|g2| envelope over samples
  for (std::size_t i = 0; i < m; ++i) {
    const double tp1 = traj.samples[i].t + 1.0;
    const double g = std::abs(g1[i]) + std::abs(g2[i]);
    m5 = std::max(m5, g * tp1 * tp1);
    env_t.push_back(tp1);
    env_v.push_back(g);
  }

  for (std::size_t i = 1; i + 1 < m; ++i) {
    const double h1 = svec[i] - svec[i - 1];
    const double h2 = svec[i + 1] - svec[i];
    const double es = std::exp(svec[i]);
    // Damping sum in polar variables.
    OrderedAccumulator acc;
    for (std::size_t j = 0; j < nact; ++j) {
      const std::size_t k = traj.active.indices[j];
      const double sn = std::sin(theta[j][i]);
      acc.add(polar[i].rho[k] * polar[i].rho[k] * sn * sn);
    }
    const double coupling = acc.value() - 1.0;
    for (std::size_t j = 0; j < nact; ++j) {
      const std::size_t k = traj.active.indices[j];
      const double rho = polar[i].rho[k];
      const double sn = std::sin(theta[j][i]);
      const double cs = std::cos(theta[j][i]);
      const double gam = g1[i] * cs / spec[k] + g2[i] * sn;
      const double gamma1 = es * gam * sn;
      const double gamma2 = es * gam * cs;
      m6 = std::max(m6, std::abs(gam) * (traj.samples[i].t + 1.0) * (traj.samples[i].t + 1.0));
      m7 = std::max(m7, (std::abs(gamma1) + std::abs(gamma2)) * es);

      // Second-order nonuniform central differences.
      const double w0 = -h2 / (h1 * (h1 + h2));
      const double w1 = (h2 - h1) / (h1 * h2);
      const double w2 = h1 / (h2 * (h1 + h2));
      const double drho =
          w0 * polar[i - 1].rho[k] + w1 * polar[i].rho[k] + w2 * polar[i + 1].rho[k];
      const double dth = w0 * theta[j][i - 1] + w1 * theta[j][i] + w2 * theta[j][i + 1];

      const double rhs_rho = -coupling * rho * sn * sn + gamma1 * rho;
      const double rhs_th = -spec[k] * es - coupling * sn * cs + gamma2;
      rep.sup_residual_amplitude = std::max(rep.sup_residual_amplitude, std::abs(drho - rhs_rho));
      rep.sup_residual_phase = std::max(rep.sup_residual_phase, std::abs(dth - rhs_th));
    }
  }
  rep.m5 = m5;
  rep.m6 = m6;
  rep.m7 = m7;

  // Envelope decay over the last decade: bin maxima of |g1|+|g2| vs log(1+t).
  const double tp1_last = env_t.back();
  std::vector<double> bx, by;
  const double lo = std::log(tp1_last / 10.0), hi = std::log(tp1_last);
  constexpr int bins = 8;
  for (int b = 0; b < bins; ++b) {
    const double a0 = lo + (hi - lo) * b / bins, a1 = lo + (hi - lo) * (b + 1) / bins;
    double best = 0.0;
    for (std::size_t i = 0; i < env_t.size(); ++i) {
      const double x = std::log(env_t[i]);
      if (x >= a0 && x <= a1) best = std::max(best, env_v[i]);
    }
    if (best > 0.0) {
      bx.push_back(0.5 * (a0 + a1));
      by.push_back(std::log(best));
    }
  }
  rep.g_envelope_slope = (bx.size() >= 2) ? linear_fit(bx, by).first : 0.0;
  return rep;
}

}  // namespace nldamp
