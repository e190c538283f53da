#include "nldamp/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "nldamp/averaged.hpp"
#include "nldamp/diagnostics.hpp"
#include "nldamp/errors.hpp"
#include "nldamp/full_system.hpp"

namespace nldamp {

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

double arg_d(const CriterionCheck& c, std::size_t i) {
  if (i >= c.args.size())
    throw std::invalid_argument("criterion " + c.name + ": missing argument");
  return std::stod(c.args[i]);
}

std::size_t arg_mode(const CriterionCheck& c, std::size_t i) {
  const double v = arg_d(c, i);
  if (v < 1.0) throw std::invalid_argument("criterion " + c.name + ": modes are 1-based");
  return static_cast<std::size_t>(v) - 1;
}

std::string band_detail(double value, double lo, double hi) {
  std::ostringstream ss;
  ss << value << " vs [" << lo << ", " << hi << "]";
  return ss.str();
}

CriterionResult eval_simulate_check(const CriterionCheck& chk, const Trajectory& traj,
                                    const ScenarioConfig& cfg) {
  CriterionResult res{chk.name, false, ""};
  const RescaledEnergySeries re = rescaled_energy_series(traj);
  if (chk.name == "trailing_tE_band") {
    const double lo = arg_d(chk, 0), hi = arg_d(chk, 1);
    res.pass = re.trailing_min >= lo && re.trailing_max <= hi;
    res.detail = "band [" + format_shortest(re.trailing_min) + ", " +
                 format_shortest(re.trailing_max) + "] vs [" + format_shortest(lo) + ", " +
                 format_shortest(hi) + "]";
  } else if (chk.name == "slope_band") {
    const DecayFit fit = fit_decay(traj);
    const double lo = arg_d(chk, 0), hi = arg_d(chk, 1);
    res.pass = fit.slope >= lo && fit.slope <= hi;
    res.detail = band_detail(fit.slope, lo, hi);
  } else if (chk.name == "m1_positive") {
    const DecayFit fit = fit_decay(traj);
    res.pass = fit.m1 > 0.0;
    res.detail = "M1 = " + format_shortest(fit.m1);
  } else if (chk.name == "energy_identity_max") {
    const double hi = arg_d(chk, 0);
    const double r = verify_energy_identity(traj);
    res.pass = r < hi;
    res.detail = band_detail(r, 0.0, hi);
  } else if (chk.name == "equipartition_trailing_max") {
    const double hi = arg_d(chk, 0);
    const std::vector<SeriesPoint> idx = equipartition_index(traj, traj.active);
    double worst = 0.0;
    const double t_last = traj.samples.back().t;
    for (const SeriesPoint& p : idx)
      if (p.t >= t_last / 10.0) worst = std::max(worst, p.value);
    res.pass = worst <= hi;
    res.detail = band_detail(worst, 1.0, hi);
  } else if (chk.name == "equipartition_trailing_min") {
    const double lo = arg_d(chk, 0);
    const std::vector<SeriesPoint> idx = equipartition_index(traj, traj.active);
    double least = std::numeric_limits<double>::infinity();
    const double t_last = traj.samples.back().t;
    for (const SeriesPoint& p : idx)
      if (p.t >= t_last / 10.0) least = std::min(least, p.value);
    res.pass = least >= lo;
    res.detail = "trailing min " + format_shortest(least) + " vs >= " + format_shortest(lo);
  } else if (chk.name == "quotient_trailing_band") {
    const std::size_t h = arg_mode(chk, 0), k = arg_mode(chk, 1);
    const double lo = arg_d(chk, 2), hi = arg_d(chk, 3);
    const std::vector<SeriesPoint> q = quotient_series(traj, h, k);
    double qmin = std::numeric_limits<double>::infinity(), qmax = 0.0;
    const double t_last = traj.samples.back().t;
    for (const SeriesPoint& p : q)
      if (p.t >= t_last / 10.0) {
        qmin = std::min(qmin, p.value);
        qmax = std::max(qmax, p.value);
      }
    res.pass = qmin >= lo && qmax <= hi;
    res.detail = "band [" + format_shortest(qmin) + ", " + format_shortest(qmax) + "] vs [" +
                 format_shortest(lo) + ", " + format_shortest(hi) + "]";
  } else if (chk.name == "drift_variation_max") {
    const std::size_t k = arg_mode(chk, 0);
    const double hi = arg_d(chk, 1);
    const PhaseDriftSeries d = phase_drift(traj, k, 0.0);
    const double var = d.window_variation.empty() ? 0.0 : d.window_variation.front();
    res.pass = var < hi;
    res.detail = band_detail(var, 0.0, hi);
  } else if (chk.name == "profile_error_trailing_max") {
    const double hi = arg_d(chk, 0);
    const ProfileSpec prof = profile_from_trajectory(traj, 0.0);
    const std::vector<SeriesPoint> err = profile_error(traj, prof);
    double worst = 0.0;
    const double t_last = traj.samples.back().t;
    for (const SeriesPoint& p : err)
      if (p.t >= t_last / 10.0) worst = std::max(worst, p.value);
    res.pass = worst < hi;
    res.detail = band_detail(worst, 0.0, hi);
  } else if (chk.name == "proportional_deviation_max") {
    const double hi = arg_d(chk, 0);
    if (traj.spectrum.size() != 2)
      throw std::invalid_argument("proportional_deviation_max needs a two-mode run");
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
      const ModalState& st = traj.samples[i];
      const double du = st.u[1] - cfg.ratio * st.u[0];
      const double dv = st.du[1] - cfg.ratio * st.du[0];
      const double scale = std::sqrt(st.u[0] * st.u[0] + st.du[0] * st.du[0]);
      if (scale > 0.0) worst = std::max(worst, std::sqrt(du * du + dv * dv) / scale);
    }
    res.pass = worst < hi;
    res.detail = band_detail(worst, 0.0, hi);
  } else if (chk.name == "modal_trailing_below") {
    const double frac = arg_d(chk, 0);
    double init_max = 0.0;
    for (double e : traj.diagnostics.front().modal) init_max = std::max(init_max, e);
    init_max *= (1.0 + traj.samples.front().t);
    double worst = 0.0;
    const double t_last = traj.samples.back().t;
    for (std::size_t i = 0; i < traj.size(); ++i)
      if (traj.samples[i].t >= t_last / 10.0)
        for (double e : traj.diagnostics[i].modal)
          worst = std::max(worst, (1.0 + traj.samples[i].t) * e);
    res.pass = worst < frac * init_max;
    res.detail = "trailing modal max " + format_shortest(worst) + " vs " +
                 format_shortest(frac * init_max);
  } else if (chk.name == "reduction_residual_max") {
    const double hi_amp = arg_d(chk, 0), hi_phase = arg_d(chk, 1);
    const ReductionResidualReport rep = verify_polar_reduction(traj, traj.spectrum);
    res.pass = rep.sup_residual_amplitude < hi_amp && rep.sup_residual_phase < hi_phase;
    res.detail = "amplitude " + format_shortest(rep.sup_residual_amplitude) + ", phase " +
                 format_shortest(rep.sup_residual_phase);
  } else if (chk.name == "g_envelope_slope_max") {
    const double hi = arg_d(chk, 0);
    const ReductionResidualReport rep = verify_polar_reduction(traj, traj.spectrum);
    res.pass = rep.g_envelope_slope <= hi;
    res.detail = "slope " + format_shortest(rep.g_envelope_slope) + " vs <= " +
                 format_shortest(hi);
  } else if (chk.name == "monotone_energy") {
    bool ok = true;
    for (std::size_t i = 0; i + 1 < traj.size(); ++i)
      if (traj.diagnostics[i + 1].energy >
          traj.diagnostics[i].energy * (1.0 + 10.0 * cfg.integrator.rel_tol))
        ok = false;
    res.pass = ok;
    res.detail = ok ? "nonincreasing" : "energy increased beyond tolerance slack";
  } else {
    throw std::invalid_argument("unknown simulate criterion '" + chk.name + "'");
  }
  return res;
}

CriterionResult eval_average_check(const CriterionCheck& chk, const AveragedTrajectory& traj,
                                   const ScenarioConfig& cfg) {
  CriterionResult res{chk.name, false, ""};
  if (chk.name == "final_component") {
    const std::size_t k = arg_mode(chk, 0);
    const double target = arg_d(chk, 1), tol = arg_d(chk, 2);
    const double v = traj.rho.back().at(k);
    res.pass = std::abs(v - target) < tol;
    res.detail = format_shortest(v) + " vs " + format_shortest(target) + " +- " +
                 format_shortest(tol);
  } else if (chk.name == "final_R") {
    const double target = arg_d(chk, 0), tol = arg_d(chk, 1);
    res.pass = std::abs(traj.total.back() - target) < tol;
    res.detail = format_shortest(traj.total.back()) + " vs " + format_shortest(target) +
                 " +- " + format_shortest(tol);
  } else if (chk.name == "final_R_band") {
    const double lo = arg_d(chk, 0), hi = arg_d(chk, 1);
    res.pass = traj.total.back() >= lo && traj.total.back() <= hi;
    res.detail = band_detail(traj.total.back(), lo, hi);
  } else if (chk.name == "max_final_amplitude") {
    const double hi = arg_d(chk, 0);
    double mx = 0.0;
    for (double r : traj.rho.back()) mx = std::max(mx, r);
    res.pass = mx < hi;
    res.detail = band_detail(mx, 0.0, hi);
  } else if (chk.name == "functional_nonincreasing") {
    bool ok = true;
    const double slack = 10.0 * cfg.avg_tol;
    for (std::size_t i = 0; i + 1 < traj.size(); ++i)
      if (traj.functional[i + 1] > traj.functional[i] + slack) ok = false;
    res.pass = ok;
    res.detail = ok ? "nonincreasing" : "functional increased beyond slack";
  } else {
    throw std::invalid_argument("unknown average criterion '" + chk.name + "'");
  }
  return res;
}

}  // namespace

ModalState build_initial_state(const ScenarioConfig& cfg, const Spectrum& spec) {
  const std::size_t n = spec.size();
  ModalState st;
  st.t = 0.0;
  st.u.assign(n, 0.0);
  st.du.assign(n, 0.0);
  switch (cfg.family) {
    case InitialFamily::finite_modes: {
      if (cfg.modes.size() != cfg.amplitudes.size())
        throw std::invalid_argument("initial data: one amplitude per mode required");
      for (std::size_t i = 0; i < cfg.modes.size(); ++i) {
        if (cfg.modes[i] < 1 || cfg.modes[i] > n)
          throw std::invalid_argument("initial data: mode number out of range");
        const std::size_t k = cfg.modes[i] - 1;
        st.u[k] = cfg.amplitudes[i] / spec[k];
        st.du[k] = -st.u[k] / 2.0;  // zero initial polar phase
      }
      break;
    }
    case InitialFamily::powerlaw_tail: {
      for (std::size_t k = 0; k < n; ++k) {
        const double amp = cfg.c * std::pow(static_cast<double>(k + 2), -cfg.p);
        st.u[k] = amp / spec[k];
        st.du[k] = -st.u[k] / 2.0;
      }
      break;
    }
    case InitialFamily::proportional_pair: {
      if (n != 2) throw std::invalid_argument("proportional_pair needs exactly two modes");
      st.u[0] = cfg.c / spec[0];
      st.du[0] = -st.u[0] / 2.0;
      st.u[1] = cfg.ratio * st.u[0];
      st.du[1] = cfg.ratio * st.du[0];
      break;
    }
  }
  return st;
}

AveragedState build_initial_averaged(const ScenarioConfig& cfg, const Spectrum& spec) {
  const std::size_t n = spec.size();
  AveragedState st;
  st.rho.assign(n, 0.0);
  switch (cfg.family) {
    case InitialFamily::finite_modes: {
      if (cfg.modes.size() != cfg.amplitudes.size())
        throw std::invalid_argument("initial data: one amplitude per mode required");
      for (std::size_t i = 0; i < cfg.modes.size(); ++i) {
        if (cfg.modes[i] < 1 || cfg.modes[i] > n)
          throw std::invalid_argument("initial data: mode number out of range");
        st.rho[cfg.modes[i] - 1] = cfg.amplitudes[i];
      }
      break;
    }
    case InitialFamily::powerlaw_tail: {
      for (std::size_t k = 0; k < n; ++k)
        st.rho[k] = cfg.c * std::pow(static_cast<double>(k + 2), -cfg.p);
      break;
    }
    case InitialFamily::proportional_pair:
      throw std::invalid_argument("proportional_pair is a full-system family");
  }
  return st;
}

RunManifest run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir) {
  RunManifest manifest;
  manifest.scenario_id = cfg.id;
  manifest.code_version = kCodeVersion;
  manifest.config_echo = serialize_config(cfg);
  manifest.started = utc_now();

  // Fail on an unwritable output directory before any computation.
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw io_failure("cannot create output directory " + out_dir.string());
  {
    const std::filesystem::path probe = out_dir / ".write_probe";
    std::ofstream f(probe);
    if (!f) throw io_failure("output directory not writable: " + out_dir.string());
    f.close();
    std::filesystem::remove(probe, ec);
  }

  const Spectrum spec = build_spectrum(cfg);
  try {
    if (cfg.kind == ScenarioKind::simulate) {
      const ModalState initial = build_initial_state(cfg, spec);
      Trajectory traj = integrate_full(initial, spec, cfg.integrator);
      traj.scenario_id = cfg.id;
      if (!traj.ok()) {
        manifest.status = "failed";
        manifest.criteria.push_back({"run", false, traj.status_message});
      }
      for (const CriterionCheck& chk : cfg.criteria) {
        if (!traj.ok()) break;
        manifest.criteria.push_back(eval_simulate_check(chk, traj, cfg));
      }
      if (!traj.samples.empty())
        manifest.files = emit_outputs(traj, out_dir, cfg.polar_columns, manifest.criteria);
    } else {
      const AveragedState initial = build_initial_averaged(cfg, spec);
      AveragedTrajectory traj =
          integrate_averaged(initial, cfg.s_end, cfg.avg_tol, cfg.integrator.sample_count);
      traj.scenario_id = cfg.id;
      if (!traj.ok()) {
        manifest.status = "failed";
        manifest.criteria.push_back({"run", false, traj.status_message});
      }
      for (const CriterionCheck& chk : cfg.criteria) {
        if (!traj.ok()) break;
        manifest.criteria.push_back(eval_average_check(chk, traj, cfg));
      }
      if (!traj.s.empty()) manifest.files = emit_outputs(traj, out_dir, manifest.criteria);
    }
  } catch (const std::exception& e) {
    manifest.status = "error";
    manifest.criteria.push_back({"run", false, e.what()});
  }
  if (manifest.status == "ok") {
    for (const CriterionResult& c : manifest.criteria)
      if (!c.pass) manifest.status = "failed";
  }
  manifest.finished = utc_now();
  write_manifest(manifest, out_dir);
  return manifest;
}

}  // namespace nldamp
