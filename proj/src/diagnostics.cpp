#include "nldamp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nldamp/errors.hpp"
#include "nldamp/parallel.hpp"
#include "nldamp/util.hpp"

namespace nldamp {

namespace {
constexpr double kPi = 3.14159265358979323846;

void require_active(const Trajectory& traj, std::size_t k, const char* who) {
  if (!traj.active.contains(k))
    throw std::invalid_argument(std::string(who) + ": mode outside the active set");
}
}  // namespace

RescaledEnergySeries rescaled_energy_series(const Trajectory& traj) {
  RescaledEnergySeries out;
  out.series.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i)
    out.series.push_back({traj.samples[i].t, traj.diagnostics[i].rescaled_energy});
  if (!out.series.empty()) {
    const double t_last = out.series.back().t;
    out.trailing_min = std::numeric_limits<double>::infinity();
    out.trailing_max = -std::numeric_limits<double>::infinity();
    for (const SeriesPoint& p : out.series) {
      if (p.t >= t_last / 10.0) {
        out.trailing_min = std::min(out.trailing_min, p.value);
        out.trailing_max = std::max(out.trailing_max, p.value);
      }
    }
  }
  return out;
}

std::vector<SeriesPoint> quotient_series(const Trajectory& traj, std::size_t h, std::size_t k) {
  require_active(traj, h, "quotient_series");
  require_active(traj, k, "quotient_series");
  const std::vector<PolarState> polar = par::batch_polar(traj.samples, traj.spectrum);
  std::vector<SeriesPoint> out;
  out.reserve(polar.size());
  for (std::size_t i = 0; i < polar.size(); ++i)
    out.push_back({traj.samples[i].t, polar[i].rho[k] / polar[i].rho[h]});
  return out;
}

std::size_t pick_reference_mode(const Trajectory& traj, double t0) {
  if (traj.active.empty()) throw degenerate_input("pick_reference_mode: empty support");
  std::size_t i0 = 0;
  while (i0 + 1 < traj.size() && traj.samples[i0].t < t0) ++i0;
  const PolarState polar = to_polar(traj.samples[i0], traj.spectrum);
  std::size_t best = traj.active.indices.front();
  for (std::size_t k : traj.active.indices)
    if (polar.rho[k] > polar.rho[best]) best = k;
  return best;
}

std::vector<SeriesPoint> equipartition_index(const Trajectory& traj, const ModeSet& J,
                                             std::size_t offset) {
  if (J.empty()) throw std::invalid_argument("equipartition_index: empty mode set");
  for (std::size_t k : J.indices) require_active(traj, k, "equipartition_index");

  double slowest = std::numeric_limits<double>::infinity();
  for (std::size_t k : J.indices) slowest = std::min(slowest, traj.spectrum[k]);
  const double window = 2.0 * kPi / slowest;

  const std::size_t m = traj.size();
  std::vector<SeriesPoint> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t end = (i >= offset) ? i - offset : 0;
    const double t_hi = traj.samples[end].t;
    const double t_lo = t_hi - window;
    double ratio_max = 0.0, ratio_min = std::numeric_limits<double>::infinity();
    for (std::size_t k : J.indices) {
      double acc = 0.0;
      std::size_t cnt = 0;
      for (std::size_t j = end + 1; j-- > 0;) {
        if (traj.samples[j].t < t_lo) break;
        acc += (1.0 + traj.samples[j].t) * traj.diagnostics[j].modal[k];
        ++cnt;
      }
      const double avg = acc / static_cast<double>(cnt);
      ratio_max = std::max(ratio_max, avg);
      ratio_min = std::min(ratio_min, avg);
    }
    out.push_back({traj.samples[i].t, ratio_max / ratio_min});
  }
  return out;
}

PhaseDriftSeries phase_drift(const Trajectory& traj, std::size_t k, double t0) {
  require_active(traj, k, "phase_drift");
  if (traj.size() < 4) throw std::invalid_argument("phase_drift: trajectory too short");
  const double lambda = traj.spectrum[k];

  const std::vector<PolarState> polar = par::batch_polar(traj.samples, traj.spectrum);
  PhaseDriftSeries out;

  std::size_t first = 0;
  while (first + 1 < traj.size() && traj.samples[first].t < t0) ++first;

  // The raw polar phase advances by about -lambda dt between samples; after
  // removing the known linear part the remaining drift must move by less
  // than pi per sample for the unwrapping to be unambiguous.
  double drift = polar[first].theta[k] + lambda * traj.samples[first].t;
  out.drift.push_back({traj.samples[first].t, drift});
  for (std::size_t i = first + 1; i < traj.size(); ++i) {
    const double dt = traj.samples[i].t - traj.samples[i - 1].t;
    const double inc = wrap_angle(polar[i].theta[k] - polar[i - 1].theta[k] + lambda * dt);
    if (std::abs(inc) > 0.9 * kPi)
      throw needs_denser_sampling("phase_drift: drift step close to pi; sampling too coarse");
    drift += inc;
    out.drift.push_back({traj.samples[i].t, drift});
  }

  // Total variation over trailing dyadic windows [t_end/2^{m+1}, t_end/2^m].
  const double t_end = traj.samples.back().t;
  double hi = t_end, lo = t_end / 2.0;
  const double t_first = out.drift.front().t;
  while (hi > t_first && out.window_variation.size() < 40) {
    double var = 0.0;
    for (std::size_t i = 1; i < out.drift.size(); ++i) {
      const double t = out.drift[i].t;
      if (t > lo && t <= hi) var += std::abs(out.drift[i].value - out.drift[i - 1].value);
    }
    out.window_variation.push_back(var);
    hi = lo;
    lo /= 2.0;
    if (hi <= std::max(t0, 1e-12)) break;
  }

  std::vector<double> tail;
  for (const SeriesPoint& p : out.drift)
    if (p.t >= t_end / 2.0) tail.push_back(p.value);
  out.drift_estimate = median(std::move(tail));
  out.convergent = out.window_variation.size() >= 3 &&
                   out.window_variation[0] < out.window_variation[1] &&
                   out.window_variation[1] < out.window_variation[2];
  return out;
}

ProfileSpec make_profile(const ModeSet& J, const Spectrum& spec, std::span<const double> phases) {
  if (phases.size() != J.size())
    throw std::invalid_argument("make_profile: one phase per support mode required");
  ProfileSpec p;
  p.support = J;
  p.phases.assign(phases.begin(), phases.end());
  const double amp = 2.0 / std::sqrt(2.0 * static_cast<double>(J.size()) + 1.0);
  p.amplitudes.reserve(J.size());
  for (std::size_t k : J.indices) p.amplitudes.push_back(amp / spec[k]);
  return p;
}

ProfileSpec profile_from_trajectory(const Trajectory& traj, double t0) {
  if (traj.active.empty()) throw degenerate_input("profile_from_trajectory: empty support");
  std::vector<double> phases;
  phases.reserve(traj.active.size());
  for (std::size_t k : traj.active.indices) {
    const PhaseDriftSeries d = phase_drift(traj, k, t0);
    phases.push_back(wrap_angle(-d.drift_estimate));
  }
  return make_profile(traj.active, traj.spectrum, phases);
}

std::vector<SeriesPoint> profile_error(const Trajectory& traj, const ProfileSpec& profile) {
  if (!(profile.support == traj.active))
    throw std::invalid_argument("profile_error: profile support must match the trajectory");
  std::vector<SeriesPoint> out;
  out.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const ModalState& st = traj.samples[i];
    const double sq = std::sqrt(st.t);
    OrderedAccumulator acc;
    for (std::size_t j = 0; j < profile.support.size(); ++j) {
      const std::size_t k = profile.support.indices[j];
      const double lambda = traj.spectrum[k];
      const double arg = lambda * st.t + profile.phases[j];
      const double vel_amp = profile.amplitudes[j] * lambda;
      const double dv = sq * st.du[k] + vel_amp * std::sin(arg);
      const double du_ = sq * st.u[k] - profile.amplitudes[j] * std::cos(arg);
      acc.add(dv * dv);
      acc.add(du_ * du_);
    }
    out.push_back({st.t, acc.value()});
  }
  return out;
}

}  // namespace nldamp
