#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nldamp/trajectory.hpp"

namespace nldamp {

struct SeriesPoint {
  double t = 0.0;
  double value = 0.0;
};

struct RescaledEnergySeries {
  std::vector<SeriesPoint> series;  // (t, (1+t) E(t))
  double trailing_min = 0.0;        // over the last decade of t
  double trailing_max = 0.0;
};

RescaledEnergySeries rescaled_energy_series(const Trajectory& traj);

// rho_k / rho_h from the polar amplitudes; h, k must be active modes.
std::vector<SeriesPoint> quotient_series(const Trajectory& traj, std::size_t h, std::size_t k);

// Reference index with the largest amplitude at the first sample >= t0.
std::size_t pick_reference_mode(const Trajectory& traj, double t0);

// Ratio max/min over J of window-averaged modal rescaled energies; the
// window is one period of the slowest active mode ending `offset` samples
// before the reporting sample.
std::vector<SeriesPoint> equipartition_index(const Trajectory& traj, const ModeSet& J,
                                             std::size_t offset = 0);

struct PhaseDriftSeries {
  std::vector<SeriesPoint> drift;        // unwrapped phi_k(t) + lambda_k t
  std::vector<double> window_variation;  // dyadic trailing windows, latest first
  double drift_estimate = 0.0;           // median over the final dyadic window
  bool convergent = false;
};

PhaseDriftSeries phase_drift(const Trajectory& traj, std::size_t k, double t0);

// Limit profile: mode k carries amplitude 2/sqrt(2j+1)/lambda_k and phase
// phase_k, i.e. the position component tends to amplitude*cos(lambda_k t +
// phase_k). Solves the undamped linear equation by construction.
struct ProfileSpec {
  ModeSet support;
  std::vector<double> amplitudes;  // position amplitudes, one per support mode
  std::vector<double> phases;      // one per support mode
};

ProfileSpec make_profile(const ModeSet& J, const Spectrum& spec,
                         std::span<const double> phases);

// Phases estimated from the trajectory itself. The measured drift limit of
// phi_k + lambda_k t is the negative of the profile phase.
ProfileSpec profile_from_trajectory(const Trajectory& traj, double t0);

std::vector<SeriesPoint> profile_error(const Trajectory& traj, const ProfileSpec& profile);

}  // namespace nldamp
