#pragma once

#include <cstddef>

#include "nldamp/trajectory.hpp"

namespace nldamp {

// Long-horizon integration of u_k'' + (sum_i u_i'^2) u_k' + lambda_k^2 u_k = 0.
// Modes with bit-exact zero initial data stay bit-exact zero for the whole
// run. On step underflow or NaN the partial trajectory is returned with the
// failure recorded in status.
Trajectory integrate_full(const ModalState& initial, const Spectrum& spec,
                          const IntegratorConfig& cfg);

// Max over adjacent sample pairs of |dE/dt + 2 * mean(|u'|^4)|, normalized by
// E(0). Zero for the zero trajectory.
double verify_energy_identity(const Trajectory& traj);

struct DecayFit {
  double m1 = 0.0;     // min over samples of (1+t) E(t)
  double m2 = 0.0;     // max over samples of (1+t) E(t)
  double slope = 0.0;  // LS slope of log E vs log(1+t) over the last decade
};

// Requires a nontrivial trajectory spanning at least two decades of t.
DecayFit fit_decay(const Trajectory& traj);

struct ReductionResidualReport {
  double sup_residual_amplitude = 0.0;  // amplitude equation, sup over active modes/samples
  double sup_residual_phase = 0.0;      // phase equation
  double m5 = 0.0;                      // max (|g1|+|g2|) (1+t)^2
  double m6 = 0.0;                      // max_k |gamma_k| (1+t)^2
  double m7 = 0.0;                      // max_k (|G_1k|+|G_2k|) e^s
  double g_envelope_slope = 0.0;        // log-log slope of the |g1|+|g2| envelope, last decade
  std::size_t modes_checked = 0;
  std::size_t samples_used = 0;
};

// Converts samples to polar variables, finite-differences rho' and theta'
// on the sample grid and compares them against the closed-form right sides
// of the reduced first-order system, including the slow coefficient
// functions g1, g2, gamma_k and their exponential-scale counterparts.
ReductionResidualReport verify_polar_reduction(const Trajectory& traj, const Spectrum& spec);

}  // namespace nldamp
