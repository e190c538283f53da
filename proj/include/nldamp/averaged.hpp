#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nldamp/states.hpp"
#include "nldamp/trajectory.hpp"

namespace nldamp {

// The homogenized autonomous flow on nonnegative square-summable amplitudes:
//   rho_k' = rho_k (1/2 - rho_k^2/8 - (sum_i rho_i^2)/4),
// which is the gradient flow of functional_value below.

double functional_value(std::span<const double> rho);

std::vector<double> averaged_rhs(std::span<const double> rho);

// Componentwise exact negation of averaged_rhs (same arithmetic).
std::vector<double> functional_gradient(std::span<const double> rho);

struct StationaryProfile {
  ModeSet support;
  bool amplitude_defined = false;
  double amplitude = 0.0;  // 2 / sqrt(2j+1) on the support
  double energy = 0.0;     // 4j / (2j+1)
};

StationaryProfile stationary_profile(const ModeSet& J);

AveragedTrajectory integrate_averaged(const AveragedState& initial, double s_end, double tol,
                                      std::size_t sample_count = 601);

struct AveragedIdentityReport {
  double sup_residual_energy = 0.0;    // R' identity, sup over interior samples
  double sup_residual_quotient = 0.0;  // quotient identity, first two active modes
  bool quotient_checked = false;
  std::string quotient_notice;
  double trailing_min = 0.0;  // min/max of R over the trailing half of the run
  double trailing_max = 0.0;
};

AveragedIdentityReport verify_averaged_identities(const AveragedTrajectory& traj);

}  // namespace nldamp
