#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nldamp/spectrum.hpp"

namespace nldamp {

struct ModalState {
  double t = 0.0;
  std::vector<double> u;   // modal positions
  std::vector<double> du;  // modal velocities
};

// Rescaled/polar picture: s = log(1+t), v = sqrt(1+t) u,
// v_k = (rho_k / lambda_k) cos theta_k, v'_k = rho_k sin theta_k.
struct PolarState {
  double s = 0.0;
  std::vector<double> rho;    // amplitudes, >= 0
  std::vector<double> theta;  // phases (radians); 0 by convention where rho == 0
};

struct AveragedState {
  double s = 0.0;
  std::vector<double> rho;  // nonnegative amplitudes
};

// Set of active mode indices (0-based internally). A mode is active iff its
// initial data are not bit-exact zero; the solvers preserve exact zeros, so
// the set is a static property of a run.
struct ModeSet {
  std::vector<std::size_t> indices;  // sorted ascending

  bool contains(std::size_t k) const;
  std::size_t size() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
  bool operator==(const ModeSet&) const = default;
};

ModeSet support(std::span<const double> u0, std::span<const double> u1);

struct EnergyBreakdown {
  double total = 0.0;          // E = sum of modal energies, fixed ascending order
  std::vector<double> modal;   // e_k = du_k^2 + lambda_k^2 u_k^2
};

EnergyBreakdown classical_energy(const ModalState& state, const Spectrum& spec);

PolarState to_polar(const ModalState& state, const Spectrum& spec);
ModalState from_polar(const PolarState& polar, const Spectrum& spec);

}  // namespace nldamp
