#include "nldamp/states.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nldamp/util.hpp"

namespace nldamp {

bool ModeSet::contains(std::size_t k) const {
  return std::binary_search(indices.begin(), indices.end(), k);
}

ModeSet support(std::span<const double> u0, std::span<const double> u1) {
  if (u0.size() != u1.size()) throw std::invalid_argument("support: length mismatch");
  ModeSet set;
  for (std::size_t k = 0; k < u0.size(); ++k) {
    // Exact-zero rule: denormals count as active, only bit-exact zero is out.
    if (u0[k] != 0.0 || u1[k] != 0.0) set.indices.push_back(k);
  }
  return set;
}

EnergyBreakdown classical_energy(const ModalState& state, const Spectrum& spec) {
  if (state.u.size() != spec.size() || state.du.size() != spec.size())
    throw std::invalid_argument("classical_energy: state/spectrum length mismatch");
  EnergyBreakdown out;
  out.modal.resize(spec.size());
  OrderedAccumulator acc;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double lu = spec[k] * state.u[k];
    out.modal[k] = state.du[k] * state.du[k] + lu * lu;
    acc.add(out.modal[k]);
  }
  out.total = acc.value();
  return out;
}

PolarState to_polar(const ModalState& state, const Spectrum& spec) {
  if (state.u.size() != spec.size() || state.du.size() != spec.size())
    throw std::invalid_argument("to_polar: state/spectrum length mismatch");
  PolarState p;
  p.s = std::log1p(state.t);
  p.rho.resize(spec.size());
  p.theta.resize(spec.size());
  const double sq = std::sqrt(state.t + 1.0);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double v = sq * state.u[k];
    const double vp = state.u[k] / (2.0 * sq) + sq * state.du[k];
    const double lv = spec[k] * v;
    const double r = std::sqrt(lv * lv + vp * vp);
    p.rho[k] = r;
    p.theta[k] = (r > 0.0) ? std::atan2(vp, lv) : 0.0;
  }
  return p;
}

ModalState from_polar(const PolarState& polar, const Spectrum& spec) {
  if (polar.rho.size() != spec.size() || polar.theta.size() != spec.size())
    throw std::invalid_argument("from_polar: state/spectrum length mismatch");
  ModalState m;
  m.t = std::expm1(polar.s);
  m.u.resize(spec.size());
  m.du.resize(spec.size());
  const double tp1 = m.t + 1.0;
  const double sq = std::sqrt(tp1);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double v = polar.rho[k] * std::cos(polar.theta[k]) / spec[k];
    const double vp = polar.rho[k] * std::sin(polar.theta[k]);
    m.u[k] = v / sq;
    m.du[k] = vp / sq - v / (2.0 * tp1 * sq);
  }
  return m;
}

}  // namespace nldamp
