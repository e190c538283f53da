#include "nldamp/spectrum.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace nldamp {

namespace {

Spectrum finalize(std::vector<double> lambdas) {
  if (lambdas.empty()) throw std::invalid_argument("spectrum: count must be >= 1");
  Spectrum s;
  s.simple = true;
  s.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (!(lambdas[k] > 0.0) || !std::isfinite(lambdas[k]))
      throw std::invalid_argument("spectrum: frequencies must be positive and finite");
    if (k > 0) {
      const double d = lambdas[k] - lambdas[k - 1];
      if (d < 0.0) throw std::invalid_argument("spectrum: frequencies must be nondecreasing");
      if (d == 0.0) s.simple = false;
      if (d < s.min_gap) s.min_gap = d;
    }
  }
  s.lambdas = std::move(lambdas);
  return s;
}

}  // namespace

Spectrum make_spectrum(std::vector<double> lambdas) { return finalize(std::move(lambdas)); }

Spectrum make_spectrum_dirichlet(double length, std::size_t count) {
  if (!(length > 0.0)) throw std::invalid_argument("dirichlet spectrum: length must be positive");
  constexpr double pi = 3.14159265358979323846;
  std::vector<double> l(count);
  for (std::size_t k = 0; k < count; ++k) l[k] = static_cast<double>(k + 1) * pi / length;
  return finalize(std::move(l));
}

Spectrum make_spectrum_arithmetic(double base, double gap, std::size_t count) {
  if (!(base > 0.0) || !(gap > 0.0))
    throw std::invalid_argument("arithmetic spectrum: base and gap must be positive");
  std::vector<double> l(count);
  for (std::size_t k = 0; k < count; ++k) l[k] = base + static_cast<double>(k) * gap;
  return finalize(std::move(l));
}

Spectrum make_spectrum_clustered(double base, double gap, double cluster_eps,
                                 std::size_t count) {
  if (!(base > 0.0) || !(gap > 0.0) || !(cluster_eps > 0.0))
    throw std::invalid_argument("clustered spectrum: parameters must be positive");
  if (!(cluster_eps < gap))
    throw std::invalid_argument("clustered spectrum: cluster_eps must be below gap");
  std::vector<double> l(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double cluster = static_cast<double>(k / 2);
    l[k] = base + cluster * gap + ((k % 2 == 1) ? cluster_eps : 0.0);
  }
  return finalize(std::move(l));
}

}  // namespace nldamp
