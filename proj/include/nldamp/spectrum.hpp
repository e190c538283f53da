#pragma once

#include <cstddef>
#include <vector>

namespace nldamp {

// Eigenfrequencies lambda_1 <= lambda_2 <= ... of the diagonal elastic
// operator. Frequencies are 1-based in all reporting; storage is 0-based.
struct Spectrum {
  std::vector<double> lambdas;
  bool simple = true;   // strictly increasing
  double min_gap = 0.0; // inf of adjacent differences; +inf for a single mode

  std::size_t size() const { return lambdas.size(); }
  double operator[](std::size_t k) const { return lambdas[k]; }
  double max_frequency() const { return lambdas.back(); }
  double min_frequency() const { return lambdas.front(); }
};

// Explicit nondecreasing positive list (repeats allowed; simple=false then).
Spectrum make_spectrum(std::vector<double> lambdas);

// lambda_k = k*pi/length for k = 1..count. Uniform gap pi/length.
Spectrum make_spectrum_dirichlet(double length, std::size_t count);

// lambda_k = base + (k-1)*gap.
Spectrum make_spectrum_arithmetic(double base, double gap, std::size_t count);

// Pairs base + m*gap, base + m*gap + cluster_eps: uniform clusters whose
// internal gap cluster_eps can be made arbitrarily small.
Spectrum make_spectrum_clustered(double base, double gap, double cluster_eps,
                                 std::size_t count);

}  // namespace nldamp
