#include "nldamp/parallel.hpp"

#include <algorithm>
#include <stdexcept>

#include "nldamp/util.hpp"

#ifdef NLDAMP_HAS_OPENMP
#include <omp.h>
#endif

namespace nldamp::par {

namespace {
int g_threads = 0;  // 0 = runtime default

SampleDiagnostics diagnostics_of(const ModalState& state, const Spectrum& spec) {
  SampleDiagnostics d;
  EnergyBreakdown e = classical_energy(state, spec);
  d.energy = e.total;
  d.rescaled_energy = (1.0 + state.t) * e.total;
  d.modal = std::move(e.modal);
  OrderedAccumulator v2;
  for (double x : state.du) v2.add(x * x);
  d.velocity_sq = v2.value();
  return d;
}
}  // namespace

bool openmp_enabled() {
#ifdef NLDAMP_HAS_OPENMP
  return true;
#else
  return false;
#endif
}

int max_threads() {
#ifdef NLDAMP_HAS_OPENMP
  return g_threads > 0 ? g_threads : omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) { g_threads = n; }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
#ifdef NLDAMP_HAS_OPENMP
  const int nt = max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
  for (long long i = 0; i < static_cast<long long>(n); ++i) body(static_cast<std::size_t>(i));
#else
  for (std::size_t i = 0; i < n; ++i) body(i);
#endif
}

std::vector<SampleDiagnostics> batch_diagnostics_serial(std::span<const ModalState> states,
                                                        const Spectrum& spec) {
  std::vector<SampleDiagnostics> out(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) out[i] = diagnostics_of(states[i], spec);
  return out;
}

std::vector<SampleDiagnostics> batch_diagnostics(std::span<const ModalState> states,
                                                 const Spectrum& spec) {
  std::vector<SampleDiagnostics> out(states.size());
  parallel_for(states.size(), [&](std::size_t i) { out[i] = diagnostics_of(states[i], spec); });
  return out;
}

std::vector<PolarState> batch_polar_serial(std::span<const ModalState> states,
                                           const Spectrum& spec) {
  std::vector<PolarState> out(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) out[i] = to_polar(states[i], spec);
  return out;
}

std::vector<PolarState> batch_polar(std::span<const ModalState> states, const Spectrum& spec) {
  std::vector<PolarState> out(states.size());
  parallel_for(states.size(), [&](std::size_t i) { out[i] = to_polar(states[i], spec); });
  return out;
}

std::vector<double> prefix_trapezoid_serial(std::span<const double> f, double h) {
  std::vector<double> out(f.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = 1; i < f.size(); ++i) {
    acc += 0.5 * h * (f[i - 1] + f[i]);
    out[i] = acc;
  }
  return out;
}

std::vector<double> prefix_trapezoid(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  constexpr std::size_t chunk = 1 << 14;
  const std::size_t intervals = n - 1;
  const std::size_t nchunks = (intervals + chunk - 1) / chunk;

  // Pass 1: local prefixes per chunk (parallel, disjoint slots).
  std::vector<double> totals(nchunks, 0.0);
  parallel_for(nchunks, [&](std::size_t c) {
    const std::size_t lo = c * chunk;
    const std::size_t hi = std::min(lo + chunk, intervals);
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      acc += 0.5 * h * (f[i] + f[i + 1]);
      out[i + 1] = acc;
    }
    totals[c] = acc;
  });
  // Pass 2: exclusive scan of chunk totals, fixed order.
  std::vector<double> base(nchunks, 0.0);
  for (std::size_t c = 1; c < nchunks; ++c) base[c] = base[c - 1] + totals[c - 1];
  // Pass 3: shift (parallel).
  parallel_for(nchunks, [&](std::size_t c) {
    if (base[c] == 0.0) return;
    const std::size_t lo = c * chunk;
    const std::size_t hi = std::min(lo + chunk, intervals);
    for (std::size_t i = lo; i < hi; ++i) out[i + 1] += base[c];
  });
  return out;
}

}  // namespace nldamp::par
