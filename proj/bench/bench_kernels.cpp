// Serial vs OpenMP comparison for the batch kernels. Not part of ctest;
// build and run by hand:  ./bench/bench_kernels [modes] [samples]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "nldamp/parallel.hpp"
#include "nldamp/spectrum.hpp"

using namespace nldamp;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <typename F>
double time_best_of(int reps, F&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n_modes = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 256;
  const std::size_t n_samples = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 4096;

  const Spectrum spec = make_spectrum_dirichlet(3.14159265358979323846, n_modes);
  std::vector<ModalState> states(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    states[i].t = 0.01 * static_cast<double>(i);
    states[i].u.resize(n_modes);
    states[i].du.resize(n_modes);
    for (std::size_t k = 0; k < n_modes; ++k) {
      states[i].u[k] = std::sin(0.1 * static_cast<double>(i + k)) / spec[k];
      states[i].du[k] = std::cos(0.07 * static_cast<double>(i + 3 * k));
    }
  }

  std::printf("openmp: %s, threads: %d, modes: %zu, samples: %zu\n",
              par::openmp_enabled() ? "yes" : "no", par::max_threads(), n_modes, n_samples);

  const double t_diag_s =
      time_best_of(5, [&] { (void)par::batch_diagnostics_serial(states, spec); });
  const double t_diag_p = time_best_of(5, [&] { (void)par::batch_diagnostics(states, spec); });
  std::printf("batch_diagnostics  serial %8.4f s   parallel %8.4f s   speedup %5.2fx\n",
              t_diag_s, t_diag_p, t_diag_s / t_diag_p);

  const double t_pol_s = time_best_of(5, [&] { (void)par::batch_polar_serial(states, spec); });
  const double t_pol_p = time_best_of(5, [&] { (void)par::batch_polar(states, spec); });
  std::printf("batch_polar        serial %8.4f s   parallel %8.4f s   speedup %5.2fx\n",
              t_pol_s, t_pol_p, t_pol_s / t_pol_p);

  std::vector<double> f(1 << 23);
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = std::cos(std::exp(12.0 * static_cast<double>(i) / static_cast<double>(f.size())));
  const double h = 12.0 / static_cast<double>(f.size() - 1);
  const double t_pre_s = time_best_of(5, [&] { (void)par::prefix_trapezoid_serial(f, h); });
  const double t_pre_p = time_best_of(5, [&] { (void)par::prefix_trapezoid(f, h); });
  std::printf("prefix_trapezoid   serial %8.4f s   parallel %8.4f s   speedup %5.2fx\n",
              t_pre_s, t_pre_p, t_pre_s / t_pre_p);
  return 0;
}
