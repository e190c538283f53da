#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "nldamp/spectrum.hpp"
#include "nldamp/states.hpp"
#include "nldamp/trajectory.hpp"

// Data-parallel kernels for the bulk post-processing paths (per-sample
// diagnostics, polar transforms, cumulative integrals, sweep grids).
// Every kernel has a serial reference implementation kept for testing; the
// map-style kernels write disjoint slots and must match the reference
// bitwise for any thread count. The scan kernel uses a fixed chunk
// decomposition, so its result is independent of the thread count too.
namespace nldamp::par {

bool openmp_enabled();
int max_threads();
void set_threads(int n);  // n <= 0 restores the library default

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

std::vector<SampleDiagnostics> batch_diagnostics_serial(std::span<const ModalState> states,
                                                        const Spectrum& spec);
std::vector<SampleDiagnostics> batch_diagnostics(std::span<const ModalState> states,
                                                 const Spectrum& spec);

std::vector<PolarState> batch_polar_serial(std::span<const ModalState> states,
                                           const Spectrum& spec);
std::vector<PolarState> batch_polar(std::span<const ModalState> states, const Spectrum& spec);

// Cumulative trapezoid of f sampled on a uniform grid with spacing h;
// out[0] = 0. The parallel variant computes fixed-size chunk prefixes in
// parallel and stitches them in index order.
std::vector<double> prefix_trapezoid_serial(std::span<const double> f, double h);
std::vector<double> prefix_trapezoid(std::span<const double> f, double h);

}  // namespace nldamp::par
