#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "nldamp/spectrum.hpp"
#include "nldamp/states.hpp"

namespace nldamp {

enum class Scheme { adaptive_rk, rotating_frame };
enum class SamplerKind { log_spaced, dyadic };

struct IntegratorConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  double t_end = 0.0;
  SamplerKind sampler = SamplerKind::log_spaced;
  std::size_t sample_count = 1000;
  Scheme scheme = Scheme::adaptive_rk;

  bool operator==(const IntegratorConfig&) const = default;

  void validate() const;  // tolerances in (0, 1e-2], t_end > 0, max_step > 0
};

// Requested output times in [0, t_end]. log_spaced is uniform in log(1+t);
// dyadic is t_end, t_end/2, t_end/4, ... plus 0.
std::vector<double> sample_times(const IntegratorConfig& cfg);

enum class RunStatus { ok, step_underflow, nan_detected };

struct SampleDiagnostics {
  double energy = 0.0;           // E = |u'|^2 + |A^(1/2)u|^2
  double rescaled_energy = 0.0;  // (1+t) E
  double velocity_sq = 0.0;      // |u'|^2
  std::vector<double> modal;     // e_k
};

struct Trajectory {
  Spectrum spectrum;
  IntegratorConfig config;
  std::string scenario_id;
  ModeSet active;  // support of the initial data; invariant along the run
  std::vector<ModalState> samples;
  std::vector<SampleDiagnostics> diagnostics;  // parallel to samples
  RunStatus status = RunStatus::ok;
  std::string status_message;

  std::size_t size() const { return samples.size(); }
  bool ok() const { return status == RunStatus::ok; }
};

struct AveragedTrajectory {
  std::string scenario_id;
  double tol = 0.0;
  ModeSet active;
  std::vector<double> s;
  std::vector<std::vector<double>> rho;  // one amplitude vector per sample
  std::vector<double> total;             // R = sum rho_k^2
  std::vector<double> functional;        // value of the flow functional
  RunStatus status = RunStatus::ok;
  std::string status_message;

  std::size_t size() const { return s.size(); }
  bool ok() const { return status == RunStatus::ok; }
};

}  // namespace nldamp
