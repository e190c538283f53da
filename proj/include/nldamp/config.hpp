#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nldamp/trajectory.hpp"

namespace nldamp {

// A named acceptance check evaluated by run_scenario into the manifest.
struct CriterionCheck {
  std::string name;
  std::vector<std::string> args;

  bool operator==(const CriterionCheck&) const = default;
};

enum class ScenarioKind { simulate, average };

enum class InitialFamily { finite_modes, powerlaw_tail, proportional_pair };

// Key/value scenario description; round-trips losslessly through the
// sectioned plain-text format (see parse_config / serialize_config).
struct ScenarioConfig {
  int schema_version = 1;
  std::string id = "scenario";
  ScenarioKind kind = ScenarioKind::simulate;
  std::uint64_t seed = 0;

  // [spectrum]
  std::string spectrum_kind = "dirichlet_string";  // arithmetic | clustered | explicit
  std::size_t count = 1;
  double length = 3.14159265358979323846;
  double base = 1.0;
  double gap = 1.0;
  double cluster_eps = 0.1;
  std::vector<double> explicit_lambdas;

  // [initial]
  InitialFamily family = InitialFamily::finite_modes;
  std::vector<std::size_t> modes;    // 1-based mode numbers (finite_modes)
  std::vector<double> amplitudes;    // initial polar amplitudes (finite_modes)
  double c = 1.0;                    // powerlaw_tail amplitude scale / pair base amplitude
  double p = 0.6;                    // powerlaw_tail exponent
  double ratio = 0.5;                // proportional_pair factor

  // [integrator]
  IntegratorConfig integrator;       // t_end used by simulate
  double s_end = 60.0;               // average flow horizon
  double avg_tol = 1e-8;             // average flow tolerance

  // [output]
  std::vector<std::string> diagnostics;  // rescaled_energy, equipartition, quotients,
                                         // phase_drift, profile_error, energy_identity,
                                         // decay_fit, reduction
  bool polar_columns = false;

  // [criteria]
  std::vector<CriterionCheck> criteria;

  bool operator==(const ScenarioConfig&) const = default;
};

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);
std::string serialize_config(const ScenarioConfig& cfg);

Spectrum build_spectrum(const ScenarioConfig& cfg);

}  // namespace nldamp
