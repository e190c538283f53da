#pragma once

#include <filesystem>

#include "nldamp/config.hpp"
#include "nldamp/outputs.hpp"

namespace nldamp {

inline constexpr const char* kCodeVersion = "0.1.0";

// Initial data families, shared by the CLI and the test suites.
// finite_modes: listed modes start with the given polar amplitudes and zero
// polar phase (u_k = amp/lambda_k, u'_k = -u_k/2); all other modes are
// bit-exact zero. powerlaw_tail: every mode active with amplitude
// c (k+1)^-p. proportional_pair: two modes, second = ratio * first.
ModalState build_initial_state(const ScenarioConfig& cfg, const Spectrum& spec);
AveragedState build_initial_averaged(const ScenarioConfig& cfg, const Spectrum& spec);

// Runs the configured scenario, writes series.csv / summary.json /
// manifest.json under out_dir and returns the manifest. Deterministic for a
// fixed config and seed (timestamps aside).
RunManifest run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace nldamp
