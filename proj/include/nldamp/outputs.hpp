#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nldamp/config.hpp"
#include "nldamp/trajectory.hpp"

namespace nldamp {

struct EmittedFile {
  std::string name;
  std::uint64_t bytes = 0;
  std::string fnv1a64;  // hex digest
};

struct CriterionResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RunManifest {
  std::string scenario_id;
  std::string code_version;
  std::string config_echo;     // canonical config serialization
  std::string started;         // wall-clock timestamps (UTC)
  std::string finished;
  std::string status = "ok";   // ok | failed | error
  std::vector<CriterionResult> criteria;
  std::vector<EmittedFile> files;

  bool all_pass() const;
};

std::string format_shortest(double v);
std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

// series.csv with header t,E,tE,e_1..e_N (and rho_k, theta_k columns when
// requested), shortest round-trip decimals, LF line endings.
std::string render_series_csv(const Trajectory& traj, bool polar_columns);
std::string render_series_csv(const AveragedTrajectory& traj);

std::string render_summary_json(const Trajectory& traj,
                                const std::vector<CriterionResult>& criteria);
std::string render_summary_json(const AveragedTrajectory& traj,
                                const std::vector<CriterionResult>& criteria);

// Writes series.csv and summary.json into dir, returning the inventory.
// Throws io_failure (after removing partial files) on write errors and
// std::invalid_argument for an empty trajectory.
std::vector<EmittedFile> emit_outputs(const Trajectory& traj, const std::filesystem::path& dir,
                                      bool polar_columns,
                                      const std::vector<CriterionResult>& criteria = {});
std::vector<EmittedFile> emit_outputs(const AveragedTrajectory& traj,
                                      const std::filesystem::path& dir,
                                      const std::vector<CriterionResult>& criteria = {});

// Atomic write (temp file + rename).
void write_manifest(const RunManifest& manifest, const std::filesystem::path& dir);
RunManifest read_manifest(const std::filesystem::path& file);

}  // namespace nldamp
