#include "nldamp/outputs.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <limits>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "nldamp/errors.hpp"

namespace nldamp {

namespace {

using ordered_json = nlohmann::ordered_json;

void write_file_or_cleanup(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_failure("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) {
    out.close();
    std::error_code ec;
    std::filesystem::remove(path, ec);
    throw io_failure("failed while writing " + path.string());
  }
}

EmittedFile emit_one(const std::filesystem::path& dir, const std::string& name,
                     const std::string& bytes) {
  write_file_or_cleanup(dir / name, bytes);
  return {name, bytes.size(), fnv1a64_hex(bytes)};
}

std::string run_status_string(RunStatus s) {
  switch (s) {
    case RunStatus::ok: return "ok";
    case RunStatus::step_underflow: return "step_underflow";
    default: return "nan_detected";
  }
}

}  // namespace

bool RunManifest::all_pass() const {
  if (status != "ok") return false;
  for (const CriterionResult& c : criteria)
    if (!c.pass) return false;
  return true;
}

std::string format_shortest(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string fnv1a64_hex(std::string_view bytes) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = fnv1a64(bytes);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

std::string render_series_csv(const Trajectory& traj, bool polar_columns) {
  const std::size_t n = traj.spectrum.size();
  std::string out = "t,E,tE";
  for (std::size_t k = 1; k <= n; ++k) out += ",e_" + std::to_string(k);
  if (polar_columns) {
    for (std::size_t k = 1; k <= n; ++k) out += ",rho_" + std::to_string(k);
    for (std::size_t k = 1; k <= n; ++k) out += ",theta_" + std::to_string(k);
  }
  out += "\n";
  std::vector<PolarState> polar;
  if (polar_columns) {
    polar.reserve(traj.size());
    for (const ModalState& st : traj.samples) polar.push_back(to_polar(st, traj.spectrum));
  }
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out += format_shortest(traj.samples[i].t);
    out += ",";
    out += format_shortest(traj.diagnostics[i].energy);
    out += ",";
    out += format_shortest(traj.diagnostics[i].rescaled_energy);
    for (std::size_t k = 0; k < n; ++k) {
      out += ",";
      out += format_shortest(traj.diagnostics[i].modal[k]);
    }
    if (polar_columns) {
      for (std::size_t k = 0; k < n; ++k) {
        out += ",";
        out += format_shortest(polar[i].rho[k]);
      }
      for (std::size_t k = 0; k < n; ++k) {
        out += ",";
        out += format_shortest(polar[i].theta[k]);
      }
    }
    out += "\n";
  }
  return out;
}

std::string render_series_csv(const AveragedTrajectory& traj) {
  const std::size_t n = traj.rho.empty() ? 0 : traj.rho.front().size();
  std::string out = "s,R,F";
  for (std::size_t k = 1; k <= n; ++k) out += ",rho_" + std::to_string(k);
  out += "\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out += format_shortest(traj.s[i]);
    out += ",";
    out += format_shortest(traj.total[i]);
    out += ",";
    out += format_shortest(traj.functional[i]);
    for (std::size_t k = 0; k < n; ++k) {
      out += ",";
      out += format_shortest(traj.rho[i][k]);
    }
    out += "\n";
  }
  return out;
}

namespace {

ordered_json criteria_json(const std::vector<CriterionResult>& criteria) {
  ordered_json arr = ordered_json::array();
  for (const CriterionResult& c : criteria)
    arr.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  return arr;
}

}  // namespace

std::string render_summary_json(const Trajectory& traj,
                                const std::vector<CriterionResult>& criteria) {
  ordered_json j;
  j["schema_version"] = 1;
  j["scenario"] = traj.scenario_id;
  j["kind"] = "simulate";
  j["status"] = run_status_string(traj.status);
  j["samples"] = traj.size();
  j["modes"] = traj.spectrum.size();
  ordered_json active = ordered_json::array();
  for (std::size_t k : traj.active.indices) active.push_back(k + 1);
  j["active_modes"] = active;
  if (!traj.samples.empty()) {
    const double t_last = traj.samples.back().t;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
      if (traj.samples[i].t >= t_last / 10.0) {
        lo = std::min(lo, traj.diagnostics[i].rescaled_energy);
        hi = std::max(hi, traj.diagnostics[i].rescaled_energy);
      }
    }
    j["trailing"] = {{"t_from", t_last / 10.0}, {"t_to", t_last},
                     {"tE_min", lo}, {"tE_max", hi}};
  }
  j["criteria"] = criteria_json(criteria);
  return j.dump(2) + "\n";
}

std::string render_summary_json(const AveragedTrajectory& traj,
                                const std::vector<CriterionResult>& criteria) {
  ordered_json j;
  j["schema_version"] = 1;
  j["scenario"] = traj.scenario_id;
  j["kind"] = "average";
  j["status"] = run_status_string(traj.status);
  j["samples"] = traj.size();
  j["modes"] = traj.rho.empty() ? 0 : traj.rho.front().size();
  if (!traj.s.empty()) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = traj.size() / 2; i < traj.size(); ++i) {
      lo = std::min(lo, traj.total[i]);
      hi = std::max(hi, traj.total[i]);
    }
    double max_rho = 0.0;
    for (double r : traj.rho.back()) max_rho = std::max(max_rho, r);
    j["trailing"] = {{"s_from", traj.s[traj.size() / 2]}, {"s_to", traj.s.back()},
                     {"R_min", lo}, {"R_max", hi}};
    j["final"] = {{"R", traj.total.back()}, {"max_rho", max_rho},
                  {"functional", traj.functional.back()}};
  }
  j["criteria"] = criteria_json(criteria);
  return j.dump(2) + "\n";
}

std::vector<EmittedFile> emit_outputs(const Trajectory& traj, const std::filesystem::path& dir,
                                      bool polar_columns,
                                      const std::vector<CriterionResult>& criteria) {
  if (traj.samples.empty()) throw std::invalid_argument("emit_outputs: empty trajectory");
  std::filesystem::create_directories(dir);
  std::vector<EmittedFile> files;
  files.push_back(emit_one(dir, "series.csv", render_series_csv(traj, polar_columns)));
  files.push_back(emit_one(dir, "summary.json", render_summary_json(traj, criteria)));
  return files;
}

std::vector<EmittedFile> emit_outputs(const AveragedTrajectory& traj,
                                      const std::filesystem::path& dir,
                                      const std::vector<CriterionResult>& criteria) {
  if (traj.s.empty()) throw std::invalid_argument("emit_outputs: empty trajectory");
  std::filesystem::create_directories(dir);
  std::vector<EmittedFile> files;
  files.push_back(emit_one(dir, "series.csv", render_series_csv(traj)));
  files.push_back(emit_one(dir, "summary.json", render_summary_json(traj, criteria)));
  return files;
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& dir) {
  ordered_json j;
  j["schema_version"] = 1;
  j["scenario"] = manifest.scenario_id;
  j["code_version"] = manifest.code_version;
  j["started"] = manifest.started;
  j["finished"] = manifest.finished;
  j["status"] = manifest.status;
  j["criteria"] = ordered_json::array();
  for (const CriterionResult& c : manifest.criteria)
    j["criteria"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  j["files"] = ordered_json::array();
  for (const EmittedFile& f : manifest.files)
    j["files"].push_back({{"name", f.name}, {"bytes", f.bytes}, {"fnv1a64", f.fnv1a64}});
  j["config"] = manifest.config_echo;

  std::filesystem::create_directories(dir);
  const std::filesystem::path tmp = dir / "manifest.json.tmp";
  const std::filesystem::path fin = dir / "manifest.json";
  write_file_or_cleanup(tmp, j.dump(2) + "\n");
  std::error_code ec;
  std::filesystem::rename(tmp, fin, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw io_failure("failed to finalize manifest in " + dir.string());
  }
}

RunManifest read_manifest(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw io_failure("cannot open manifest: " + file.string());
  ordered_json j;
  in >> j;
  RunManifest m;
  m.scenario_id = j.value("scenario", "");
  m.code_version = j.value("code_version", "");
  m.started = j.value("started", "");
  m.finished = j.value("finished", "");
  m.status = j.value("status", "error");
  m.config_echo = j.value("config", "");
  if (j.contains("criteria"))
    for (const auto& c : j["criteria"])
      m.criteria.push_back({c.value("name", ""), c.value("pass", false), c.value("detail", "")});
  if (j.contains("files"))
    for (const auto& f : j["files"])
      m.files.push_back({f.value("name", ""), f.value("bytes", std::uint64_t{0}),
                         f.value("fnv1a64", "")});
  return m;
}

}  // namespace nldamp
