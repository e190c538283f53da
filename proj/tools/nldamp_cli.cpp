// Command-line experiment runner: scenario execution, verification battery
// for the oscillatory toolkit and scalar harnesses, parameter sweeps, and
// manifest aggregation. Exit codes: 0 all criteria pass, 1 criterion
// failure, 2 execution error.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nldamp/averaged.hpp"
#include "nldamp/config.hpp"
#include "nldamp/errors.hpp"
#include "nldamp/harnesses.hpp"
#include "nldamp/oscillatory.hpp"
#include "nldamp/outputs.hpp"
#include "nldamp/parallel.hpp"
#include "nldamp/scenario.hpp"

namespace fs = std::filesystem;
using namespace nldamp;

namespace {

int manifest_exit_code(const RunManifest& m) {
  if (m.status == "error") return 2;
  return m.all_pass() ? 0 : 1;
}

void print_manifest(const RunManifest& m) {
  for (const CriterionResult& c : m.criteria)
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << m.scenario_id << ": " << c.name << " ("
              << c.detail << ")\n";
  std::cout << m.scenario_id << ": " << m.status << "\n";
}

int cmd_run_scenario(const std::string& config_path, const std::string& out_dir) {
  const ScenarioConfig cfg = load_config(config_path);
  const RunManifest m = run_scenario(cfg, out_dir);
  print_manifest(m);
  return manifest_exit_code(m);
}

// ---------------------------------------------------------------------------
// verify: toolkit battery (gradient consistency, oscillatory bounds,
// time averages, semi-integrability, scalar harnesses).

void push(std::vector<CriterionResult>& out, const std::string& name, bool pass,
          const std::string& detail) {
  out.push_back({name, pass, detail});
}

void verify_gradient(std::vector<CriterionResult>& out, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.5);
  bool exact_ok = true, fd_ok = true;
  double worst_fd = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> rho(8);
    for (double& r : rho) r = unif(rng);
    const std::vector<double> g = functional_gradient(rho);
    const std::vector<double> rhs = averaged_rhs(rho);
    for (std::size_t k = 0; k < rho.size(); ++k)
      if (g[k] != -rhs[k]) exact_ok = false;
    const double h = 1e-5;
    for (std::size_t k = 0; k < rho.size(); ++k) {
      std::vector<double> hi = rho, lo = rho;
      hi[k] += h;
      lo[k] -= h;
      const double fd = (functional_value(hi) - functional_value(lo)) / (2.0 * h);
      const double rel = std::abs(fd - g[k]) / std::max(std::abs(g[k]), 1e-8);
      worst_fd = std::max(worst_fd, rel);
    }
  }
  fd_ok = worst_fd < 1e-6;
  push(out, "gradient_exact_negation", exact_ok, exact_ok ? "bitwise" : "mismatch");
  push(out, "gradient_finite_difference", fd_ok,
       "worst relative deviation " + format_shortest(worst_fd));
}

void verify_oscillatory(std::vector<CriterionResult>& out, std::uint64_t seed) {
  std::mt19937_64 rng(seed + 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::size_t violations = 0, cases = 0;
  for (double alpha : {0.5, 1.0, 5.0, 20.0}) {
    for (double slope : {-5.0, -2.0, 0.0, 2.0, 5.0}) {
      for (double t : {0.0, 2.0, 4.0, 8.0}) {
        const double span = 0.5 + 19.5 * unif(rng);
        PhaseFunction psi;
        const double phase0 = unif(rng) * 6.28;
        psi.value = [slope, phase0](double tau) { return phase0 + slope * tau; };
        psi.derivative = [slope](double) { return slope; };
        psi.lipschitz_bound = std::abs(slope);
        const OscIntegral r = osc_integral(alpha, psi, t, t + span, 1e-9);
        ++cases;
        if (std::abs(r.value) > r.bound) ++violations;
      }
    }
  }
  push(out, "oscillatory_bound_sweep", violations == 0,
       std::to_string(cases) + " cases, " + std::to_string(violations) + " violations");

  const double a2 = time_average_sin2(1.0, 50.0);
  const double a4 = time_average_sin4(2.0, 50.0);
  const double a22 = time_average_sin2sin2(1.0, 2.0, 50.0);
  const double a22eq = time_average_sin2sin2(1.0, 1.0, 50.0);
  push(out, "time_average_sin2", std::abs(a2 - 0.5) < 0.02, format_shortest(a2) + " vs 1/2");
  push(out, "time_average_sin4", std::abs(a4 - 0.375) < 0.02, format_shortest(a4) + " vs 3/8");
  push(out, "time_average_sin2sin2", std::abs(a22 - 0.25) < 0.02,
       format_shortest(a22) + " vs 1/4");
  push(out, "time_average_equal_frequencies", std::abs(a22eq - 0.375) < 0.02,
       format_shortest(a22eq) + " vs 3/8 (independence fails)");

  std::vector<double> grid;
  for (int i = 0; i <= 12; ++i) grid.push_back(0.5 * i);
  const ProbeReport fast =
      semi_integrability_probe([](double t) { return std::cos(std::exp(t)); }, grid, 12.0);
  push(out, "probe_exponential_envelope",
       fast.classification == EnvelopeClass::semi_integrable_exponential &&
           fast.fitted_constant <= 4.0,
       "C = " + format_shortest(fast.fitted_constant));
  const ProbeReport diverging =
      semi_integrability_probe([](double t) { return 1.0 / (1.0 + t); }, grid, 12.0);
  push(out, "probe_divergent", diverging.classification == EnvelopeClass::not_semi_integrable,
       "harmonic integrand flagged");
  const ProbeReport slow = semi_integrability_probe(
      [](double t) { return std::cos(t) / (1.0 + t); }, grid, 12.0);
  push(out, "probe_polynomial_envelope",
       slow.classification == EnvelopeClass::semi_integrable ||
           slow.classification == EnvelopeClass::semi_integrable_exponential,
       "oscillatory decaying integrand accepted");
}

void verify_harnesses(std::vector<CriterionResult>& out) {
  PropRSpec spec;
  spec.z_infinity = 2.0;
  spec.psi1 = [](double t) { return std::cos(std::exp(t)); };
  spec.psi2 = [](double t) { return std::exp(-t); };
  spec.z0 = 1.0;
  const PropRReport rep = prop_r_harness(spec, 40.0);
  std::string detail;
  for (const ScheduleResult& s : rep.schedules)
    detail += s.name + "=" + format_shortest(s.final_value) + " ";
  push(out, "logistic_inequality_limit", rep.converged && rep.hypotheses_ok, detail);

  BernoulliSpec bspec;
  bspec.alpha = [](double) { return 1.0; };
  bspec.z0 = 3.0;
  bspec.L0 = 0.0;
  bspec.L1 = 1.0;
  bspec.L2 = 0.0;
  const BernoulliReport brep = bernoulli_harness(bspec, 30.0);
  push(out, "bernoulli_limit", std::abs(brep.final_value - 1.0) < 1e-6,
       format_shortest(brep.final_value) + " vs 1");

  BernoulliSpec capped;
  capped.alpha = [](double) { return 1.0; };
  capped.beta = [](double t) { return std::cos(std::exp(t)); };
  capped.L0 = 0.0;
  capped.L1 = 1.0;
  capped.L2 = 1.0;
  capped.z0 = 1.0;
  const BernoulliReport crep = bernoulli_harness(capped, 30.0);
  push(out, "bernoulli_threshold",
       crep.sup_after_t0 <= 2.0 && std::abs(crep.t0_threshold - 4.6708) < 1e-3,
       "t0 = " + format_shortest(crep.t0_threshold) + ", sup = " +
           format_shortest(crep.sup_after_t0));
}

std::string now_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int run_verify(const std::string& out_dir, std::uint64_t seed) {
  RunManifest manifest;
  manifest.scenario_id = "verify";
  manifest.code_version = kCodeVersion;
  manifest.started = now_utc();
  try {
    verify_gradient(manifest.criteria, seed);
    verify_oscillatory(manifest.criteria, seed);
    verify_harnesses(manifest.criteria);
  } catch (const std::exception& e) {
    manifest.status = "error";
    manifest.criteria.push_back({"run", false, e.what()});
  }
  if (manifest.status == "ok")
    for (const CriterionResult& c : manifest.criteria)
      if (!c.pass) manifest.status = "failed";
  manifest.finished = now_utc();
  if (!out_dir.empty()) write_manifest(manifest, out_dir);
  print_manifest(manifest);
  return manifest_exit_code(manifest);
}

// ---------------------------------------------------------------------------
// sweep: run a scenario over a list of parameter values in a worker pool.

struct SweepSpec {
  std::string parameter;
  std::vector<std::string> values;
};

SweepSpec parse_sweep_section(const std::string& path) {
  // The sweep block rides in the same file, outside the schema handled by
  // parse_config, so pull it out textually first.
  std::ifstream in(path);
  if (!in) throw io_failure("cannot open config file: " + path);
  SweepSpec spec;
  std::string line, section;
  while (std::getline(in, line)) {
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      const auto b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = line.substr(1, line.size() - 2);
      continue;
    }
    if (section != "sweep") continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "parameter") spec.parameter = val;
    if (key == "values") {
      std::stringstream ss(val);
      std::string item;
      while (std::getline(ss, item, ',')) spec.values.push_back(trim(item));
    }
  }
  return spec;
}

std::string strip_sweep_section(const std::string& path) {
  std::ifstream in(path);
  std::string out, line;
  bool in_sweep = false;
  while (std::getline(in, line)) {
    std::string t = line;
    const auto a = t.find_first_not_of(" \t\r");
    t = (a == std::string::npos) ? "" : t.substr(a);
    if (!t.empty() && t.front() == '[') in_sweep = (t.rfind("[sweep]", 0) == 0);
    if (!in_sweep) out += line + "\n";
  }
  return out;
}

void apply_parameter(ScenarioConfig& cfg, const std::string& parameter, const std::string& value) {
  if (parameter == "spectrum.count") cfg.count = std::stoull(value);
  else if (parameter == "initial.c") cfg.c = std::stod(value);
  else if (parameter == "initial.p") cfg.p = std::stod(value);
  else if (parameter == "integrator.t_end") cfg.integrator.t_end = std::stod(value);
  else if (parameter == "integrator.s_end") cfg.s_end = std::stod(value);
  else if (parameter == "integrator.rel_tol") cfg.integrator.rel_tol = std::stod(value);
  else if (parameter == "integrator.sample_count") cfg.integrator.sample_count = std::stoull(value);
  else throw std::invalid_argument("sweep: unsupported parameter '" + parameter + "'");
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir) {
  const SweepSpec sweep = parse_sweep_section(config_path);
  if (sweep.parameter.empty() || sweep.values.empty())
    throw std::invalid_argument("sweep: config needs a [sweep] section with parameter and values");
  const ScenarioConfig base = parse_config(strip_sweep_section(config_path));

  std::vector<RunManifest> manifests(sweep.values.size());
  par::parallel_for(sweep.values.size(), [&](std::size_t i) {
    ScenarioConfig cfg = base;
    apply_parameter(cfg, sweep.parameter, sweep.values[i]);
    cfg.id = base.id + "_" + sweep.values[i];
    manifests[i] = run_scenario(cfg, fs::path(out_dir) / cfg.id);
  });

  int code = 0;
  for (const RunManifest& m : manifests) {
    print_manifest(m);
    code = std::max(code, manifest_exit_code(m));
  }
  return code;
}

int cmd_report(const std::vector<std::string>& dirs) {
  int code = 0;
  std::size_t seen = 0;
  for (const std::string& d : dirs) {
    for (const auto& entry : fs::recursive_directory_iterator(d)) {
      if (!entry.is_regular_file() || entry.path().filename() != "manifest.json") continue;
      ++seen;
      const RunManifest m = read_manifest(entry.path());
      // Re-hash the emitted files against the recorded checksums.
      bool files_ok = true;
      for (const EmittedFile& f : m.files) {
        std::ifstream in(entry.path().parent_path() / f.name, std::ios::binary);
        if (!in) {
          files_ok = false;
          continue;
        }
        std::stringstream ss;
        ss << in.rdbuf();
        if (fnv1a64_hex(ss.str()) != f.fnv1a64) files_ok = false;
      }
      std::cout << (m.all_pass() && files_ok ? "[PASS] " : "[FAIL] ") << entry.path().string()
                << " (" << m.status << (files_ok ? "" : ", checksum mismatch") << ")\n";
      if (!(m.all_pass() && files_ok)) code = std::max(code, m.status == "error" ? 2 : 1);
    }
  }
  if (seen == 0) {
    std::cout << "no manifests found\n";
    return 2;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation lab for modal systems with norm-coupled nonlinear damping"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  std::vector<std::string> report_dirs;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    if (needs_config)
      cmd->add_option("-c,--config", config_path, "scenario config file")->required();
    cmd->add_option("-o,--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "seed for randomized sweeps");
    cmd->add_option("--threads", threads, "worker threads (0 = default)");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "run a full-system scenario");
  add_common(simulate, true);
  CLI::App* average = app.add_subcommand("average", "run an averaged-flow scenario");
  add_common(average, true);
  CLI::App* verify = app.add_subcommand("verify", "oscillatory toolkit and harness battery");
  add_common(verify, false);
  CLI::App* sweep = app.add_subcommand("sweep", "run a scenario over a parameter grid");
  add_common(sweep, true);
  CLI::App* report = app.add_subcommand("report", "aggregate manifests and re-check files");
  report->add_option("dirs", report_dirs, "directories holding manifests")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (threads > 0) par::set_threads(threads);
    if (simulate->parsed() || average->parsed()) {
      if (out_dir.empty()) throw std::invalid_argument("--out is required");
      return cmd_run_scenario(config_path, out_dir);
    }
    if (verify->parsed()) return run_verify(out_dir, seed);
    if (sweep->parsed()) {
      if (out_dir.empty()) throw std::invalid_argument("--out is required");
      return cmd_sweep(config_path, out_dir);
    }
    if (report->parsed()) return cmd_report(report_dirs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
