#include "nldamp/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "nldamp/errors.hpp"

namespace nldamp {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::invalid_argument("config: bad numeric value for " + key + ": '" + s + "'");
  }
}

std::uint64_t parse_u64(const std::string& s, const std::string& key) {
  try {
    return std::stoull(s);
  } catch (...) {
    throw std::invalid_argument("config: bad integer value for " + key + ": '" + s + "'");
  }
}

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string join_doubles(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += format_double(xs[i]);
  }
  return out;
}

std::string join_sizes(const std::vector<std::size_t>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(xs[i]);
  }
  return out;
}

std::string join_strings(const std::vector<std::string>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += xs[i];
  }
  return out;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  ScenarioConfig cfg;
  cfg.diagnostics.clear();
  bool saw_schema = false;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected key = value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));

    if (section.empty() && key == "schema_version") {
      if (parse_u64(val, key) != 1)
        throw std::invalid_argument("config: unsupported schema_version " + val);
      saw_schema = true;
      continue;
    }
    if (section == "scenario") {
      if (key == "id") cfg.id = val;
      else if (key == "kind") {
        if (val == "simulate") cfg.kind = ScenarioKind::simulate;
        else if (val == "average") cfg.kind = ScenarioKind::average;
        else throw std::invalid_argument("config: unknown scenario kind '" + val + "'");
      } else if (key == "seed") cfg.seed = parse_u64(val, key);
      else throw std::invalid_argument("config: unknown key [scenario] " + key);
    } else if (section == "spectrum") {
      if (key == "kind") cfg.spectrum_kind = val;
      else if (key == "count") cfg.count = parse_u64(val, key);
      else if (key == "length") cfg.length = parse_double(val, key);
      else if (key == "base") cfg.base = parse_double(val, key);
      else if (key == "gap") cfg.gap = parse_double(val, key);
      else if (key == "cluster_eps") cfg.cluster_eps = parse_double(val, key);
      else if (key == "values") {
        cfg.explicit_lambdas.clear();
        for (const std::string& item : split_list(val))
          cfg.explicit_lambdas.push_back(parse_double(item, key));
      } else throw std::invalid_argument("config: unknown key [spectrum] " + key);
    } else if (section == "initial") {
      if (key == "family") {
        if (val == "finite_modes") cfg.family = InitialFamily::finite_modes;
        else if (val == "powerlaw_tail") cfg.family = InitialFamily::powerlaw_tail;
        else if (val == "proportional_pair") cfg.family = InitialFamily::proportional_pair;
        else throw std::invalid_argument("config: unknown initial family '" + val + "'");
      } else if (key == "modes") {
        cfg.modes.clear();
        for (const std::string& item : split_list(val))
          cfg.modes.push_back(parse_u64(item, key));
      } else if (key == "amplitudes") {
        cfg.amplitudes.clear();
        for (const std::string& item : split_list(val))
          cfg.amplitudes.push_back(parse_double(item, key));
      } else if (key == "c") cfg.c = parse_double(val, key);
      else if (key == "p") cfg.p = parse_double(val, key);
      else if (key == "ratio") cfg.ratio = parse_double(val, key);
      else throw std::invalid_argument("config: unknown key [initial] " + key);
    } else if (section == "integrator") {
      if (key == "scheme") {
        if (val == "adaptive_rk") cfg.integrator.scheme = Scheme::adaptive_rk;
        else if (val == "rotating_frame") cfg.integrator.scheme = Scheme::rotating_frame;
        else throw std::invalid_argument("config: unknown scheme '" + val + "'");
      } else if (key == "rel_tol") cfg.integrator.rel_tol = parse_double(val, key);
      else if (key == "abs_tol") cfg.integrator.abs_tol = parse_double(val, key);
      else if (key == "max_step") cfg.integrator.max_step = parse_double(val, key);
      else if (key == "t_end") cfg.integrator.t_end = parse_double(val, key);
      else if (key == "s_end") cfg.s_end = parse_double(val, key);
      else if (key == "tol") cfg.avg_tol = parse_double(val, key);
      else if (key == "sampler") {
        if (val == "log_spaced") cfg.integrator.sampler = SamplerKind::log_spaced;
        else if (val == "dyadic") cfg.integrator.sampler = SamplerKind::dyadic;
        else throw std::invalid_argument("config: unknown sampler '" + val + "'");
      } else if (key == "sample_count") cfg.integrator.sample_count = parse_u64(val, key);
      else throw std::invalid_argument("config: unknown key [integrator] " + key);
    } else if (section == "output") {
      if (key == "diagnostics") cfg.diagnostics = split_list(val);
      else if (key == "polar") cfg.polar_columns = (val == "on" || val == "true" || val == "1");
      else throw std::invalid_argument("config: unknown key [output] " + key);
    } else if (section == "criteria") {
      // check.<n> = <name> <args...>
      std::istringstream cs(val);
      CriterionCheck chk;
      cs >> chk.name;
      std::string arg;
      while (cs >> arg) chk.args.push_back(arg);
      if (chk.name.empty())
        throw std::invalid_argument("config: empty criterion check");
      cfg.criteria.push_back(std::move(chk));
    } else {
      throw std::invalid_argument("config: unknown section [" + section + "]");
    }
  }
  if (!saw_schema) throw std::invalid_argument("config: missing schema_version");
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_failure("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ScenarioConfig& cfg) {
  std::ostringstream out;
  out << "schema_version = " << cfg.schema_version << "\n\n";
  out << "[scenario]\n";
  out << "id = " << cfg.id << "\n";
  out << "kind = " << (cfg.kind == ScenarioKind::simulate ? "simulate" : "average") << "\n";
  out << "seed = " << cfg.seed << "\n\n";

  out << "[spectrum]\n";
  out << "kind = " << cfg.spectrum_kind << "\n";
  out << "count = " << cfg.count << "\n";
  if (cfg.spectrum_kind == "dirichlet_string") {
    out << "length = " << format_double(cfg.length) << "\n";
  } else if (cfg.spectrum_kind == "arithmetic") {
    out << "base = " << format_double(cfg.base) << "\n";
    out << "gap = " << format_double(cfg.gap) << "\n";
  } else if (cfg.spectrum_kind == "clustered") {
    out << "base = " << format_double(cfg.base) << "\n";
    out << "gap = " << format_double(cfg.gap) << "\n";
    out << "cluster_eps = " << format_double(cfg.cluster_eps) << "\n";
  } else if (cfg.spectrum_kind == "explicit") {
    out << "values = " << join_doubles(cfg.explicit_lambdas) << "\n";
  }
  out << "\n[initial]\n";
  switch (cfg.family) {
    case InitialFamily::finite_modes:
      out << "family = finite_modes\n";
      out << "modes = " << join_sizes(cfg.modes) << "\n";
      out << "amplitudes = " << join_doubles(cfg.amplitudes) << "\n";
      break;
    case InitialFamily::powerlaw_tail:
      out << "family = powerlaw_tail\n";
      out << "c = " << format_double(cfg.c) << "\n";
      out << "p = " << format_double(cfg.p) << "\n";
      break;
    case InitialFamily::proportional_pair:
      out << "family = proportional_pair\n";
      out << "c = " << format_double(cfg.c) << "\n";
      out << "ratio = " << format_double(cfg.ratio) << "\n";
      break;
  }
  out << "\n[integrator]\n";
  if (cfg.kind == ScenarioKind::simulate) {
    out << "scheme = "
        << (cfg.integrator.scheme == Scheme::rotating_frame ? "rotating_frame" : "adaptive_rk")
        << "\n";
    out << "rel_tol = " << format_double(cfg.integrator.rel_tol) << "\n";
    out << "abs_tol = " << format_double(cfg.integrator.abs_tol) << "\n";
    if (std::isfinite(cfg.integrator.max_step))
      out << "max_step = " << format_double(cfg.integrator.max_step) << "\n";
    out << "t_end = " << format_double(cfg.integrator.t_end) << "\n";
    out << "sampler = "
        << (cfg.integrator.sampler == SamplerKind::dyadic ? "dyadic" : "log_spaced") << "\n";
    out << "sample_count = " << cfg.integrator.sample_count << "\n";
  } else {
    out << "s_end = " << format_double(cfg.s_end) << "\n";
    out << "tol = " << format_double(cfg.avg_tol) << "\n";
    out << "sample_count = " << cfg.integrator.sample_count << "\n";
  }
  out << "\n[output]\n";
  out << "diagnostics = " << join_strings(cfg.diagnostics) << "\n";
  out << "polar = " << (cfg.polar_columns ? "on" : "off") << "\n";
  if (!cfg.criteria.empty()) {
    out << "\n[criteria]\n";
    for (std::size_t i = 0; i < cfg.criteria.size(); ++i) {
      out << "check." << (i + 1) << " = " << cfg.criteria[i].name;
      for (const std::string& a : cfg.criteria[i].args) out << " " << a;
      out << "\n";
    }
  }
  return out.str();
}

Spectrum build_spectrum(const ScenarioConfig& cfg) {
  if (cfg.spectrum_kind == "dirichlet_string") return make_spectrum_dirichlet(cfg.length, cfg.count);
  if (cfg.spectrum_kind == "arithmetic") return make_spectrum_arithmetic(cfg.base, cfg.gap, cfg.count);
  if (cfg.spectrum_kind == "clustered")
    return make_spectrum_clustered(cfg.base, cfg.gap, cfg.cluster_eps, cfg.count);
  if (cfg.spectrum_kind == "explicit") {
    if (cfg.explicit_lambdas.size() != cfg.count)
      throw std::invalid_argument("config: explicit spectrum needs count matching values");
    return make_spectrum(cfg.explicit_lambdas);
  }
  throw std::invalid_argument("config: unknown spectrum kind '" + cfg.spectrum_kind + "'");
}

}  // namespace nldamp
