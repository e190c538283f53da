#include "nldamp/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nldamp {

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0.0) || rel_tol > 1e-2)
    throw std::invalid_argument("integrator config: rel_tol must lie in (0, 1e-2]");
  if (!(abs_tol > 0.0) || abs_tol > 1e-2)
    throw std::invalid_argument("integrator config: abs_tol must lie in (0, 1e-2]");
  if (!(t_end > 0.0)) throw std::invalid_argument("integrator config: t_end must be positive");
  if (!(max_step > 0.0)) throw std::invalid_argument("integrator config: max_step must be positive");
  if (sample_count < 2) throw std::invalid_argument("integrator config: need at least 2 samples");
}

std::vector<double> sample_times(const IntegratorConfig& cfg) {
  std::vector<double> ts;
  if (cfg.sampler == SamplerKind::log_spaced) {
    ts.resize(cfg.sample_count);
    const double s_end = std::log1p(cfg.t_end);
    for (std::size_t i = 0; i < cfg.sample_count; ++i) {
      const double s = s_end * static_cast<double>(i) / static_cast<double>(cfg.sample_count - 1);
      ts[i] = std::min(std::expm1(s), cfg.t_end);
    }
    ts.back() = cfg.t_end;
  } else {
    ts.push_back(cfg.t_end);
    for (double t = cfg.t_end / 2.0; t >= 1.0; t /= 2.0) ts.push_back(t);
    ts.push_back(0.0);
    std::reverse(ts.begin(), ts.end());
  }
  return ts;
}

}  // namespace nldamp
