#pragma once

#include <functional>
#include <string>
#include <vector>

namespace nldamp {

// Harness for the logistic-type differential inequality
//   |z' - z + z^2/z_inf - psi1(t)| <= psi2(t),
// realized as the ODE z' = z - z^2/z_inf + psi1 + xi(t) psi2 over an
// adversarial family of sign schedules xi. All positive solutions should
// reach z_inf when psi1 is semi-integrable and psi2 -> 0.
struct PropRSpec {
  double z_infinity = 1.0;
  std::function<double(double)> psi1;  // null = 0
  std::function<double(double)> psi2;  // null = 0
  double z0 = 1.0;
};

struct ScheduleResult {
  std::string name;
  double final_value = 0.0;
};

struct PropRReport {
  std::vector<ScheduleResult> schedules;
  double final_value = 0.0;  // value of the worst schedule
  bool converged = false;    // |final - z_inf| < 5e-3 for every schedule
  bool hypotheses_ok = true;
  std::vector<std::string> flags;  // hypothesis-check notes; run continues
};

PropRReport prop_r_harness(const PropRSpec& spec, double t_end, double rel_tol = 1e-10);

// Harness for z' = alpha z (1 - z^2) + alpha beta z^3 + gamma z.
// Reports the limit behavior (-> 1 when the damping integral diverges), the
// threshold time t0 from the uniform constants, and the sup of the solution
// restarted at z(t0) = 1 (expected <= 2).
struct BernoulliSpec {
  std::function<double(double)> alpha;
  std::function<double(double)> beta;   // null = 0
  std::function<double(double)> gamma;  // null = 0
  double L0 = 0.0;                      // |alpha'| <= L0 alpha
  double L1 = 0.0;                      // uniform bound on alpha, |alpha'|, |beta|, |gamma|
  double L2 = 0.0;                      // partial-integral envelope of beta, gamma
  double z0 = 1.0;
};

struct BernoulliReport {
  double final_value = 0.0;
  double t0_threshold = 0.0;
  double sup_after_t0 = 0.0;
  bool hypotheses_ok = true;
  std::vector<std::string> flags;
};

BernoulliReport bernoulli_harness(const BernoulliSpec& spec, double t_end,
                                  double rel_tol = 1e-10);

}  // namespace nldamp
