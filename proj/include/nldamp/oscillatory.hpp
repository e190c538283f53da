#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace nldamp {

// Slowly varying phase correction: |derivative| <= lipschitz_bound on the
// queried range (spot-checked by sampling before integration).
struct PhaseFunction {
  std::function<double(double)> value;       // psi(t); null means psi == 0
  std::function<double(double)> derivative;  // psi'(t); null means 0
  double lipschitz_bound = 0.0;              // L3

  double eval(double t) const { return value ? value(t) : 0.0; }
  double deriv(double t) const { return derivative ? derivative(t) : 0.0; }
};

struct OscIntegral {
  double value = 0.0;  // integral of cos(alpha e^tau + psi(tau)) over [t, s]
  double bound = 0.0;  // (3 + L3) / (alpha e^t); |value| <= bound
  std::size_t panels = 0;
};

// Substitutes x = e^tau and integrates the resulting decaying oscillation by
// half-period panels; the alternating panel series is accelerated, so the
// cost is independent of how many oscillations fit in [t, s].
OscIntegral osc_integral(double alpha, const PhaseFunction& psi, double t, double s,
                         double tol = 1e-10);

// Running averages (1/T) int_0^T of products of sin^2(lambda e^s) factors.
double time_average_sin2(double lambda, double T, double tol = 1e-10);
double time_average_sin4(double lambda, double T, double tol = 1e-10);
double time_average_sin2sin2(double lambda, double mu, double T, double tol = 1e-10);

enum class EnvelopeClass {
  semi_integrable_exponential,
  semi_integrable,
  not_semi_integrable,
  inconclusive
};

struct EnvelopePoint {
  double t = 0.0;
  double sup_abs_integral = 0.0;  // sup over s in [t, s_max] of |int_t^s f|
};

struct ProbeReport {
  std::vector<EnvelopePoint> envelope;
  EnvelopeClass classification = EnvelopeClass::inconclusive;
  double fitted_rate = 0.0;      // decay rate when an exponential fits
  double fitted_constant = 0.0;  // max over grid of envelope * e^{t}
};

// Dense-sampling probe of semi-integrability: cumulative integral on a fine
// uniform grid, envelope via suffix extrema, then a decay classification.
ProbeReport semi_integrability_probe(const std::function<double(double)>& f,
                                     std::span<const double> t_grid, double s_max);

// Corrections left after replacing trigonometric products by their averages.
inline double trig_a(double theta);                   // sin^2 - 1/2
inline double trig_b(double theta);                   // sin^4 - 3/8
inline double trig_c(double theta_h, double theta_k); // sin^2 sin^2 - 1/4

inline double trig_a(double theta) {
  const double s = std::sin(theta);
  return s * s - 0.5;
}
inline double trig_b(double theta) {
  const double s = std::sin(theta);
  return s * s * s * s - 0.375;
}
inline double trig_c(double theta_h, double theta_k) {
  const double sh = std::sin(theta_h), sk = std::sin(theta_k);
  return sh * sh * sk * sk - 0.25;
}

}  // namespace nldamp
