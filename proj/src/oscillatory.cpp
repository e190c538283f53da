#include "nldamp/oscillatory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nldamp/errors.hpp"
#include "nldamp/parallel.hpp"
#include "nldamp/util.hpp"

namespace nldamp {

namespace {

constexpr double kPi = 3.14159265358979323846;

// 12-point Gauss-Legendre on [-1, 1], positive half.
constexpr double kGlNode[6] = {0.1252334085114689, 0.3678314989981802, 0.5873179542866175,
                               0.7699026741943047, 0.9041172563704749, 0.9815606342467192};
constexpr double kGlWeight[6] = {0.2491470458134028, 0.2334925365383548, 0.2031674267230659,
                                 0.1600783285433462, 0.1069393259953184, 0.0471753363865118};

struct Integrand {
  double alpha;
  const PhaseFunction* psi;
  double phase(double tau) const { return alpha * std::exp(tau) + psi->eval(tau); }
  double operator()(double tau) const { return std::cos(phase(tau)); }
};

double gl12(const Integrand& f, double a, double b) {
  const double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < 6; ++i)
    acc += kGlWeight[i] * (f(mid + hw * kGlNode[i]) + f(mid - hw * kGlNode[i]));
  return hw * acc;
}

double adaptive_simpson(const Integrand& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double integrate_smooth(const Integrand& f, double a, double b, double tol) {
  if (b <= a) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

// Next breakpoint where the phase reaches `target` (phase is strictly
// increasing on the fast region).
double solve_phase(const Integrand& f, double guess, double target) {
  double x = guess;
  for (int it = 0; it < 80; ++it) {
    const double val = f.phase(x) - target;
    const double der = f.alpha * std::exp(x) + f.psi->deriv(x);
    const double step = val / der;
    x -= step;
    if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

// Iterated Aitken extrapolation of the partial-sum tail.
double aitken_limit(std::vector<double> s) {
  while (s.size() >= 3) {
    std::vector<double> next;
    next.reserve(s.size() - 2);
    for (std::size_t i = 0; i + 2 < s.size(); ++i) {
      const double d1 = s[i + 1] - s[i];
      const double d2 = s[i + 2] - 2.0 * s[i + 1] + s[i];
      next.push_back(d2 != 0.0 ? s[i] - d1 * d1 / d2 : s[i + 2]);
    }
    s = std::move(next);
  }
  return s.back();
}

// Tail integral int_{t0}^{infinity} cos(alpha e^tau + psi(tau)) dtau.
// Slow region handled by adaptive quadrature, then half-period panels with
// series acceleration.
double tail_integral(const Integrand& f, double t0, double tol, std::size_t* panels_used) {
  const double l3 = f.psi->lipschitz_bound;
  // Fast region: phase derivative safely positive.
  double t_fast = t0;
  const double need = std::max(2.0 * l3 + 1.0, 1.0);
  if (f.alpha * std::exp(t0) < need) t_fast = std::log(need / f.alpha);

  double head = 0.0;
  if (t_fast > t0) head = integrate_smooth(f, t0, t_fast, tol / 8.0);

  const double phase0 = f.phase(t_fast);
  double tau = t_fast;
  double acc = 0.0;
  std::vector<double> partial;
  partial.reserve(64);
  double prev_extrap = std::numeric_limits<double>::quiet_NaN();
  constexpr std::size_t max_panels = 800;
  for (std::size_t j = 1; j <= max_panels; ++j) {
    const double target = phase0 + static_cast<double>(j) * kPi;
    const double guess = std::log(std::max((target - f.psi->eval(tau)) / f.alpha, 1e-300));
    const double tau_next = solve_phase(f, std::max(guess, tau), target);
    acc += gl12(f, tau, tau_next);
    partial.push_back(acc);
    tau = tau_next;
    if (partial.size() >= 8 && partial.size() % 2 == 0) {
      const std::size_t window = std::min<std::size_t>(partial.size(), 24);
      const double extrap = aitken_limit(std::vector<double>(
          partial.end() - static_cast<std::ptrdiff_t>(window), partial.end()));
      if (std::isfinite(prev_extrap) && std::abs(extrap - prev_extrap) < tol / 4.0) {
        if (panels_used) *panels_used += partial.size();
        return head + extrap;
      }
      prev_extrap = extrap;
    }
  }
  throw quadrature_failure("osc_integral: panel series did not converge");
}

}  // namespace

OscIntegral osc_integral(double alpha, const PhaseFunction& psi, double t, double s, double tol) {
  if (!(alpha > 0.0)) throw std::invalid_argument("osc_integral: alpha must be positive");
  if (!(s >= t) || !(t >= 0.0)) throw std::invalid_argument("osc_integral: need s >= t >= 0");
  if (!(tol > 0.0)) throw std::invalid_argument("osc_integral: tol must be positive");

  // Spot-check the Lipschitz bound on the phase correction.
  if (psi.derivative) {
    const double hi = std::min(s, t + 40.0);
    for (int i = 0; i <= 64; ++i) {
      const double tau = t + (hi - t) * i / 64.0;
      if (std::abs(psi.deriv(tau)) > psi.lipschitz_bound * (1.0 + 1e-9) + 1e-12)
        throw std::invalid_argument("osc_integral: |psi'| exceeds the declared bound");
    }
  }

  Integrand f{alpha, &psi};
  OscIntegral out;
  out.bound = (3.0 + psi.lipschitz_bound) / (alpha * std::exp(t));
  if (s == t) return out;

  // Short spans: integrate directly (slow part + a few panels).
  const double span_phase = alpha * (std::exp(s) - std::exp(t));
  if (span_phase <= 64.0 * kPi) {
    const double l3 = psi.lipschitz_bound;
    const double need = std::max(2.0 * l3 + 1.0, 1.0);
    double t_fast = t;
    if (alpha * std::exp(t) < need) t_fast = std::min(s, std::log(need / alpha));
    double value = integrate_smooth(f, t, t_fast, tol / 8.0);
    if (t_fast < s) {
      // Walk half-period panels up to s.
      const double phase0 = f.phase(t_fast);
      double tau = t_fast;
      std::size_t j = 1;
      while (tau < s) {
        const double target = phase0 + static_cast<double>(j) * kPi;
        double tau_next;
        if (f.phase(s) <= target) {
          tau_next = s;
        } else {
          const double guess = std::log(std::max((target - psi.eval(tau)) / alpha, 1e-300));
          tau_next = std::min(solve_phase(f, std::max(guess, tau), target), s);
        }
        value += gl12(f, tau, tau_next);
        tau = tau_next;
        ++j;
        ++out.panels;
      }
    }
    out.value = value;
    return out;
  }

  const double u_t = tail_integral(f, t, tol, &out.panels);
  const double u_s = tail_integral(f, s, tol, &out.panels);
  out.value = u_t - u_s;
  return out;
}

namespace {
double osc_plain(double omega, double T, double tol) {
  // int_0^T cos(omega e^tau) dtau; omega == 0 degenerates to T.
  if (omega == 0.0) return T;
  PhaseFunction none;
  return osc_integral(omega, none, 0.0, T, tol).value;
}
}  // namespace

double time_average_sin2(double lambda, double T, double tol) {
  if (!(lambda > 0.0)) throw std::invalid_argument("time_average: lambda must be positive");
  if (!(T >= 1.0)) throw std::invalid_argument("time_average: T must be >= 1");
  return 0.5 - osc_plain(2.0 * lambda, T, tol) / (2.0 * T);
}

double time_average_sin4(double lambda, double T, double tol) {
  if (!(lambda > 0.0)) throw std::invalid_argument("time_average: lambda must be positive");
  if (!(T >= 1.0)) throw std::invalid_argument("time_average: T must be >= 1");
  return 0.375 -
         (0.5 * osc_plain(2.0 * lambda, T, tol) - 0.125 * osc_plain(4.0 * lambda, T, tol)) / T;
}

double time_average_sin2sin2(double lambda, double mu, double T, double tol) {
  if (!(lambda > 0.0) || !(mu > 0.0))
    throw std::invalid_argument("time_average: frequencies must be positive");
  if (!(T >= 1.0)) throw std::invalid_argument("time_average: T must be >= 1");
  // sin^2(a) sin^2(b) = 1/4 - cos(2a)/4 - cos(2b)/4 + cos(2a+2b)/8 + cos(2a-2b)/8.
  // With lambda == mu the difference frequency degenerates and contributes
  // T/8, which is exactly how the independence of the two factors fails.
  const double diff = std::abs(lambda - mu);
  const double corr = -0.25 * osc_plain(2.0 * lambda, T, tol) -
                      0.25 * osc_plain(2.0 * mu, T, tol) +
                      0.125 * osc_plain(2.0 * (lambda + mu), T, tol) +
                      0.125 * osc_plain(2.0 * diff, T, tol);
  return 0.25 + corr / T;
}

ProbeReport semi_integrability_probe(const std::function<double(double)>& f,
                                     std::span<const double> t_grid, double s_max) {
  if (t_grid.empty()) throw std::invalid_argument("probe: empty t grid");
  if (!std::is_sorted(t_grid.begin(), t_grid.end()))
    throw std::invalid_argument("probe: t grid must be sorted");
  const double t_min = t_grid.front();
  if (!(s_max > t_grid.back())) throw std::invalid_argument("probe: s_max must exceed the grid");

  ProbeReport rep;
  std::vector<double> env_prev;
  std::size_t n = 1 << 16;
  constexpr std::size_t n_cap = 1 << 23;
  std::vector<double> cum, fs;
  while (true) {
    fs.resize(n + 1);
    const double h = (s_max - t_min) / static_cast<double>(n);
    par::parallel_for(n + 1, [&](std::size_t i) { fs[i] = f(t_min + h * static_cast<double>(i)); });
    cum = par::prefix_trapezoid(fs, h);

    // Suffix extrema of the cumulative integral.
    std::vector<double> sufmax(cum.size()), sufmin(cum.size());
    sufmax.back() = sufmin.back() = cum.back();
    for (std::size_t i = cum.size() - 1; i-- > 0;) {
      sufmax[i] = std::max(cum[i], sufmax[i + 1]);
      sufmin[i] = std::min(cum[i], sufmin[i + 1]);
    }
    std::vector<double> env(t_grid.size());
    for (std::size_t g = 0; g < t_grid.size(); ++g) {
      const double pos = (t_grid[g] - t_min) / h;
      const std::size_t i = std::min(static_cast<std::size_t>(std::llround(pos)), cum.size() - 1);
      env[g] = std::max(sufmax[i] - cum[i], cum[i] - sufmin[i]);
    }
    bool stable = !env_prev.empty();
    if (stable) {
      double scale = 0.0;
      for (double e : env) scale = std::max(scale, e);
      for (std::size_t g = 0; g < env.size(); ++g)
        if (std::abs(env[g] - env_prev[g]) > 5e-3 * std::max(scale, 1e-300)) stable = false;
    }
    if (stable || n >= n_cap) {
      rep.envelope.resize(t_grid.size());
      for (std::size_t g = 0; g < t_grid.size(); ++g)
        rep.envelope[g] = {t_grid[g], env[g]};
      break;
    }
    env_prev = env;
    n *= 2;
  }

  // Divergence trend: sup attained at the far end and still growing there.
  {
    const double h = (s_max - t_min) / static_cast<double>(cum.size() - 1);
    const std::size_t i0 =
        std::min(static_cast<std::size_t>(std::llround((t_grid.front() - t_min) / h)),
                 cum.size() - 1);
    double sup = 0.0;
    std::size_t arg = i0;
    for (std::size_t i = i0; i < cum.size(); ++i) {
      const double v = std::abs(cum[i] - cum[i0]);
      if (v > sup) {
        sup = v;
        arg = i;
      }
    }
    const bool at_end = arg + cum.size() / 50 >= cum.size();
    const double half = std::abs(cum[i0 + (cum.size() - i0) / 2] - cum[i0]);
    if (at_end && sup > 0.0 && half < 0.9 * sup) {
      rep.classification = EnvelopeClass::not_semi_integrable;
      return rep;
    }
  }

  std::vector<double> xs, ys;
  double cfit = 0.0;
  for (const EnvelopePoint& p : rep.envelope) {
    if (p.sup_abs_integral > 0.0) {
      xs.push_back(p.t);
      ys.push_back(std::log(p.sup_abs_integral));
      cfit = std::max(cfit, p.sup_abs_integral * std::exp(p.t));
    }
  }
  rep.fitted_constant = cfit;
  if (xs.size() >= 3) {
    const double slope = linear_fit(xs, ys).first;
    rep.fitted_rate = -slope;
    if (slope <= -0.8) {
      rep.classification = EnvelopeClass::semi_integrable_exponential;
      return rep;
    }
  }
  if (rep.envelope.size() >= 2 &&
      rep.envelope.back().sup_abs_integral < 0.5 * rep.envelope.front().sup_abs_integral) {
    rep.classification = EnvelopeClass::semi_integrable;
    return rep;
  }
  rep.classification = EnvelopeClass::inconclusive;
  return rep;
}

}  // namespace nldamp
