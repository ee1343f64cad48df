#ifndef TONGUE_LINEARIZATION_HPP
#define TONGUE_LINEARIZATION_HPP

// Koenigs linearization at an attracting circle cycle, normalized by
// phi'(x0) = i x0, and the Beltrami-coefficient arithmetic of the
// multiplier-changing deformation (radial stretch z -> |z|^alpha z).

#include <cmath>
#include <complex>
#include <numbers>

#include "tongue/complex_map.hpp"
#include "tongue/config.hpp"
#include "tongue/cycle_finder.hpp"

namespace tongue {

struct KoenigsChart {
  ComplexParams params;
  int period = 1;
  Complex base;        // cycle point x0, |x0| = 1
  double lambda = 0.0; // multiplier of g^p at x0, in (0,1)
  int depth = 200;     // cap on renormalized iterations
  Complex scale;       // i x0
  double radius = 0.1; // disk around x0 where the chart is evaluated
  Complex quad;        // c2 of the local chart w + c2 w^2 + c3 w^3
  Complex cubic;       // c3
};

namespace detail {

inline Complex iterate_g(const ComplexParams& params, Complex z, int n) {
  for (int k = 0; k < n; ++k) z = g_eval(params, z);
  return z;
}

// Derivatives of g from the logarithmic derivative l = g'/g = 2/z + b(1 + 1/z^2):
// g'' = g (l^2 + l'), g''' = g (l^3 + 3 l l' + l'').
struct GJet {
  Complex d1, d2, d3;
};

inline GJet g_jet(const ComplexParams& params, Complex z) {
  const Complex inv = 1.0 / z;
  const Complex inv2 = inv * inv;
  const Complex l = 2.0 * inv + params.b * (1.0 + inv2);
  const Complex l1 = -2.0 * inv2 - 2.0 * params.b * inv2 * inv;
  const Complex l2 = 4.0 * inv2 * inv + 6.0 * params.b * inv2 * inv2;
  const Complex g = g_eval(params, z);
  return {g * l, g * (l * l + l1), g * (l * l * l + 3.0 * l * l1 + l2)};
}

inline Complex g_second_derivative(const ComplexParams& params, Complex z) { return g_jet(params, z).d2; }

// First three derivatives of g^p at z (Faa di Bruno for each composition).
inline GJet return_map_jet(const ComplexParams& params, Complex z, int p) {
  GJet acc{{1.0, 0.0}, {}, {}};
  for (int k = 0; k < p; ++k) {
    const GJet g = g_jet(params, z);
    acc = {g.d1 * acc.d1, g.d2 * acc.d1 * acc.d1 + g.d1 * acc.d2,
           g.d3 * acc.d1 * acc.d1 * acc.d1 + 3.0 * g.d2 * acc.d1 * acc.d2 + g.d1 * acc.d3};
    z = g_eval(params, z);
  }
  return acc;
}

// Half the second derivative of g^p at z.
inline Complex return_map_quadratic(const ComplexParams& params, Complex z, int p) {
  return 0.5 * return_map_jet(params, z, p).d2;
}

struct ChartJet {
  Complex value;
  Complex derivative;
};

inline Complex local_chart(const KoenigsChart& chart, Complex w) { return w * (1.0 + w * (chart.quad + w * chart.cubic)); }

inline Complex local_chart_derivative(const KoenigsChart& chart, Complex w) {
  return 1.0 + w * (2.0 * chart.quad + 3.0 * w * chart.cubic);
}

// lim lambda^-n h(g^{pn}(z) - x0) with h the cubic Taylor polynomial of the
// local chart, together with its z-derivative by the chain rule. The quartic
// remainder of h is near 1e-12 relative once |g^{pn}(z) - x0| < 1e-4, and
// stopping there keeps the amplified rounding of x0 small.
inline ChartJet koenigs_unscaled(const KoenigsChart& chart, Complex z) {
  constexpr double kSmall = 1e-4;
  Complex dw = z - chart.base;
  if (std::abs(dw) > chart.radius) throw dynamics_error(ErrorKind::DomainEscape, "point outside the chart disk");
  Complex w = z;
  Complex orbit_deriv{1.0, 0.0};
  ChartJet jet{local_chart(chart, dw), local_chart_derivative(chart, dw)};
  double factor = 1.0;
  for (int n = 1; n <= chart.depth && std::abs(dw) >= kSmall; ++n) {
    for (int k = 0; k < chart.period; ++k) {
      orbit_deriv *= g_derivative(chart.params, w);
      w = g_eval(chart.params, w);
    }
    dw = w - chart.base;
    if (!(std::abs(dw) <= chart.radius)) {
      throw dynamics_error(ErrorKind::DomainEscape, "orbit left the linearization disk");
    }
    factor /= chart.lambda;
    const ChartJet next{local_chart(chart, dw) * factor, local_chart_derivative(chart, dw) * orbit_deriv * factor};
    const bool settled = std::abs(next.value - jet.value) <= 1e-12 * std::abs(next.value);
    jet = next;
    if (settled) break;
  }
  return jet;
}

}  // namespace detail

inline Complex koenigs_eval(const KoenigsChart& chart, Complex z) {
  return chart.scale * detail::koenigs_unscaled(chart, z).value;
}

inline Complex koenigs_eval(const ComplexParams& params, const Cycle& cycle, const KoenigsChart& chart, Complex z) {
  if (cycle.period != chart.period || params.a != chart.params.a || params.b != chart.params.b) {
    throw dynamics_error(ErrorKind::Precondition, "chart was built for a different map or cycle");
  }
  return koenigs_eval(chart, z);
}

/// phi'(z) through the chain rule along the same orbit.
inline Complex koenigs_derivative(const KoenigsChart& chart, Complex z) {
  return chart.scale * detail::koenigs_unscaled(chart, z).derivative;
}

/// Central difference with real step h, as an independent check of
/// koenigs_derivative.
inline Complex koenigs_derivative_fd(const KoenigsChart& chart, Complex z, double h = 1e-7) {
  return (koenigs_eval(chart, z + h) - koenigs_eval(chart, z - h)) / (2.0 * h);
}

/// Builds the normalized chart at the distinguished cycle point (index 0
/// when none was recorded). Superattracting cycles are rejected.
inline KoenigsChart build_koenigs_chart(const ComplexParams& params, const Cycle& cycle, const SolverConfig& cfg) {
  params.validate();
  if (!(cycle.multiplier > 0.0 && cycle.multiplier < 1.0)) {
    throw dynamics_error(ErrorKind::OutOfRange, "Koenigs charts need a multiplier in (0,1)");
  }
  const int idx = cycle.distinguished_index.value_or(0);
  KoenigsChart chart;
  chart.params = params;
  chart.period = cycle.period;
  chart.depth = cfg.koenigs_depth;
  chart.base = std::polar(1.0, detail::kTwoPi * cycle.point(idx).value);
  chart.lambda = cycle.multiplier;
  if (auto polished = detail::complex_newton_cycle(params, chart.base, cycle.period)) {
    if (polished->period == cycle.period && std::abs(polished->point - chart.base) < 1e-8) {
      chart.base = polished->point / std::abs(polished->point);
      chart.lambda = polished->multiplier.real();
    }
  }
  chart.scale = Complex{0.0, 1.0} * chart.base;
  const detail::GJet jet = detail::return_map_jet(params, chart.base, chart.period);
  const double lam = chart.lambda;
  chart.quad = 0.5 * jet.d2 / (lam - lam * lam);
  chart.cubic = (jet.d3 / 6.0 + lam * jet.d2 * chart.quad) / (lam - lam * lam * lam);

  // Shrink the disk until the functional equation holds on its half-radius circle.
  for (double radius = 0.1; radius > 1e-6; radius *= 0.5) {
    chart.radius = radius;
    bool ok = true;
    for (int k = 0; k < 16 && ok; ++k) {
      const Complex z = chart.base + std::polar(0.5 * radius, detail::kTwoPi * (k + 0.5) / 16.0);
      try {
        const Complex lhs = koenigs_eval(chart, detail::iterate_g(params, z, chart.period));
        const Complex rhs = chart.lambda * koenigs_eval(chart, z);
        ok = std::abs(lhs - rhs) < 1e-8;
      } catch (const dynamics_error&) {
        ok = false;
      }
    }
    if (ok) return chart;
  }
  throw dynamics_error(ErrorKind::DomainEscape, "no linearization disk passed the functional-equation check");
}

/// conj(phi(1/conj z)), the chart transported by the reflection in the unit
/// circle. It linearizes the same cycle, so it equals
/// koenigs_reflection_factor(chart) * phi(z).
inline Complex koenigs_reflected(const KoenigsChart& chart, Complex z) {
  return std::conj(koenigs_eval(chart, 1.0 / std::conj(z)));
}

/// conj(x0)^4: ratio of the reflected chart's derivative at x0 to i x0.
inline Complex koenigs_reflection_factor(const KoenigsChart& chart) {
  const Complex c = std::conj(chart.base);
  return c * c * c * c;
}

/// Value at 1/conj(z) of a Beltrami coefficient invariant under the
/// reflection, given its value mu at z: conj(mu) (z / conj z)^2.
inline Complex reflected_coefficient(Complex mu, Complex z) {
  const Complex u = z / std::conj(z);
  return std::conj(mu) * u * u;
}

// Deformation arithmetic.

struct DeformationStep {
  double lambda;
  double rho;
  double alpha;
  double mu_modulus;
};

/// alpha with lambda^{1 + alpha} = rho.
inline double alpha_for_multiplier(double lambda, double rho) {
  if (!(lambda > 0.0 && lambda < 1.0) || !(rho > 0.0 && rho < 1.0)) {
    throw dynamics_error(ErrorKind::OutOfRange, "multipliers must lie in (0,1)");
  }
  return std::log(rho) / std::log(lambda) - 1.0;
}

/// |alpha/2| / |1 + alpha/2|, the sup norm of the stretch's coefficient.
inline double stretch_dilatation(double alpha) { return std::fabs(alpha / 2.0) / std::fabs(1.0 + alpha / 2.0); }

inline DeformationStep deformation_step(double lambda, double rho) {
  const double alpha = alpha_for_multiplier(lambda, rho);
  return {lambda, rho, alpha, stretch_dilatation(alpha)};
}

/// chi(z) = |z|^alpha z.
inline Complex radial_stretch(double alpha, Complex z) {
  if (!(alpha > -1.0)) throw dynamics_error(ErrorKind::Precondition, "alpha must exceed -1");
  if (z == Complex{}) throw dynamics_error(ErrorKind::Precondition, "radial_stretch needs z != 0");
  return std::pow(std::abs(z), alpha) * z;
}

/// mu_chi(z) = (alpha/2)/(1 + alpha/2) * z / conj(z).
inline Complex beltrami_of_stretch(double alpha, Complex z) {
  if (!(alpha > -1.0)) throw dynamics_error(ErrorKind::Precondition, "alpha must exceed -1");
  if (z == Complex{}) throw dynamics_error(ErrorKind::Precondition, "beltrami_of_stretch needs z != 0");
  return (alpha / 2.0) / (1.0 + alpha / 2.0) * (z / std::conj(z));
}

/// Coefficient of chi o phi: mu_chi(phi(z)) * conj(phi'(z)) / phi'(z).
inline Complex composed_dilatation(const KoenigsChart& chart, double alpha, Complex z) {
  const Complex phi = koenigs_eval(chart, z);
  if (std::abs(phi) == 0.0) throw dynamics_error(ErrorKind::AtBasePoint, "coefficient undefined at the cycle point");
  const Complex dphi = koenigs_derivative(chart, z);
  return beltrami_of_stretch(alpha, phi) * (std::conj(dphi) / dphi);
}

/// Pulls a coefficient back along n steps of g:
/// conj((g^n)'(z)) / (g^n)'(z) * mu(g^n(z)).
inline Complex pullback_dilatation(const ComplexParams& params, Complex mu_at_target, Complex z, int n) {
  if (n < 0) throw dynamics_error(ErrorKind::Precondition, "n must be >= 0");
  Complex deriv{1.0, 0.0};
  for (int k = 0; k < n; ++k) {
    deriv *= g_derivative(params, z);
    z = g_eval(params, z);
  }
  if (std::abs(deriv) == 0.0) throw dynamics_error(ErrorKind::CriticalOnOrbit, "(g^n)'(z) vanishes");
  const Complex unit = std::conj(deriv) / deriv;
  return unit / std::abs(unit) * mu_at_target;
}

}  // namespace tongue

#endif  // TONGUE_LINEARIZATION_HPP
