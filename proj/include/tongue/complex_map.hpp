#ifndef TONGUE_COMPLEX_MAP_HPP
#define TONGUE_COMPLEX_MAP_HPP

// Complexification of the double standard family on C*:
//
//   g_{a,b}(z) = e^{2 pi i a} z^2 e^{b (z - 1/z)},
//
// which restricts to f_{a,b} on the unit circle (z = e^{2 pi i x}) and
// commutes with the reflection z -> 1/conj(z).

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string_view>
#include <utility>
#include <variant>

#include "tongue/circle_map.hpp"
#include "tongue/config.hpp"
#include "tongue/cycle_finder.hpp"

namespace tongue {

using Complex = std::complex<double>;

/// (a, b) for the complex family. Unlike CircleParams, b > 1 is allowed.
struct ComplexParams {
  double a = 0.0;
  double b = 0.0;

  void validate() const {
    if (!std::isfinite(a) || !std::isfinite(b) || b < 0.0) {
      throw dynamics_error(ErrorKind::Precondition, "complex parameters need finite a and b >= 0");
    }
  }
};

inline Complex g_eval(const ComplexParams& params, Complex z) {
  if (z == Complex{0.0, 0.0}) throw dynamics_error(ErrorKind::Precondition, "g is undefined at 0");
  const Complex w = params.b * (z - 1.0 / z);
  const double log_modulus = 2.0 * std::log(std::abs(z)) + w.real();
  if (!std::isfinite(log_modulus) || std::fabs(log_modulus) > 700.0) {
    throw dynamics_error(ErrorKind::Overflow, "|g(z)| leaves the floating range; clamp with the escape threshold");
  }
  const double angle = detail::kTwoPi * params.a + 2.0 * std::arg(z) + w.imag();
  return std::polar(std::exp(log_modulus), angle);
}

/// g'(z) = g(z) (2/z + b (1 + 1/z^2)).
inline Complex g_derivative(const ComplexParams& params, Complex z) {
  return g_eval(params, z) * (2.0 / z + params.b * (1.0 + 1.0 / (z * z)));
}

/// Point of C* as z = exp(r + 2 pi i t), t in [0,1).
struct LogPoint {
  double r = 0.0;
  double t = 0.0;

  Complex z() const { return std::polar(std::exp(r), detail::kTwoPi * t); }
  static LogPoint of(Complex z) { return {std::log(std::abs(z)), Angle::reduce(std::arg(z) / detail::kTwoPi).value}; }
};

/// g in logarithmic coordinates. On r = 0 this is exactly the circle map.
inline LogPoint g_log_step(const ComplexParams& params, LogPoint p) {
  const double theta = detail::kTwoPi * p.t;
  const double r = 2.0 * p.r + 2.0 * params.b * std::sinh(p.r) * std::cos(theta);
  const double t = 2.0 * p.t + params.a + (params.b / std::numbers::pi) * std::cosh(p.r) * std::sin(theta);
  return {r, Angle::reduce(t).value};
}

struct CriticalPoints {
  Complex inner;  // |inner| <= 1
  Complex outer;
};

/// Roots of b z^2 + 2 z + b, the critical points of g in C*.
inline CriticalPoints critical_points(double b) {
  if (b == 0.0) throw dynamics_error(ErrorKind::DegenerateB, "b = 0 has no critical points in C*");
  if (!(b > 0.0) || !std::isfinite(b)) throw dynamics_error(ErrorKind::Precondition, "critical_points needs b > 0");
  if (b <= 1.0) {
    const double s = std::sqrt((1.0 - b) * (1.0 + b));
    return {Complex{-b / (1.0 + s), 0.0}, Complex{-(1.0 + s) / b, 0.0}};
  }
  // Both roots on the unit circle; the upper one is listed first.
  const double s = std::sqrt((b - 1.0) * (b + 1.0));
  return {Complex{-1.0 / b, s / b}, Complex{-1.0 / b, -s / b}};
}

/// Recovers (a, b) from a negative real critical point omega and its image.
inline ComplexParams params_from_critical_data(Complex omega, Complex critical_value, double tol = 1e-9) {
  if (std::fabs(omega.imag()) > 1e-12 * std::abs(omega) || !(omega.real() < 0.0)) {
    throw dynamics_error(ErrorKind::InconsistentData, "critical point must be real and negative");
  }
  const double w = omega.real();
  const double b = -2.0 * w / (1.0 + w * w);
  const double base_log = 2.0 * std::log(-w) + b * (w - 1.0 / w);
  const Complex unit = critical_value * std::exp(-base_log);
  if (std::fabs(std::abs(unit) - 1.0) > tol) {
    throw dynamics_error(ErrorKind::InconsistentData, "critical value is not e^{2 pi i a} times the critical orbit factor");
  }
  return {Angle::reduce(std::arg(unit) / detail::kTwoPi).value, b};
}

/// General circle-symmetric map lambda z^2 e^{B z - conj(B)/z}, |lambda| = 1.
inline Complex symmetric_map_eval(Complex lambda_front, Complex b_complex, Complex z) {
  return lambda_front * z * z * std::exp(b_complex * z - std::conj(b_complex) / z);
}

struct CanonicalForm {
  ComplexParams params;
  Complex rotation;  // rho with rho^{-1} h(rho z) = g_{a,b}(z)
};

/// Unique rotation rho = |B|/B conjugating lambda z^2 e^{B z - conj(B)/z}
/// into the family with real positive b.
inline CanonicalForm canonicalize_rotation(Complex lambda_front, Complex b_complex) {
  if (std::abs(b_complex) == 0.0) throw dynamics_error(ErrorKind::Precondition, "b must be nonzero");
  const double modulus = std::abs(b_complex);
  const Complex rho = std::conj(b_complex) / modulus;
  const Complex front = rho * lambda_front;
  return {{Angle::reduce(std::arg(front) / detail::kTwoPi).value, modulus}, rho};
}

// Classification of a critical orbit.
struct CircleAttracting {
  Cycle cycle;
  Angle distinguished;
};
struct PairAttracting {
  int period = 0;
  Complex point;
  double multiplier_modulus = 0.0;
};
struct EscapeZero {};
struct EscapeInfinity {};
struct Undecided {};

using OrbitClass = std::variant<CircleAttracting, PairAttracting, EscapeZero, EscapeInfinity, Undecided>;

inline std::string_view orbit_tag(const OrbitClass& c) {
  static constexpr std::string_view names[] = {"CircleAttracting", "PairAttracting", "EscapeZero", "EscapeInfinity",
                                               "Undecided"};
  return names[c.index()];
}

namespace detail {

struct ComplexCycle {
  Complex point;
  int period;
  Complex multiplier;
};

inline std::optional<ComplexCycle> complex_newton_cycle(const ComplexParams& params, Complex z, int p) {
  try {
    Complex residual{};
    Complex deriv{1.0, 0.0};
    for (int it = 0; it < 60; ++it) {
      Complex w = z;
      deriv = {1.0, 0.0};
      for (int k = 0; k < p; ++k) {
        deriv *= g_derivative(params, w);
        w = g_eval(params, w);
      }
      residual = w - z;
      const Complex denom = deriv - 1.0;
      if (std::abs(denom) < 1e-12) return std::nullopt;
      const Complex step = residual / denom;
      z -= step;
      if (std::abs(step) <= 1e-14 * std::abs(z)) break;
    }
    Complex w = z;
    deriv = {1.0, 0.0};
    int exact = p;
    for (int k = 0; k < p; ++k) {
      deriv *= g_derivative(params, w);
      w = g_eval(params, w);
      if (k + 1 < p && p % (k + 1) == 0 && exact == p && std::abs(w - z) < 1e-8 * std::abs(z)) exact = k + 1;
    }
    if (!(std::abs(w - z) < 1e-9 * std::abs(z))) return std::nullopt;
    if (exact != p) {
      deriv = {1.0, 0.0};
      Complex u = z;
      for (int k = 0; k < exact; ++k) {
        deriv *= g_derivative(params, u);
        u = g_eval(params, u);
      }
    }
    return ComplexCycle{z, exact, deriv};
  } catch (const dynamics_error&) {
    return std::nullopt;
  }
}

inline std::optional<CircleAttracting> circle_cycle_from_orbit(const ComplexParams& params, double angle, int lag,
                                                               int step_index, const SolverConfig& cfg) {
  try {
    Cycle c = refine_cycle(params, Angle{angle}, lag, cfg);
    const auto [d, i] = c.nearest(angle);
    if (d < 1e-5 && std::fabs(c.multiplier) < 1.0 - cfg.root_tol) {
      const int p = c.period;
      const int idx = ((i - step_index) % p + p) % p;
      c.distinguished_index = idx;
      const Angle x = c.point(idx);
      return CircleAttracting{std::move(c), x};
    }
  } catch (const dynamics_error&) {
  }
  return std::nullopt;
}

}  // namespace detail

/// Classifies the forward orbit of `seed` under g.
inline OrbitClass classify_orbit_from(const ComplexParams& params, Complex seed, const SolverConfig& cfg) {
  constexpr double kOnCircle = 1e-6;
  LogPoint pt = LogPoint::of(seed);
  LogPoint anchor = pt;
  int anchor_step = 0;
  double capture = std::max(detail::kCaptureTol, cfg.cycle_tol);
  int on_circle_run = std::fabs(pt.r) < kOnCircle ? 1 : 0;
  for (int n = 1; n <= cfg.orbit_budget; ++n) {
    pt = g_log_step(params, pt);
    if (!(std::fabs(pt.r) <= cfg.escape_log_threshold)) {
      if (pt.r < 0) return EscapeZero{};
      return EscapeInfinity{};
    }
    on_circle_run = std::fabs(pt.r) < kOnCircle ? on_circle_run + 1 : 0;
    const int lag = n - anchor_step;
    const double dist = std::fabs(pt.r - anchor.r) + circle_distance(pt.t, anchor.t);
    if (dist < capture) {
      if (on_circle_run >= lag) {
        if (auto hit = detail::circle_cycle_from_orbit(params, pt.t, lag, n, cfg)) return std::move(*hit);
      } else if (auto cc = detail::complex_newton_cycle(params, pt.z(), lag)) {
        const double r = std::log(std::abs(cc->point));
        if (std::fabs(r) < 1e-8) {
          if (auto hit = detail::circle_cycle_from_orbit(params, pt.t, lag, n, cfg)) return std::move(*hit);
        } else if (std::abs(cc->multiplier) < 1.0 - cfg.root_tol) {
          return PairAttracting{cc->period, cc->point, std::abs(cc->multiplier)};
        }
      }
      capture = dist * 1e-2;
    }
    if (lag >= cfg.max_period) {
      anchor = pt;
      anchor_step = n;
    }
  }
  return Undecided{};
}

/// Classifies the orbit of the inner critical point.
inline OrbitClass classify_critical_orbit(const ComplexParams& params, const SolverConfig& cfg) {
  params.validate();
  if (!(params.b > 0.0)) throw dynamics_error(ErrorKind::Precondition, "classification needs b > 0");
  return classify_orbit_from(params, critical_points(params.b).inner, cfg);
}

/// Cycle point lying in the basin component of the critical points:
/// the limit of g^{np}(omega), matched to the nearest point of `cycle`.
/// Records the index in cycle.distinguished_index.
inline Angle distinguished_point(const ComplexParams& params, Cycle& cycle, const SolverConfig& cfg) {
  params.validate();
  constexpr double kCapture = 1e-6;
  const int p = cycle.period;
  LogPoint pt = LogPoint::of(critical_points(params.b).inner);
  for (int n = 0; n <= cfg.orbit_budget; ++n) {
    if (n > 0) pt = g_log_step(params, pt);
    if (!(std::fabs(pt.r) <= cfg.escape_log_threshold)) break;
    const auto [d, i] = cycle.nearest(pt.t);
    if (d + std::fabs(pt.r) >= kCapture) continue;
    // Confirm that the p-subsampled orbit stays at the same cycle point.
    LogPoint probe = pt;
    bool settled = true;
    for (int k = 0; k < 4 && settled; ++k) {
      for (int s = 0; s < p; ++s) probe = g_log_step(params, probe);
      settled = circle_distance(probe.t, cycle.point(i).value) + std::fabs(probe.r) < kCapture;
    }
    if (!settled) continue;
    const int idx = ((i - n) % p + p) % p;
    cycle.distinguished_index = idx;
    return cycle.point(idx);
  }
  throw dynamics_error(ErrorKind::NoConvergence, "critical orbit did not settle on the cycle within budget");
}

/// (g^p)'(z_0) along a circle cycle, as a complex number.
inline Complex complex_cycle_multiplier(const ComplexParams& params, const Cycle& cycle) {
  Complex m{1.0, 0.0};
  for (int i = 0; i < cycle.period; ++i) {
    m *= g_derivative(params, std::polar(1.0, detail::kTwoPi * cycle.point(i).value));
  }
  return m;
}

}  // namespace tongue

#endif  // TONGUE_COMPLEX_MAP_HPP
