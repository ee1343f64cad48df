#ifndef TONGUE_CIRCLE_MAP_HPP
#define TONGUE_CIRCLE_MAP_HPP

// Real double standard family
//
//   F_{a,b}(X) = 2X + a + (b/pi) sin(2 pi X)
//
// and its projection f_{a,b} to the circle R/Z. With this sign the b = 1
// critical point sits at x = 1/2. The other common sign (minus sin) is the
// same family after x -> x + 1/2, a -> a + 1/2.

#include <cmath>
#include <concepts>
#include <numbers>

#include "tongue/config.hpp"

namespace tongue {

/// Point of the circle R/Z, always stored in [0, 1).
struct Angle {
  double value = 0.0;

  static Angle reduce(double v) {
    double r = std::fmod(v, 1.0);
    if (r < 0.0) r += 1.0;
    // -tiny + 1 rounds to 1
    if (r >= 1.0) r = 0.0;
    return Angle{r};
  }

  friend bool operator==(const Angle&, const Angle&) = default;
};

/// Shortest distance between two points of R/Z.
inline double circle_distance(double x, double y) {
  double d = std::fmod(std::fabs(x - y), 1.0);
  return d > 0.5 ? 1.0 - d : d;
}

/// Parameters (a, b) of the real family. `a` is kept as a raw real so that
/// lift identities in a (a -> a + 1) can be expressed; the circle map only
/// depends on a mod 1.
struct CircleParams {
  double a = 0.0;
  double b = 0.0;

  void validate() const {
    if (!std::isfinite(a) || !(b >= 0.0 && b <= 1.0)) {
      throw dynamics_error(ErrorKind::Precondition, "circle parameters need finite a and b in [0,1]");
    }
  }

  Angle angle() const { return Angle::reduce(a); }
};

/// Anything carrying the (a, b) pair of the family: the real parameters and
/// the complex ones (which allow b > 1) both qualify.
template <class P>
concept FamilyParams = requires(const P& p) {
  { p.a } -> std::convertible_to<double>;
  { p.b } -> std::convertible_to<double>;
};

namespace detail {
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

template <FamilyParams P>
double eval_lift(const P& params, double X) {
  // Reduce before the sine so F(X + 1) = F(X) + 2 holds to rounding.
  const double n = std::floor(X);
  const double r = X - n;
  return 2.0 * n + (2.0 * r + params.a + (params.b / std::numbers::pi) * std::sin(detail::kTwoPi * r));
}

template <FamilyParams P>
Angle eval_circle(const P& params, Angle x) {
  return Angle::reduce(eval_lift(params, x.value));
}

/// f'(x) = 2 + 2b cos(2 pi x). Bounded below by 2(1 - b).
template <FamilyParams P>
double eval_derivative(const P& params, double x) {
  return 2.0 + 2.0 * params.b * std::cos(detail::kTwoPi * x);
}

template <FamilyParams P>
double eval_derivative(const P& params, Angle x) {
  return eval_derivative(params, x.value);
}

template <FamilyParams P>
double eval_second_derivative(const P& params, double x) {
  return -2.0 * detail::kTwoPi * params.b * std::sin(detail::kTwoPi * x);
}

/// n-fold composition of the lift. The lift grows like 2^n, so this is for
/// moderate n; deep iteration goes through the circle orbit instead.
template <FamilyParams P>
double iterate_lift(const P& params, double X, int n) {
  if (n < 0) throw dynamics_error(ErrorKind::Precondition, "iterate_lift needs n >= 0");
  for (int i = 0; i < n; ++i) X = eval_lift(params, X);
  if (!std::isfinite(X)) throw dynamics_error(ErrorKind::Overflow, "lift left the floating range");
  return X;
}

/// Value and derivative of the p-fold lift at X.
struct LiftJet {
  double value;
  double derivative;
};

template <FamilyParams P>
LiftJet iterate_lift_jet(const P& params, double X, int n) {
  double d = 1.0;
  for (int i = 0; i < n; ++i) {
    d *= eval_derivative(params, X);
    X = eval_lift(params, X);
  }
  return {X, d};
}

/// One circle step that also reports the integer part discarded by the
/// reduction: F(y) = next + carry with next in [0, 1).
struct CarryStep {
  double next;
  double carry;
};

template <FamilyParams P>
CarryStep step_with_carry(const P& params, double y) {
  const double v = 2.0 * y + params.a + (params.b / std::numbers::pi) * std::sin(detail::kTwoPi * y);
  double carry = std::floor(v);
  double next = v - carry;
  if (next >= 1.0) {
    next = 0.0;
    carry += 1.0;
  }
  return {next, carry};
}

}  // namespace tongue

#endif  // TONGUE_CIRCLE_MAP_HPP
