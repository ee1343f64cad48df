#ifndef TONGUE_SEMICONJUGACY_HPP
#define TONGUE_SEMICONJUGACY_HPP

// Monotone semiconjugacy phi_{a,b} of the double standard map onto the
// doubling map D(x) = 2x mod 1, phi(X) = lim F^n(X) / 2^n, and the binary
// rationals k/(2^p - 1) it sends attracting cycles to.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "tongue/circle_map.hpp"
#include "tongue/config.hpp"

namespace tongue {

/// Periodic point k/(2^p - 1) of the doubling map, in canonical form:
/// p is the exact period and 0 <= k < 2^p - 1.
class BinaryType {
 public:
  BinaryType() = default;

  /// Canonicalizes k/(2^p - 1) mod 1 down to its exact period.
  static BinaryType canonical(std::uint64_t k, int p) {
    if (p < 1 || p > 62) throw dynamics_error(ErrorKind::Precondition, "type period must be in [1,62]");
    const std::uint64_t n = mersenne(p);
    k %= n;
    for (int q = 1; q < p; ++q) {
      if (p % q != 0) continue;
      // (2^p - 1) / (2^q - 1) = 1 + 2^q + ... ; tau (2^q - 1) is integral iff it divides k
      const std::uint64_t s = n / mersenne(q);
      if (k % s == 0) return BinaryType(k / s, q);
    }
    return BinaryType(k, p);
  }

  /// Parses a reduced or unreduced fraction num/den with odd den.
  static BinaryType from_fraction(std::int64_t num, std::int64_t den) {
    if (den <= 0 || den % 2 == 0) {
      throw dynamics_error(ErrorKind::Precondition, "type denominator must be odd and positive");
    }
    std::int64_t r = ((num % den) + den) % den;
    const std::int64_t g = std::gcd(r, den);
    const std::uint64_t d = static_cast<std::uint64_t>(den / (g == 0 ? 1 : g));
    r /= (g == 0 ? 1 : g);
    for (int p = 1; p <= 62; ++p) {
      const std::uint64_t n = mersenne(p);
      if (n % d == 0) return canonical(static_cast<std::uint64_t>(r) * (n / d), p);
    }
    throw dynamics_error(ErrorKind::Precondition, "type period exceeds 62");
  }

  static BinaryType parse(const std::string& text) {
    const auto slash = text.find('/');
    if (slash == std::string::npos) throw dynamics_error(ErrorKind::Precondition, "type must look like K/D, got " + text);
    std::size_t used_num = 0, used_den = 0;
    std::int64_t num = 0, den = 0;
    try {
      num = std::stoll(text.substr(0, slash), &used_num);
      den = std::stoll(text.substr(slash + 1), &used_den);
    } catch (const std::exception&) {
      throw dynamics_error(ErrorKind::Precondition, "type must look like K/D, got " + text);
    }
    if (used_num != slash || used_den != text.size() - slash - 1) {
      throw dynamics_error(ErrorKind::Precondition, "type must look like K/D, got " + text);
    }
    return from_fraction(num, den);
  }

  std::uint64_t k() const { return k_; }
  int period() const { return p_; }
  std::uint64_t denominator() const { return mersenne(p_); }
  double value() const { return static_cast<double>(k_) / static_cast<double>(mersenne(p_)); }

  /// Lowest-terms fraction, e.g. "0/1", "1/3", "1/5".
  std::string to_string() const {
    const std::uint64_t n = mersenne(p_);
    const std::uint64_t g = std::gcd(k_, n);
    return std::to_string(k_ / g) + "/" + std::to_string(n / g);
  }

  /// D(tau) = 2 tau mod 1.
  BinaryType doubled() const { return BinaryType((2 * k_) % mersenne(p_), p_); }

  friend bool operator==(const BinaryType&, const BinaryType&) = default;
  friend auto operator<=>(const BinaryType& l, const BinaryType& r) {
    if (auto c = l.p_ <=> r.p_; c != 0) return c;
    return l.k_ <=> r.k_;
  }

  static std::uint64_t mersenne(int p) { return (std::uint64_t{1} << p) - 1; }

 private:
  BinaryType(std::uint64_t k, int p) : k_(k), p_(p) {}

  std::uint64_t k_ = 0;
  int p_ = 1;
};

/// Unreduced lift of phi at X, truncated after `depth` steps.
///
/// The orbit is followed on the circle and the integer carries d_j of each
/// lift step are accumulated as sum d_j 2^-(j+1); this equals F^n(X)/2^n
/// without ever forming the 2^n-sized lift.
template <FamilyParams P>
double phi_lift(const P& params, double X, int depth) {
  const double whole = std::floor(X);
  double y = X - whole;
  double sum = 0.0;
  double scale = 0.5;
  for (int j = 0; j < depth; ++j) {
    const CarryStep s = step_with_carry(params, y);
    sum += s.carry * scale;
    scale *= 0.5;
    y = s.next;
  }
  return whole + sum + 2.0 * scale * y;
}

/// phi_{a,b}(x) mod 1. Truncation error is at most (1 + 1/pi) 2^(1-depth).
template <FamilyParams P>
Angle phi_eval(const P& params, Angle x, const SolverConfig& cfg) {
  if (cfg.phi_depth < 1) throw dynamics_error(ErrorKind::Precondition, "phi_depth must be >= 1");
  return Angle::reduce(phi_lift(params, x.value, cfg.phi_depth));
}

/// Type of a point x0 of an attracting cycle of period p: phi(x0) rounded
/// to the nearest k/(2^p - 1).
template <FamilyParams P>
BinaryType type_from_point(const P& params, Angle x0, int p, const SolverConfig& cfg) {
  if (p < 1 || p > 62) throw dynamics_error(ErrorKind::Precondition, "period must be in [1,62]");
  const double tau = phi_eval(params, x0, cfg).value;
  const double n = static_cast<double>(BinaryType::mersenne(p));
  const double scaled = tau * n;
  const double k = std::nearbyint(scaled);
  const double residual = std::fabs(scaled - k) / n;
  if (!(residual < cfg.root_tol * std::ldexp(1.0, p))) {
    throw dynamics_error(ErrorKind::ResidualTooLarge,
                         "phi(x0) = " + std::to_string(tau) + " is not within tolerance of k/(2^" +
                             std::to_string(p) + "-1)");
  }
  return BinaryType::canonical(static_cast<std::uint64_t>(k) % BinaryType::mersenne(p), p);
}

}  // namespace tongue

#endif  // TONGUE_SEMICONJUGACY_HPP
