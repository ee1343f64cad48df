#ifndef TONGUE_CYCLE_FINDER_HPP
#define TONGUE_CYCLE_FINDER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "tongue/circle_map.hpp"
#include "tongue/config.hpp"

namespace tongue {

/// Periodic orbit of the circle map, stored through its lift:
/// lift_points[i+1] = F(lift_points[i]) and F(lift_points[p-1]) = lift_points[0] + shift.
struct Cycle {
  int period = 1;
  std::vector<double> lift_points;
  std::int64_t shift = 0;
  double multiplier = 0.0;
  std::optional<int> distinguished_index;

  Angle point(int i) const { return Angle::reduce(lift_points.at(static_cast<std::size_t>(i))); }

  /// Circle distance from x to the nearest cycle point, and that point's index.
  std::pair<double, int> nearest(double x) const {
    double best = std::numeric_limits<double>::infinity();
    int index = 0;
    for (int i = 0; i < period; ++i) {
      const double d = circle_distance(point(i).value, x);
      if (d < best) {
        best = d;
        index = i;
      }
    }
    return {best, index};
  }

  /// Same orbit as a set mod 1, within tol.
  bool same_orbit(const Cycle& other, double tol) const {
    if (other.period != period) return false;
    for (int i = 0; i < period; ++i) {
      if (other.nearest(point(i).value).first > tol) return false;
    }
    return true;
  }
};

namespace detail {

// |lambda - 1| below this at a converged root is treated as a parabolic point.
inline constexpr double kNeutralGap = 1e-6;
// Orbit-to-anchor distance that triggers a refinement attempt.
inline constexpr double kCaptureTol = 1e-7;
// Chaotic orbits are abandoned early once a whole block of steps, and the
// running average, expand at more than twice the Lyapunov floor.
inline constexpr int kChaosBlock = 1024;
inline constexpr int kChaosMinSteps = 4096;

enum class NewtonStatus { Converged, Neutral, Failed };

template <FamilyParams P>
struct ReturnResidual {
  const P& params;
  int p;
  double m;

  std::pair<double, double> operator()(double x) const {
    const LiftJet jet = iterate_lift_jet(params, x, p);
    return {jet.value - x - m, jet.derivative - 1.0};
  }
};

template <class Fn>
NewtonStatus newton_root(const Fn& residual, double start, double tol, double& root) {
  double x = start;
  double last_step = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 64; ++it) {
    const auto [g, gp] = residual(x);
    if (!std::isfinite(g) || !std::isfinite(gp)) return NewtonStatus::Failed;
    if (std::fabs(gp) < kNeutralGap * 1e-3) {
      if (std::fabs(g) < tol) {
        root = x;
        return NewtonStatus::Neutral;
      }
      return NewtonStatus::Failed;
    }
    const double step = g / gp;
    x -= step;
    if (std::fabs(x - start) > 0.5) return NewtonStatus::Failed;
    last_step = std::fabs(step);
    if (last_step <= 1e-14 * std::max(1.0, std::fabs(x))) break;
  }
  const auto [g, gp] = residual(x);
  if (!(std::fabs(g) < tol) || !(last_step < 1e-8)) return NewtonStatus::Failed;
  root = x;
  return std::fabs(gp) < kNeutralGap ? NewtonStatus::Neutral : NewtonStatus::Converged;
}

// Newton with bisection fallback inside a sign-change bracket.
template <class Fn>
NewtonStatus safeguarded_root(const Fn& residual, double start, double tol, double& root) {
  double lo = 0, hi = 0, glo = 0;
  bool bracketed = false;
  for (double h = 1e-6; h <= 0.5; h *= 2.0) {
    const double gl = residual(start - h).first;
    const double gr = residual(start + h).first;
    if (std::isfinite(gl) && std::isfinite(gr) && (gl <= 0) != (gr <= 0)) {
      lo = start - h;
      hi = start + h;
      glo = gl;
      bracketed = true;
      break;
    }
  }
  if (!bracketed) return NewtonStatus::Failed;
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const auto [g, gp] = residual(x);
    if ((g <= 0) == (glo <= 0)) {
      lo = x;
      glo = g;
    } else {
      hi = x;
    }
    double next = (gp != 0.0) ? x - g / gp : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::fabs(next - x);
    x = next;
    if (step <= 1e-14 * std::max(1.0, std::fabs(x)) || hi - lo <= 1e-15 * std::max(1.0, std::fabs(x))) break;
  }
  const auto [g, gp] = residual(x);
  if (!(std::fabs(g) < tol)) return NewtonStatus::Failed;
  root = x;
  return std::fabs(gp) < kNeutralGap ? NewtonStatus::Neutral : NewtonStatus::Converged;
}

template <FamilyParams P>
Cycle build_cycle(const P& params, double root, int p) {
  Cycle c;
  const double x0 = Angle::reduce(root).value;
  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(p));
  pts.push_back(x0);
  for (int i = 1; i < p; ++i) pts.push_back(eval_lift(params, pts.back()));

  int exact = p;
  for (int q = 1; q < p; ++q) {
    if (circle_distance(pts[static_cast<std::size_t>(q)], x0) < 1e-8) {
      if (p % q != 0) {
        throw dynamics_error(ErrorKind::WrongPeriod, "orbit returns after " + std::to_string(q) +
                                                         " steps, which does not divide " + std::to_string(p));
      }
      exact = q;
      break;
    }
  }
  pts.resize(static_cast<std::size_t>(exact));
  c.period = exact;
  c.lift_points = std::move(pts);
  c.shift = static_cast<std::int64_t>(std::llround(eval_lift(params, c.lift_points.back()) - x0));
  c.multiplier = 1.0;
  for (double x : c.lift_points) c.multiplier *= eval_derivative(params, x);
  return c;
}

}  // namespace detail

/// Newton refinement of F^p(X) - X - m = 0 near x_guess, m fixed from the
/// guess. A root whose orbit closes earlier is returned at its exact period.
template <FamilyParams P>
Cycle refine_cycle(const P& params, Angle x_guess, int p, const SolverConfig& cfg) {
  if (p < 1 || p > 62) throw dynamics_error(ErrorKind::Precondition, "period must be in [1,62]");
  const double start = x_guess.value;
  const double m = std::nearbyint(iterate_lift(params, start, p) - start);
  const detail::ReturnResidual<P> residual{params, p, m};

  double root = start;
  auto status = detail::newton_root(residual, start, cfg.root_tol, root);
  if (status == detail::NewtonStatus::Failed) status = detail::safeguarded_root(residual, start, cfg.root_tol, root);
  if (status == detail::NewtonStatus::Neutral) {
    throw dynamics_error(ErrorKind::NoConvergence, "return map derivative is ~1 (parabolic cycle)");
  }
  if (status == detail::NewtonStatus::Failed) {
    throw dynamics_error(ErrorKind::NoConvergence, "Newton iteration did not converge");
  }
  return detail::build_cycle(params, root, p);
}

/// Outcome of following one orbit, with what the caller needs to decide
/// between "no attractor" and "undecided".
struct CycleDetection {
  std::optional<Cycle> cycle;
  double lyapunov = 0.0;
  bool near_neutral = false;
  int iterations = 0;
};

/// Follows the circle orbit of `seed` for at most `budget` steps, watching
/// for returns within max_period steps and refining each candidate.
template <FamilyParams P>
CycleDetection detect_attracting_cycle(const P& params, Angle seed, int budget, const SolverConfig& cfg) {
  CycleDetection out;
  double y = seed.value;
  double anchor = y;
  int anchor_step = 0;
  double capture = std::max(detail::kCaptureTol, cfg.cycle_tol);
  double log_sum = 0.0;
  double prod = 1.0;
  double block_start = 0.0;
  bool stopped_early = false;
  int n = 0;
  for (n = 1; n <= budget; ++n) {
    prod *= std::max(std::fabs(eval_derivative(params, y)), 1e-300);
    if (prod < 1e-150 || prod > 1e150) {
      log_sum += std::log(prod);
      prod = 1.0;
    }
    y = step_with_carry(params, y).next;
    const int lag = n - anchor_step;
    const double dist = circle_distance(y, anchor);
    if (dist < capture) {
      try {
        Cycle c = refine_cycle(params, Angle{y}, lag, cfg);
        if (c.nearest(y).first < 1e-5) {
          if (std::fabs(c.multiplier) < 1.0 - cfg.root_tol) {
            out.cycle = std::move(c);
            break;
          }
          if (std::fabs(c.multiplier) < 1.0 + detail::kNeutralGap) out.near_neutral = true;
        }
      } catch (const dynamics_error& e) {
        if (e.kind() == ErrorKind::NoConvergence) out.near_neutral = true;
      }
      capture = dist * 1e-2;
    }
    if (lag >= cfg.max_period) {
      anchor = y;
      anchor_step = n;
    }
    if (n % detail::kChaosBlock == 0) {
      const double total = log_sum + std::log(prod);
      const double block = (total - block_start) / detail::kChaosBlock;
      block_start = total;
      if (n >= detail::kChaosMinSteps && !out.near_neutral && block > 2.0 * cfg.lyapunov_floor &&
          total / n > 2.0 * cfg.lyapunov_floor) {
        stopped_early = true;
        break;
      }
    }
  }
  out.iterations = stopped_early ? n : std::min(n, budget);
  out.lyapunov = (log_sum + std::log(prod)) / std::max(1, out.iterations);
  return out;
}

/// Seed x = 1/2 first (minimal derivative), then a 16-point grid when the
/// first orbit neither found a cycle nor looked chaotic.
template <FamilyParams P>
CycleDetection search_attracting_cycle(const P& params, const SolverConfig& cfg) {
  CycleDetection det = detect_attracting_cycle(params, Angle{0.5}, cfg.max_transient, cfg);
  if (det.cycle || det.near_neutral || det.lyapunov > cfg.lyapunov_floor) return det;
  const int budget = std::max(1, cfg.max_transient / 16);
  for (int k = 0; k < 16; ++k) {
    CycleDetection alt = detect_attracting_cycle(params, Angle{(k + 0.25) / 16.0}, budget, cfg);
    if (alt.cycle) return alt;
    det.near_neutral = det.near_neutral || alt.near_neutral;
  }
  return det;
}

/// Attracting cycle of f_{a,b} on the circle, if one is found within budget.
/// For b <= 1/2 every cycle has multiplier >= (2 - 2b)^p >= 1.
inline std::optional<Cycle> find_attracting_cycle(const CircleParams& params, const SolverConfig& cfg) {
  params.validate();
  if (params.b <= 0.5) return std::nullopt;
  return search_attracting_cycle(params, cfg).cycle;
}

/// Single-seed variant, used to cross-check uniqueness of the attractor.
inline std::optional<Cycle> find_attracting_cycle_from(const CircleParams& params, Angle seed,
                                                       const SolverConfig& cfg) {
  params.validate();
  if (params.b <= 0.5) return std::nullopt;
  return detect_attracting_cycle(params, seed, cfg.max_transient, cfg).cycle;
}

}  // namespace tongue

#endif  // TONGUE_CYCLE_FINDER_HPP
