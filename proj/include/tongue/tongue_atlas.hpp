#ifndef TONGUE_TONGUE_ATLAS_HPP
#define TONGUE_TONGUE_ATLAS_HPP

// Arnold tongues of the real family: membership, the b = 1 superattracting
// atlas, horizontal cross-sections, tips, raster connectivity and paths
// inside a tongue up to its superattracting parameter.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "tongue/circle_map.hpp"
#include "tongue/complex_map.hpp"
#include "tongue/config.hpp"
#include "tongue/cycle_finder.hpp"
#include "tongue/parallel.hpp"
#include "tongue/raster.hpp"
#include "tongue/semiconjugacy.hpp"

namespace tongue {

struct InTongue {
  BinaryType type;
  Cycle cycle;
};
struct NoAttractor {};

using TongueOutcome = std::variant<InTongue, NoAttractor, Undecided>;

struct TongueSample {
  CircleParams params;
  TongueOutcome outcome;

  const InTongue* in_tongue() const { return std::get_if<InTongue>(&outcome); }
  bool is_type(const BinaryType& t) const {
    const InTongue* hit = in_tongue();
    return hit != nullptr && hit->type == t;
  }
};

/// Type of (a, b): attracting cycle, distinguished point, then phi.
inline TongueSample classify_param(const CircleParams& params, const SolverConfig& cfg) {
  params.validate();
  TongueSample sample{params, NoAttractor{}};
  if (params.b <= 0.5) return sample;
  const CycleDetection det = search_attracting_cycle(params, cfg);
  if (!det.cycle) {
    if (det.near_neutral || det.lyapunov <= cfg.lyapunov_floor) sample.outcome = Undecided{};
    return sample;
  }
  Cycle cycle = *det.cycle;
  try {
    const Angle x0 = distinguished_point(ComplexParams{params.a, params.b}, cycle, cfg);
    const BinaryType type = type_from_point(params, x0, cycle.period, cfg);
    if (type.period() != cycle.period) {
      sample.outcome = Undecided{};
      return sample;
    }
    sample.outcome = InTongue{type, std::move(cycle)};
  } catch (const dynamics_error&) {
    sample.outcome = Undecided{};
  }
  return sample;
}

struct AtlasEntry {
  BinaryType type;
  Angle a_super;
};

/// The 2^p - 1 parameters a with 1/2 periodic of period dividing p for
/// f_{a,1}. a -> F^p_{a,1}(1/2) is strictly increasing with slope >= 1 and
/// gains 2^p - 1 over one turn of a, so each integer level is hit once.
inline std::vector<AtlasEntry> superattracting_atlas(int p, const SolverConfig& cfg) {
  if (p < 1 || p > 30) throw dynamics_error(ErrorKind::Precondition, "atlas period must be in [1,30]");
  const std::uint64_t count = BinaryType::mersenne(p);
  auto level = [p](double a) { return iterate_lift(CircleParams{a, 1.0}, 0.5, p) - 0.5; };
  const double first = std::ldexp(1.0, p - 1);  // level(0) = 2^{p-1} - 1/2
  std::vector<AtlasEntry> out;
  out.reserve(count);
  for (std::uint64_t j = 0; j < count; ++j) {
    const double target = first + static_cast<double>(j);
    double lo = 0.0, hi = 1.0;
    if (!(level(lo) < target && level(hi) > target)) {
      throw dynamics_error(ErrorKind::BisectionFailure, "level " + std::to_string(target) + " not bracketed");
    }
    for (int it = 0; it < 64 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (level(mid) < target ? lo : hi) = mid;
    }
    const double a = 0.5 * (lo + hi);
    const CircleParams params{a, 1.0};
    int exact = p;
    Angle x{0.5};
    for (int q = 1; q < p; ++q) {
      x = eval_circle(params, x);
      if (p % q == 0 && circle_distance(x.value, 0.5) < 1e-7) {
        exact = q;
        break;
      }
    }
    out.push_back({type_from_point(params, Angle{0.5}, exact, cfg), Angle::reduce(a)});
  }
  return out;
}

/// Superattracting parameter (a_tau, 1) of one type.
inline AtlasEntry atlas_entry(const BinaryType& type, const SolverConfig& cfg) {
  for (const AtlasEntry& e : superattracting_atlas(type.period(), cfg)) {
    if (e.type == type) return e;
  }
  throw dynamics_error(ErrorKind::BisectionFailure, "type " + type.to_string() + " missing from its atlas");
}

/// Interval [lo, hi] of a; hi may exceed 1 for a section wrapping past a = 0.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double a) const {
    const double shifted = lo + Angle::reduce(a - lo).value;
    return shifted >= lo && shifted <= hi;
  }
};

namespace detail {

inline bool is_member(const BinaryType& type, double a, double b, const SolverConfig& cfg) {
  return classify_param(CircleParams{Angle::reduce(a).value, b}, cfg).is_type(type);
}

// Bisection between a member and a non-member abscissa.
inline double bisect_edge(const BinaryType& type, double b, double inside, double outside, double tol,
                          const SolverConfig& cfg) {
  while (std::fabs(outside - inside) > tol) {
    const double mid = 0.5 * (inside + outside);
    (is_member(type, mid, b, cfg) ? inside : outside) = mid;
  }
  return 0.5 * (inside + outside);
}

// Walks from a member abscissa in direction dir with doubling steps until it
// leaves the tongue, then bisects.
inline double edge_from(const BinaryType& type, double b, double a_in, int dir, double h0, double tol,
                        const SolverConfig& cfg) {
  double inside = a_in;
  for (double h = h0; h <= 1.0; h *= 2.0) {
    const double probe = a_in + dir * h;
    if (!is_member(type, probe, b, cfg)) return bisect_edge(type, b, inside, probe, tol, cfg);
    inside = probe;
  }
  return a_in + dir * 0.5;
}

// Member runs of a cell scan over [a_lo, a_hi], with refined ends.
inline std::vector<Interval> scan_window(const BinaryType& type, double b, double a_lo, double a_hi, int cells,
                                         bool periodic, const SolverConfig& cfg) {
  const double step = (a_hi - a_lo) / cells;
  std::vector<std::uint8_t> member(static_cast<std::size_t>(cells), 0);
  parallel_for(cells, worker_count(), [&](int i) {
    member[static_cast<std::size_t>(i)] = is_member(type, a_lo + (i + 0.5) * step, b, cfg) ? 1 : 0;
  });
  auto center = [&](int i) { return a_lo + (i + 0.5) * step; };
  struct Run {
    int first, last;
  };
  std::vector<Run> runs;
  for (int i = 0; i < cells;) {
    if (!member[static_cast<std::size_t>(i)]) {
      ++i;
      continue;
    }
    int j = i;
    while (j + 1 < cells && member[static_cast<std::size_t>(j + 1)]) ++j;
    runs.push_back({i, j});
    i = j + 1;
  }
  if (runs.empty()) return {};
  if (periodic && runs.size() == 1 && runs[0].first == 0 && runs[0].last == cells - 1) {
    return {Interval{a_lo, a_hi}};
  }
  const double tol = cfg.root_tol;
  auto left_end = [&](const Run& r) {
    if (r.first > 0) return bisect_edge(type, b, center(r.first), center(r.first - 1), tol, cfg);
    if (periodic) return bisect_edge(type, b, center(0), center(cells - 1) - (a_hi - a_lo), tol, cfg);
    return edge_from(type, b, center(0), -1, step, tol, cfg);
  };
  auto right_end = [&](const Run& r) {
    if (r.last < cells - 1) return bisect_edge(type, b, center(r.last), center(r.last + 1), tol, cfg);
    if (periodic) return bisect_edge(type, b, center(cells - 1), center(0) + (a_hi - a_lo), tol, cfg);
    return edge_from(type, b, center(cells - 1), +1, step, tol, cfg);
  };
  std::vector<Interval> out;
  const bool wraps = periodic && runs.size() > 1 && runs.front().first == 0 && runs.back().last == cells - 1;
  for (std::size_t k = wraps ? 1 : 0; k < runs.size(); ++k) {
    if (wraps && k == runs.size() - 1) {
      out.push_back({left_end(runs.back()), right_end(runs.front()) + (a_hi - a_lo)});
    } else {
      out.push_back({left_end(runs[k]), right_end(runs[k])});
    }
  }
  return out;
}

inline std::optional<Interval> nearest_interval(const std::vector<Interval>& ivs, double a) {
  std::optional<Interval> best;
  double dist = 0;
  for (const Interval& iv : ivs) {
    const double d = iv.contains(a) ? 0.0 : std::min(circle_distance(iv.lo, a), circle_distance(iv.hi, a));
    if (!best || d < dist) {
      best = iv;
      dist = d;
    }
  }
  return best;
}

}  // namespace detail

/// Maximal a-intervals of the type-tau tongue at height b.
inline std::vector<Interval> cross_section(const BinaryType& type, double b, const SolverConfig& cfg) {
  if (!(b >= 0.0 && b <= 1.0)) throw dynamics_error(ErrorKind::Precondition, "cross_section needs b in [0,1]");
  if (b <= 0.5) return {};
  return detail::scan_window(type, b, 0.0, 1.0, cfg.section_cells, true, cfg);
}

/// Section interval through a, found by walking out from a (no grid scan).
/// `scale` is a guess of the interval width used for the first probes.
inline std::optional<Interval> interval_containing(const BinaryType& type, double b, double a, double scale,
                                                   const SolverConfig& cfg) {
  if (!detail::is_member(type, a, b, cfg)) return std::nullopt;
  const double h0 = std::max(scale / 8.0, 1e-9);
  const double tol = std::max(cfg.root_tol, scale * 1e-5);
  return Interval{detail::edge_from(type, b, a, -1, h0, tol, cfg), detail::edge_from(type, b, a, +1, h0, tol, cfg)};
}

namespace detail {

struct TipSearch {
  double b_tip;
  Interval section;
};

inline std::optional<Interval> local_section(const BinaryType& type, double b, const Interval& near, double gap,
                                             const SolverConfig& cfg) {
  const double half = near.width() + 2.0 * gap;
  const auto ivs = scan_window(type, b, near.mid() - half, near.mid() + half, 128, false, cfg);
  return nearest_interval(ivs, near.mid());
}

// Follows the tongue down from b = 1 and bisects on "section nonempty".
inline TipSearch tip_search(const BinaryType& type, const SolverConfig& cfg) {
  const AtlasEntry entry = atlas_entry(type, cfg);
  auto top = local_section(type, 1.0, Interval{entry.a_super.value, entry.a_super.value}, 1.0 / 64.0, cfg);
  if (!top) top = interval_containing(type, 1.0, entry.a_super.value, 1e-3, cfg);
  if (!top) return {1.0, Interval{entry.a_super.value, entry.a_super.value}};
  double b_hi = 1.0;
  Interval section = *top;
  const double db = 1.0 / 64.0;
  double b_lo = 0.5;
  while (b_hi - db > 0.5) {
    const double b = b_hi - db;
    auto next = local_section(type, b, section, db, cfg);
    if (!next) {
      b_lo = b;
      break;
    }
    b_hi = b;
    section = *next;
  }
  for (int it = 0; it < 40 && b_hi - b_lo > cfg.root_tol; ++it) {
    const double b = 0.5 * (b_lo + b_hi);
    if (auto next = local_section(type, b, section, b_hi - b, cfg)) {
      b_hi = b;
      section = *next;
    } else {
      b_lo = b;
    }
  }
  return {std::max(b_hi, 0.5), section};
}

}  // namespace detail

/// Lowest b at which the section of the tongue is nonempty at scan
/// resolution. Near-neutral cycles are excluded, so the value sits slightly
/// above the exact tip; it is never below 1/2.
inline double tongue_tip(const BinaryType& type, const SolverConfig& cfg) { return detail::tip_search(type, cfg).b_tip; }

struct Cusp {
  double a;
  double b;
  double x;
};

/// Exact tip as the cusp where both saddle-node boundaries meet:
/// F^p(X) - X - m = 0, (F^p)'(X) = 1, (F^p)''(X) = 0, solved by Newton in
/// (a, b, X) from the scanned tip.
namespace detail {

inline std::optional<Cusp> cusp_from(const BinaryType&, const TipSearch& ts, const SolverConfig& cfg) {
  const TongueSample s = classify_param(CircleParams{Angle::reduce(ts.section.mid()).value, ts.b_tip}, cfg);
  const InTongue* hit = s.in_tongue();
  if (hit == nullptr) return std::nullopt;
  const int p = hit->cycle.period;
  const double m = static_cast<double>(hit->cycle.shift);
  auto residual = [&](const std::array<double, 3>& v) {
    const CircleParams params{v[0], v[1]};
    double X = v[2], d1 = 1.0, d2 = 0.0;
    for (int i = 0; i < p; ++i) {
      const double f1 = eval_derivative(params, X);
      const double f2 = eval_second_derivative(params, X);
      d2 = f2 * d1 * d1 + f1 * d2;
      d1 *= f1;
      X = eval_lift(params, X);
    }
    return std::array<double, 3>{X - v[2] - m, d1 - 1.0, d2};
  };
  std::array<double, 3> v{s.params.a, s.params.b, hit->cycle.lift_points[0]};
  for (int it = 0; it < 50; ++it) {
    const auto r = residual(v);
    double jac[3][3];
    for (int j = 0; j < 3; ++j) {
      constexpr double h = 1e-7;
      auto vp = v, vm = v;
      vp[static_cast<std::size_t>(j)] += h;
      vm[static_cast<std::size_t>(j)] -= h;
      const auto rp = residual(vp), rm = residual(vm);
      for (int i = 0; i < 3; ++i) jac[i][j] = (rp[static_cast<std::size_t>(i)] - rm[static_cast<std::size_t>(i)]) / (2 * h);
    }
    // Cramer's rule for J dv = -r.
    auto det3 = [](double m3[3][3]) {
      return m3[0][0] * (m3[1][1] * m3[2][2] - m3[1][2] * m3[2][1]) -
             m3[0][1] * (m3[1][0] * m3[2][2] - m3[1][2] * m3[2][0]) +
             m3[0][2] * (m3[1][0] * m3[2][1] - m3[1][1] * m3[2][0]);
    };
    const double det = det3(jac);
    if (!std::isfinite(det) || std::fabs(det) < 1e-300) return std::nullopt;
    std::array<double, 3> dv{};
    for (int j = 0; j < 3; ++j) {
      double mj[3][3];
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) mj[i][k] = (k == j) ? -r[static_cast<std::size_t>(i)] : jac[i][k];
      dv[static_cast<std::size_t>(j)] = det3(mj) / det;
    }
    double step = 0;
    for (int j = 0; j < 3; ++j) {
      v[static_cast<std::size_t>(j)] += dv[static_cast<std::size_t>(j)];
      step = std::max(step, std::fabs(dv[static_cast<std::size_t>(j)]));
    }
    if (step < 1e-13) break;
  }
  const auto r = residual(v);
  if (!(std::fabs(r[0]) < 1e-9 && std::fabs(r[1]) < 1e-7 && std::fabs(r[2]) < 1e-5)) return std::nullopt;
  if (!(v[1] > 0.5 - 1e-9 && v[1] <= ts.b_tip + 1e-9 && ts.b_tip - v[1] < 0.05)) return std::nullopt;
  return Cusp{Angle::reduce(v[0]).value, std::max(v[1], 0.5), v[2]};
}

}  // namespace detail

inline std::optional<Cusp> tongue_cusp(const BinaryType& type, const SolverConfig& cfg) {
  return detail::cusp_from(type, detail::tip_search(type, cfg), cfg);
}

/// Best available tip: the cusp when Newton converges, else the scanned tip.
struct TipLocation {
  double a;
  double b;
  bool from_cusp;
};

inline TipLocation locate_tip(const BinaryType& type, const SolverConfig& cfg) {
  const detail::TipSearch ts = detail::tip_search(type, cfg);
  if (auto cusp = detail::cusp_from(type, ts, cfg)) return {cusp->a, cusp->b, true};
  return {ts.section.mid(), ts.b_tip, false};
}

struct TipExponent {
  double exponent = 0.0;
  double residual = 0.0;
  double b_tip = 0.0;
  std::vector<std::pair<double, double>> samples;  // (b - b_tip, section width)
};

/// Least-squares slope of log(width) against log(b - b_tip) for b between
/// b_tip + 2e-3 and b_tip + 2e-2. Exploratory; nothing is asserted about it.
inline TipExponent tip_exponent_from(const BinaryType& type, double b_tip, double a_center, int samples,
                                     const SolverConfig& cfg) {
  if (samples < 2) throw dynamics_error(ErrorKind::Precondition, "need at least two sample heights");
  TipExponent out;
  out.b_tip = b_tip;
  constexpr double kLow = 2e-3, kHigh = 2e-2;
  std::optional<Interval> tracked;
  double previous_b = 0;
  for (int k = samples - 1; k >= 0; --k) {
    const double delta = kLow * std::pow(kHigh / kLow, static_cast<double>(k) / (samples - 1));
    const double b = b_tip + delta;
    if (b > 1.0) continue;
    if (!tracked) {
      tracked = detail::nearest_interval(detail::scan_window(type, b, a_center - 0.1, a_center + 0.1, 2048, false, cfg),
                                         a_center);
    } else {
      tracked = detail::local_section(type, b, *tracked, previous_b - b, cfg);
    }
    previous_b = b;
    if (!tracked) break;
    if (tracked->width() > 0) out.samples.emplace_back(delta, tracked->width());
  }
  if (out.samples.size() < 5) {
    throw dynamics_error(ErrorKind::InsufficientData,
                         "only " + std::to_string(out.samples.size()) + " usable section widths above the tip");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(out.samples.size());
  for (const auto& [d, w] : out.samples) {
    const double x = std::log(d), y = std::log(w);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  out.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - out.exponent * sx) / n;
  double ss = 0;
  for (const auto& [d, w] : out.samples) {
    const double e = std::log(w) - (intercept + out.exponent * std::log(d));
    ss += e * e;
  }
  out.residual = std::sqrt(ss / n);
  return out;
}

inline TipExponent tip_exponent_estimate(const BinaryType& type, const SolverConfig& cfg, int samples = 8) {
  const TipLocation tip = locate_tip(type, cfg);
  return tip_exponent_from(type, tip.b, tip.a, samples, cfg);
}

// Rasters and connectivity.

enum class CellKind : std::uint8_t { NoAttractor, Undecided, InTongue };

struct TongueCell {
  CellKind kind = CellKind::NoAttractor;
  BinaryType type;
  double multiplier = 0.0;
};

struct TongueRaster {
  Grid grid;
  std::vector<TongueCell> cells;

  const TongueCell& at(int row, int col) const { return cells[static_cast<std::size_t>(row) * grid.width + col]; }
};

inline TongueCell classify_cell(double a, double b, const SolverConfig& cfg) {
  const TongueSample s = classify_param(CircleParams{a, b}, cfg);
  if (const InTongue* hit = s.in_tongue()) return {CellKind::InTongue, hit->type, hit->cycle.multiplier};
  if (std::holds_alternative<Undecided>(s.outcome)) return {CellKind::Undecided, {}, 0.0};
  return {};
}

/// classify_param at every cell center; rows are processed in parallel and
/// each writes only its own slots.
inline TongueRaster rasterize_tongues(const Grid& grid, const SolverConfig& cfg, unsigned threads) {
  if (!grid.window.valid() || grid.width < 1 || grid.height < 1) {
    throw dynamics_error(ErrorKind::Precondition, "raster window must be nondegenerate with positive size");
  }
  if (grid.window.b_min < 0.0 || grid.window.b_max > 1.0) {
    throw dynamics_error(ErrorKind::Precondition, "tongue rasters need b within [0,1]");
  }
  TongueRaster raster{grid, std::vector<TongueCell>(static_cast<std::size_t>(grid.width) * grid.height)};
  parallel_for(grid.height, threads, [&](int row) {
    const double b = grid.b_at(row);
    for (int col = 0; col < grid.width; ++col) {
      raster.cells[static_cast<std::size_t>(row) * grid.width + col] =
          classify_cell(Angle::reduce(grid.a_at(col)).value, b, cfg);
    }
  });
  return raster;
}

struct ConnectivityReport {
  BinaryType type;
  bool resolution_ok = false;
  bool pass = false;
  int components = 0;
  int center_components = 0;  // before sub-cell refinement
  bool anchor_in_component = false;
  long member_pixels = 0;
  long traced_cells = 0;
  double undecided_fraction = 0.0;
  double a_anchor = 0.0;
};

namespace detail {

inline constexpr int kTraceStepsPerRow = 4;
inline constexpr int kTraceMaxSteps = 1 << 16;

// Section interval near `guess`, located to a fraction of its own width.
inline std::optional<Interval> trace_section(const BinaryType& type, double b, double guess, double reach,
                                             const SolverConfig& cfg) {
  double seed = guess;
  if (!is_member(type, seed, b, cfg)) {
    constexpr int kCells = 64;
    bool found = false;
    for (int k = 1; k <= kCells / 2 && !found; ++k) {
      for (int sgn : {-1, 1}) {
        const double probe = guess + sgn * reach * k / (kCells / 2);
        if (is_member(type, probe, b, cfg)) {
          seed = probe;
          found = true;
          break;
        }
      }
    }
    if (!found) return std::nullopt;
  }
  const double h0 = std::max(reach / 64.0, 1e-13);
  auto edge = [&](int dir) {
    double inside = seed, outside = seed;
    for (double h = h0;; h *= 2.0) {
      outside = seed + dir * h;
      if (!is_member(type, outside, b, cfg)) break;
      inside = outside;
      if (h > 0.5) return inside;
    }
    const double tol = std::max(1e-13, 0.02 * std::fabs(outside - seed));
    while (std::fabs(outside - inside) > tol) {
      const double mid = 0.5 * (inside + outside);
      (is_member(type, mid, b, cfg) ? inside : outside) = mid;
    }
    return inside;
  };
  return Interval{edge(-1), edge(+1)};
}

// Follows a tongue vertically from the member point (a, b), marking every
// cell that contains a verified member point, until the tongue ends, leaves
// the window, or reaches a cell of another component.
inline long trace_tongue(const Grid& g, const BinaryType& type, double a, double b, int dir,
                         std::vector<std::uint8_t>& member, const ComponentLabels& labels, int own_label,
                         const SolverConfig& cfg) {
  const double row_h = (g.window.b_max - g.window.b_min) / g.height;
  const double col_w = (g.window.a_max - g.window.a_min) / g.width;
  const double db = row_h / kTraceStepsPerRow;
  double slope = 0.0;
  long marked = 0;
  std::optional<Interval> prev = trace_section(type, b, a, col_w, cfg);
  if (!prev) return 0;
  for (int step = 0; step < kTraceMaxSteps; ++step) {
    const double nb = b + dir * db;
    if (nb <= std::max(g.window.b_min, 0.5) || nb >= g.window.b_max) break;
    const double guess = prev->mid() + slope * dir * db;
    const double reach = 2.0 * prev->width() + 0.25 * col_w;
    auto next = trace_section(type, nb, guess, reach, cfg);
    if (!next) break;
    slope = (next->mid() - prev->mid()) / (dir * db);
    prev = next;
    b = nb;
    const double am = next->mid();
    if (am < g.window.a_min || am >= g.window.a_max) break;
    const auto [row, col] = g.cell_of(am, b);
    const auto idx = static_cast<std::size_t>(row) * g.width + col;
    const int lab = labels.label[idx];
    if (lab >= 0 && lab != own_label) break;
    if (!member[idx]) {
      member[idx] = 1;
      ++marked;
    }
  }
  return marked;
}

}  // namespace detail

/// PASS iff the cells met by the tongue of `type` form exactly one
/// 4-connected component containing the cell of (a_anchor, 1).
///
/// Membership starts from the center samples of the raster. When those split
/// into several components, each component is traced up from its top cell
/// and down from its bottom cell through the tongue itself, so that parts
/// thinner than a pixel still mark the cells they cross.
inline ConnectivityReport connectivity_check(const TongueRaster& raster, const BinaryType& type, double a_anchor,
                                             const SolverConfig& cfg) {
  ConnectivityReport rep;
  rep.type = type;
  rep.a_anchor = a_anchor;
  const Grid& g = raster.grid;
  rep.resolution_ok = g.width >= 64 && g.height >= 64;
  const std::size_t n_cells = raster.cells.size();
  std::vector<std::uint8_t> member(n_cells, 0);
  long undecided = 0;
  for (std::size_t i = 0; i < n_cells; ++i) {
    const TongueCell& c = raster.cells[i];
    if (c.kind == CellKind::Undecided) ++undecided;
    if (c.kind == CellKind::InTongue && c.type == type) member[i] = 1;
  }
  rep.undecided_fraction = static_cast<double>(undecided) / static_cast<double>(n_cells);

  double a = a_anchor;
  while (a < g.window.a_min) a += 1.0;
  while (a >= g.window.a_max && a - 1.0 >= g.window.a_min) a -= 1.0;
  const auto [anchor_row, anchor_col] = g.cell_of(a, 1.0);
  auto label = [&] {
    return label_components(g.width, g.height,
                            [&](int r, int c) { return member[static_cast<std::size_t>(r) * g.width + c] != 0; });
  };

  ComponentLabels labels = label();
  rep.center_components = labels.count;
  if (rep.resolution_ok && labels.count > 1) {
    struct Ends {
      int top_row = -1, top_col = 0, bottom_row = -1, bottom_col = 0;
    };
    std::vector<Ends> ends(static_cast<std::size_t>(labels.count));
    for (int r = 0; r < g.height; ++r) {
      for (int c = 0; c < g.width; ++c) {
        const int lab = labels.at(r, c);
        if (lab < 0) continue;
        Ends& e = ends[static_cast<std::size_t>(lab)];
        if (e.top_row < 0) {
          e.top_row = r;
          e.top_col = c;
        }
        e.bottom_row = r;
        e.bottom_col = c;
      }
    }
    for (int lab = 0; lab < labels.count; ++lab) {
      const Ends& e = ends[static_cast<std::size_t>(lab)];
      rep.traced_cells += detail::trace_tongue(g, type, g.a_at(e.bottom_col), g.b_at(e.bottom_row), -1, member, labels,
                                               lab, cfg);
      rep.traced_cells +=
          detail::trace_tongue(g, type, g.a_at(e.top_col), g.b_at(e.top_row), +1, member, labels, lab, cfg);
    }
    labels = label();
  }
  for (std::uint8_t m : member) rep.member_pixels += m;
  rep.components = labels.count;
  rep.anchor_in_component = labels.at(anchor_row, anchor_col) >= 0;
  rep.pass = rep.resolution_ok && rep.components == 1 && rep.anchor_in_component;
  return rep;
}

inline ConnectivityReport connectivity_check(const BinaryType& type, const Window& window, int width, int height,
                                             const SolverConfig& cfg, unsigned threads = worker_count()) {
  if (width < 64 || height < 64) {
    ConnectivityReport rep;
    rep.type = type;
    return rep;
  }
  const TongueRaster raster = rasterize_tongues(Grid{window, width, height}, cfg, threads);
  return connectivity_check(raster, type, atlas_entry(type, cfg).a_super.value, cfg);
}

// Paths inside a tongue.

struct PathVertex {
  double a;
  double b;
  double multiplier;
  bool violation;  // multiplier rose by more than 1e-3 over the previous vertex
};

struct TonguePath {
  BinaryType type;
  std::vector<PathVertex> vertices;
  int violations = 0;
};

/// Climbs from `start` to b = 1 through midpoints of the section interval
/// containing the previous abscissa, ending at the superattracting parameter.
inline TonguePath path_to_superattracting(const BinaryType& type, const CircleParams& start, const SolverConfig& cfg) {
  const TongueSample first = classify_param(start, cfg);
  if (!first.is_type(type)) {
    throw dynamics_error(ErrorKind::Precondition, "start is not in the tongue of type " + type.to_string());
  }
  const double a_super = atlas_entry(type, cfg).a_super.value;
  TonguePath path{type, {}, 0};
  path.vertices.push_back({start.a, start.b, first.in_tongue()->cycle.multiplier, false});
  if (start.b >= 1.0 && circle_distance(start.a, a_super) <= cfg.root_tol) return path;

  double a = start.a;
  double b = start.b;
  double width = 1e-3;
  while (b < 1.0) {
    double step = cfg.path_step;
    std::optional<Interval> section;
    double nb = b;
    for (int halving = 0; halving <= 10; ++halving, step *= 0.5) {
      nb = std::min(1.0, b + step);
      section = interval_containing(type, nb, a, width, cfg);
      if (section) break;
    }
    if (!section) {
      throw dynamics_error(ErrorKind::PathBroken, "no section interval through a = " + std::to_string(a) +
                                                      " at b = " + std::to_string(nb));
    }
    width = std::max(section->width(), 1e-9);
    double next_a = section->mid();
    if (nb >= 1.0) {
      if (!section->contains(a_super)) {
        throw dynamics_error(ErrorKind::PathBroken, "superattracting parameter outside the b = 1 interval");
      }
      next_a = a_super;
    }
    const TongueSample s = classify_param(CircleParams{Angle::reduce(next_a).value, nb}, cfg);
    if (!s.is_type(type)) {
      throw dynamics_error(ErrorKind::PathBroken, "vertex left the tongue at b = " + std::to_string(nb));
    }
    const double lambda = s.in_tongue()->cycle.multiplier;
    const bool violation = lambda > path.vertices.back().multiplier + 1e-3;
    if (violation) ++path.violations;
    path.vertices.push_back({Angle::reduce(next_a).value, nb, lambda, violation});
    a = Angle::reduce(next_a).value;
    b = nb;
  }
  return path;
}

}  // namespace tongue

#endif  // TONGUE_TONGUE_ATLAS_HPP
