#include <cmath>
#include <set>
#include <variant>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "tongue/tongue_atlas.hpp"

using namespace tongue;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const dynamics_error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no dynamics_error thrown";
  return ErrorKind::Precondition;
}

const detail::TipSearch& fixed_point_tip() {
  static const detail::TipSearch ts = detail::tip_search(BinaryType::parse("0/1"), SolverConfig{});
  return ts;
}

}  // namespace

TEST(ClassifyParam, Examples) {
  SolverConfig cfg;
  const TongueSample s = classify_param(CircleParams{0.5, 0.9}, cfg);
  ASSERT_TRUE(s.in_tongue());
  EXPECT_EQ(s.in_tongue()->type, BinaryType::parse("0/1"));
  EXPECT_EQ(s.in_tongue()->cycle.period, 1);
  EXPECT_NEAR(s.in_tongue()->cycle.multiplier, 0.2, 1e-12);

  EXPECT_TRUE(std::holds_alternative<NoAttractor>(classify_param(CircleParams{0.1, 0.3}, cfg).outcome));

  const TongueSample top = classify_param(CircleParams{0.5, 1.0}, cfg);
  ASSERT_TRUE(top.is_type(BinaryType::parse("0/1")));
  EXPECT_NEAR(top.in_tongue()->cycle.multiplier, 0.0, 1e-12);
}

TEST(ClassifyParam, InTongueInvariants) {
  SolverConfig cfg;
  oracle::Sampler rng(81);
  int inside = 0;
  for (int i = 0; i < 400; ++i) {
    const TongueSample s = classify_param(CircleParams{rng.uniform(0, 1), rng.uniform(0.5, 1.0)}, cfg);
    if (const InTongue* hit = s.in_tongue()) {
      ++inside;
      EXPECT_GT(hit->cycle.multiplier, -1.0);
      EXPECT_LT(hit->cycle.multiplier, 1.0 - cfg.root_tol);
      EXPECT_EQ(hit->type.period(), hit->cycle.period);
    }
  }
  EXPECT_GT(inside, 50);
}

TEST(Atlas, PeriodOne) {
  SolverConfig cfg;
  const auto atlas = superattracting_atlas(1, cfg);
  ASSERT_EQ(atlas.size(), 1u);
  EXPECT_EQ(atlas[0].type, BinaryType::parse("0/1"));
  EXPECT_NEAR(atlas[0].a_super.value, 0.5, 1e-12);
}

TEST(Atlas, PeriodTwo) {
  SolverConfig cfg;
  const auto atlas = superattracting_atlas(2, cfg);
  ASSERT_EQ(atlas.size(), 3u);
  std::set<BinaryType> types;
  for (const auto& e : atlas) types.insert(e.type);
  EXPECT_EQ(types, (std::set<BinaryType>{BinaryType::parse("0/1"), BinaryType::parse("1/3"), BinaryType::parse("2/3")}));
  EXPECT_NEAR(atlas_entry(BinaryType::parse("1/3"), cfg).a_super.value +
                  atlas_entry(BinaryType::parse("2/3"), cfg).a_super.value,
              1.0, 1e-12);
}

TEST(Atlas, CountsAndTypesUpToPeriodEight) {
  SolverConfig cfg;
  for (int p = 1; p <= 8; ++p) {
    const auto atlas = superattracting_atlas(p, cfg);
    const std::uint64_t n = BinaryType::mersenne(p);
    ASSERT_EQ(atlas.size(), n) << "p=" << p;
    std::set<BinaryType> got, want;
    for (const auto& e : atlas) got.insert(e.type);
    for (std::uint64_t k = 0; k < n; ++k) want.insert(BinaryType::canonical(k, p));
    EXPECT_EQ(got, want) << "p=" << p;
    for (std::size_t i = 1; i < atlas.size(); ++i) EXPECT_LT(atlas[i - 1].a_super.value, atlas[i].a_super.value);
  }
}

TEST(Atlas, HalfIsPeriodicInHighPrecision) {
  SolverConfig cfg;
  for (int p = 1; p <= 6; ++p) {
    for (const auto& e : superattracting_atlas(p, cfg)) {
      const oracle::Real v = oracle::iterate(e.a_super.value, 1.0, 0.5, p) - 0.5;
      EXPECT_LT(static_cast<double>(abs(v - round(v))), 1e-9) << "p=" << p << " a=" << e.a_super.value;
      // Exact period agrees with the period of the type.
      int exact = p;
      for (int q = 1; q < p; ++q) {
        const oracle::Real w = oracle::iterate(e.a_super.value, 1.0, 0.5, q) - 0.5;
        if (abs(w - round(w)) < 1e-7) {
          exact = q;
          break;
        }
      }
      EXPECT_EQ(exact, e.type.period());
    }
  }
}

TEST(Atlas, LevelMapHasSlopeAtLeastOne) {
  for (int p = 1; p <= 8; ++p) {
    double worst = 1e300;
    const double h = 1e-6;
    for (int i = 0; i < 10000; ++i) {
      const double a = i / 10000.0;
      const double slope =
          (iterate_lift(CircleParams{a + h, 1.0}, 0.5, p) - iterate_lift(CircleParams{a, 1.0}, 0.5, p)) / h;
      worst = std::min(worst, slope);
    }
    EXPECT_GE(worst, 1.0 - 1e-6) << "p=" << p;
  }
}

TEST(Atlas, Errors) {
  SolverConfig cfg;
  EXPECT_EQ(kind_of([&] { superattracting_atlas(0, cfg); }), ErrorKind::Precondition);
}

TEST(CrossSection, FixedPointTongueAtTop) {
  SolverConfig cfg;
  const auto ivs = cross_section(BinaryType::parse("0/1"), 1.0, cfg);
  ASSERT_EQ(ivs.size(), 1u);
  EXPECT_TRUE(ivs[0].contains(0.5));
  EXPECT_NEAR(ivs[0].mid(), 0.5, 1e-6);
  // Edges bracket membership.
  EXPECT_TRUE(detail::is_member(BinaryType::parse("0/1"), ivs[0].lo + 1e-6, 1.0, cfg));
  EXPECT_FALSE(detail::is_member(BinaryType::parse("0/1"), ivs[0].lo - 1e-6, 1.0, cfg));
}

TEST(CrossSection, EmptyBelowHalf) {
  SolverConfig cfg;
  EXPECT_TRUE(cross_section(BinaryType::parse("0/1"), 0.4, cfg).empty());
  EXPECT_EQ(kind_of([&] { cross_section(BinaryType::parse("0/1"), 1.2, cfg); }), ErrorKind::Precondition);
}

TEST(CrossSection, PeriodTwoSingleInterval) {
  SolverConfig cfg;
  const BinaryType t = BinaryType::parse("1/3");
  const auto ivs = cross_section(t, 0.99, cfg);
  ASSERT_EQ(ivs.size(), 1u);
  EXPECT_TRUE(classify_param(CircleParams{ivs[0].mid(), 0.99}, cfg).is_type(t));
  const auto through = interval_containing(t, 0.99, ivs[0].mid(), ivs[0].width(), cfg);
  ASSERT_TRUE(through);
  EXPECT_NEAR(through->lo, ivs[0].lo, 1e-7);
  EXPECT_NEAR(through->hi, ivs[0].hi, 1e-7);
}

TEST(TongueTip, FixedPointTongue) {
  const double tip = fixed_point_tip().b_tip;
  EXPECT_GT(tip, 0.5);
  EXPECT_LT(tip, 1.0);
  EXPECT_LT(tip, 0.51);
}

TEST(TongueTip, CuspOfFixedPointTongue) {
  const auto cusp = detail::cusp_from(BinaryType::parse("0/1"), fixed_point_tip(), SolverConfig{});
  ASSERT_TRUE(cusp);
  EXPECT_NEAR(cusp->a, 0.5, 1e-8);
  EXPECT_NEAR(cusp->b, 0.5, 1e-8);
}

TEST(TongueTip, PeriodThreeTipIsHigher) {
  SolverConfig cfg;
  const double tip3 = tongue_tip(BinaryType::parse("1/7"), cfg);
  EXPECT_GT(tip3, fixed_point_tip().b_tip);
  EXPECT_GE(tip3, 0.5);
  EXPECT_LE(tip3, 1.0);
}

TEST(Connectivity, TinyRasterIsFlagged) {
  SolverConfig cfg;
  const ConnectivityReport rep = connectivity_check(BinaryType::parse("0/1"), Window{}, 1, 1, cfg, 1);
  EXPECT_FALSE(rep.resolution_ok);
  EXPECT_FALSE(rep.pass);
}

TEST(Connectivity, FixedPointTongueInSmallWindow) {
  SolverConfig cfg;
  const ConnectivityReport rep =
      connectivity_check(BinaryType::parse("0/1"), Window{0.3, 0.7, 0.5, 1.0}, 64, 64, cfg, worker_count());
  EXPECT_TRUE(rep.resolution_ok);
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.components, 1);
  EXPECT_TRUE(rep.anchor_in_component);
  EXPECT_GT(rep.member_pixels, 0);
  EXPECT_GE(rep.undecided_fraction, 0.0);
  EXPECT_LE(rep.undecided_fraction, 1.0);
}

TEST(Connectivity, LabelsFourConnectedComponents) {
  // Diagonal neighbours are separate components.
  const int pattern[3][3] = {{1, 0, 1}, {0, 1, 0}, {1, 0, 1}};
  const ComponentLabels l = label_components(3, 3, [&](int r, int c) { return pattern[r][c] == 1; });
  EXPECT_EQ(l.count, 5);
  const ComponentLabels full = label_components(4, 2, [](int, int) { return true; });
  EXPECT_EQ(full.count, 1);
}

TEST(Path, FixedPointSpine) {
  SolverConfig cfg;
  const TonguePath path = path_to_superattracting(BinaryType::parse("0/1"), CircleParams{0.5, 0.9}, cfg);
  ASSERT_GE(path.vertices.size(), 2u);
  for (const PathVertex& v : path.vertices) EXPECT_NEAR(v.a, 0.5, 1e-6);
  EXPECT_DOUBLE_EQ(path.vertices.back().b, 1.0);
  EXPECT_NEAR(path.vertices.back().a, 0.5, 1e-12);
  EXPECT_NEAR(path.vertices.back().multiplier, 0.0, 1e-9);
  EXPECT_EQ(path.violations, 0);
  for (std::size_t i = 1; i < path.vertices.size(); ++i) EXPECT_GT(path.vertices[i].b, path.vertices[i - 1].b);
}

TEST(Path, StartAtSuperattractingPoint) {
  SolverConfig cfg;
  const TonguePath path = path_to_superattracting(BinaryType::parse("0/1"), CircleParams{0.5, 1.0}, cfg);
  EXPECT_EQ(path.vertices.size(), 1u);
}

TEST(Path, MismatchedTypeIsRejected) {
  SolverConfig cfg;
  EXPECT_EQ(kind_of([&] { path_to_superattracting(BinaryType::parse("1/3"), CircleParams{0.5, 0.9}, cfg); }),
            ErrorKind::Precondition);
}

TEST(Path, PeriodTwoTongueReachesItsAtlasPoint) {
  SolverConfig cfg;
  const BinaryType t = BinaryType::parse("2/3");
  const double a_super = atlas_entry(t, cfg).a_super.value;
  const auto ivs = cross_section(t, 0.9, cfg);
  ASSERT_FALSE(ivs.empty());
  const TonguePath path = path_to_superattracting(t, CircleParams{Angle::reduce(ivs[0].mid()).value, 0.9}, cfg);
  EXPECT_DOUBLE_EQ(path.vertices.back().b, 1.0);
  EXPECT_LT(circle_distance(path.vertices.back().a, a_super), cfg.root_tol);
  for (const PathVertex& v : path.vertices) {
    EXPECT_TRUE(classify_param(CircleParams{v.a, v.b}, cfg).is_type(t)) << v.a << " " << v.b;
  }
  EXPECT_LT(path.vertices.back().multiplier, 1e-6);
}

TEST(TipExponent, FixedPointTongueGivesFiniteEstimate) {
  SolverConfig cfg;
  const auto& ts = fixed_point_tip();
  const TipExponent e = tip_exponent_from(BinaryType::parse("0/1"), 0.5, 0.5, 8, cfg);
  EXPECT_TRUE(std::isfinite(e.exponent));
  EXPECT_TRUE(std::isfinite(e.residual));
  EXPECT_GE(e.samples.size(), 5u);
  EXPECT_GT(e.exponent, 0.0);
  const TipExponent scanned = tip_exponent_from(BinaryType::parse("0/1"), ts.b_tip, ts.section.mid(), 8, cfg);
  EXPECT_TRUE(std::isfinite(scanned.exponent));
}

TEST(TipExponent, TipNearTopIsInsufficient) {
  SolverConfig cfg;
  EXPECT_EQ(kind_of([&] { tip_exponent_from(BinaryType::parse("1/7"), 0.999, 0.75, 8, cfg); }),
            ErrorKind::InsufficientData);
}
