#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles/hungarian.hpp"
#include "tnav/errors.hpp"
#include "tnav/rng.hpp"
#include "tnav/traversability/traversability.hpp"

namespace tnav {
namespace {

constexpr double kHalfPi = 1.5707963267948966;

Kernel make_kernel(const std::vector<Eigen::Vector3d>& pts, int side) {
  Kernel k;
  k.side = side;
  for (const auto& p : pts) {
    k.xs.push_back(p.x());
    k.ys.push_back(p.y());
    k.zs.push_back(p.z());
  }
  return k;
}

HeightMap random_map(Rng& rng, int rows, int cols, double nan_frac) {
  HeightMap m;
  m.reset({rows, cols, 0.1, 0.0, 0.0});
  for (auto& z : m.z) {
    if (rng.uniform(0, 1) >= nan_frac) z = rng.uniform(0.0, 0.3);
  }
  return m;
}

TEST(SlopeFeature, AngleAgainstVerticalOverHalfPi) {
  // Exact plane z = x: slope 45 degrees, normalized 0.5.
  std::vector<Eigen::Vector3d> pts;
  Rng rng(hash64("slope45"));
  for (int i = 0; i < 20; ++i) {
    const double x = rng.uniform(-1, 1), y = rng.uniform(-1, 1);
    pts.emplace_back(x, y, x);
  }
  const PlaneFit fit = fit_plane(pts);
  ASSERT_TRUE(fit.valid);
  EXPECT_NEAR(slope_feature(fit), 0.5, 1e-9);

  // Flat plane: 0.
  for (auto& p : pts) p.z() = 2.0;
  EXPECT_NEAR(slope_feature(fit_plane(pts)), 0.0, 1e-9);

  // Degenerate fit carries no slope evidence.
  EXPECT_DOUBLE_EQ(slope_feature(PlaneFit{}), 0.0);
}

TEST(SparsityFeature, PiecewiseLinearRamp) {
  EXPECT_DOUBLE_EQ(sparsity_feature(0.0, 0.2, 0.8), 0.0);
  EXPECT_DOUBLE_EQ(sparsity_feature(0.2, 0.2, 0.8), 0.0);
  EXPECT_DOUBLE_EQ(sparsity_feature(0.8, 0.2, 0.8), 1.0);
  EXPECT_DOUBLE_EQ(sparsity_feature(1.0, 0.2, 0.8), 1.0);
  EXPECT_NEAR(sparsity_feature(0.5, 0.2, 0.8), 0.5, 1e-12);
  EXPECT_NEAR(sparsity_feature(0.35, 0.2, 0.8), 0.25, 1e-12);
  // Ramp endpoints move with the knees.
  EXPECT_NEAR(sparsity_feature(0.3, 0.1, 0.5), 0.5, 1e-12);
}

TEST(ApparentTraversability, WeightedSumOfFeatures) {
  CellFeatures f;
  f.slope = 0.25;
  f.sparsity = 0.5;
  f.bumpiness = 1.0;
  const FeatureWeights w{0.3, 0.3, 0.4};
  EXPECT_DOUBLE_EQ(apparent_traversability(f, w),
                   (0.3 * 0.25 + 0.3 * 0.5) + 0.4 * 1.0);
  // Extremes stay in [0, 1].
  CellFeatures worst;
  worst.slope = worst.sparsity = worst.bumpiness = 1.0;
  EXPECT_DOUBLE_EQ(apparent_traversability(worst, w), 1.0);
}

TEST(RegionalConstraint, ThresholdTruthTable) {
  const Thresholds t{0.7, 0.6, 0.5};
  auto probe = [&](double slope, double bump, double spar) {
    CellFeatures f;
    f.slope = slope;
    f.bumpiness = bump;
    f.sparsity = spar;
    return regional_constraint(f, t);
  };
  EXPECT_TRUE(probe(0.71, 0.0, 0.0));   // slope evidence
  EXPECT_TRUE(probe(0.0, 0.51, 0.0));   // bumpiness evidence
  EXPECT_FALSE(probe(0.71, 0.51, 0.6)); // too sparse to trust
  EXPECT_FALSE(probe(0.7, 0.5, 0.0));   // strict inequalities
  EXPECT_FALSE(probe(0.0, 0.0, 0.0));   // no evidence
  EXPECT_TRUE(probe(0.71, 0.0, 0.59));
}

TEST(Bumpiness, KnownTransportCases) {
  // Observed {0, 1}, predicted {1, 0}: sorted sequences coincide, distance 0.
  Kernel k = make_kernel({{0, 0, 0.0}, {0.1, 0, 1.0}, {0, 0.1, 0.5}}, 3);
  PlaneFit flat;
  flat.valid = true;
  flat.normal = Eigen::Vector3d(0, 0, 1);
  flat.centroid = Eigen::Vector3d(0, 0, 0.5);
  // Predictions are all 0.5: sorted obs {0, 0.5, 1} vs {0.5, 0.5, 0.5}
  //  -> (0.5 + 0 + 0.5) / 3.
  EXPECT_NEAR(bumpiness_feature(k, flat, 10.0), (0.5 + 0.0 + 0.5) / 3.0 / 10.0,
              1e-12);
  // Clamped at 1 for tiny b_max.
  EXPECT_DOUBLE_EQ(bumpiness_feature(k, flat, 1e-6), 1.0);
  // Invalid fit carries no evidence.
  EXPECT_DOUBLE_EQ(bumpiness_feature(k, PlaneFit{}, 0.1), 0.0);
}

TEST(Bumpiness, MatchesHungarianMatchingOracle) {
  // The sorted 1-D transport distance must equal the optimal assignment
  // between observed and predicted heights under |a - b| costs.
  Rng rng(hash64("emd-unit"));
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 3 + static_cast<int>(rng.uniform(0, 10));  // 3..12 points
    std::vector<Eigen::Vector3d> pts;
    for (int i = 0; i < n; ++i) {
      pts.emplace_back(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2),
                       rng.uniform(-0.15, 0.15));
    }
    const Kernel k = make_kernel(pts, 5);
    const PlaneFit fit = fit_plane(k);
    if (!fit.valid) continue;

    std::vector<double> pred(n);
    bool vertical = false;
    for (int i = 0; i < n; ++i) {
      pred[i] = fit.z_at(k.xs[i], k.ys[i]);
      vertical = vertical || std::isnan(pred[i]);
    }
    if (vertical) continue;

    std::vector<double> cost(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        cost[i * n + j] = std::abs(k.zs[i] - pred[j]);
    const double want = oracle::hungarian_min_cost(cost, n) / n;

    const double b_max = 10.0;  // large enough that nothing clamps
    const double got = bumpiness_feature(k, fit, b_max) * b_max;
    ASSERT_NEAR(got, want, 1e-9) << "trial " << trial << " n=" << n;
  }
}

TEST(Flatness, ResidualRmsNormalized) {
  PlaneFit fit;
  fit.valid = true;
  fit.residual_rms = 0.05;
  EXPECT_DOUBLE_EQ(flatness_feature(fit, 0.1), 0.5);
  EXPECT_DOUBLE_EQ(flatness_feature(fit, 0.01), 1.0);
  EXPECT_DOUBLE_EQ(flatness_feature(PlaneFit{}, 0.1), 0.0);
}

TEST(Params, ValidateRejectsBadSettings) {
  TraversabilityParams good;
  EXPECT_NO_THROW(good.validate());

  TraversabilityParams p = good;
  p.weights.slope = 0.5;  // sum != 1
  EXPECT_THROW(p.validate(), ConfigError);
  p = good;
  p.weights.bumpiness = -0.1;
  EXPECT_THROW(p.validate(), ConfigError);
  p = good;
  p.r_min = 0.9;
  EXPECT_THROW(p.validate(), ConfigError);
  p = good;
  p.b_max = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = good;
  p.window_side = 4;
  EXPECT_THROW(p.validate(), ConfigError);
  p = good;
  p.thresholds.slope = 1.2;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(BuildMaps, AgreesWithReferenceCellRoute) {
  Rng rng(hash64("maps-vs-cells"));
  for (BumpinessMode mode :
       {BumpinessMode::kTransport, BumpinessMode::kResidualRms}) {
    TraversabilityParams params;
    params.bumpiness_mode = mode;
    const HeightMap m = random_map(rng, 16, 21, 0.25);
    const TerrainMaps maps = build_maps(m, params);

    for (int r = 0; r < m.spec.rows; ++r) {
      for (int c = 0; c < m.spec.cols; ++c) {
        const std::size_t i = m.spec.index(r, c);
        const CellFeatures f = compute_cell_features(m, r, c, params);
        EXPECT_NEAR(maps.trav.sparsity[i], f.sparsity, 1e-12);
        EXPECT_NEAR(maps.trav.slope[i], f.slope, 1e-7) << r << "," << c;
        EXPECT_NEAR(maps.trav.bumpiness[i], f.bumpiness, 1e-7) << r << "," << c;
        EXPECT_NEAR(maps.trav.tau[i],
                    apparent_traversability(f, params.weights), 1e-7);
        EXPECT_EQ(maps.constraint.gamma[i] != 0,
                  regional_constraint(f, params.thresholds))
            << r << "," << c;
      }
    }
  }
}

TEST(BuildMaps, MeanTauTreatsOffMapAsWorst) {
  // Uniform features: flat observed map => slope 0, bumpiness 0, sparsity 0
  // in the interior, so interior tau is 0 and mean_tau at the corner is
  // dominated by the clipped window share.
  HeightMap m;
  m.reset({12, 12, 0.1, 0.0, 0.0});
  for (auto& z : m.z) z = 1.0;
  TraversabilityParams params;
  const TerrainMaps maps = build_maps(m, params);
  const auto& tm = maps.trav;

  const std::size_t center = m.spec.index(6, 6);
  EXPECT_NEAR(tm.tau[center], 0.0, 1e-12);
  EXPECT_NEAR(tm.mean_tau[center], 0.0, 1e-12);

  // Corner window of side 5 has 3x3 = 9 on-map cells; the 16 clipped cells
  // count as tau = 1. On-map near-corner cells have nonzero sparsity, so
  // mean_tau >= 16/25.
  const std::size_t corner = m.spec.index(0, 0);
  EXPECT_GE(tm.mean_tau[corner], 16.0 / 25.0 - 1e-12);

  // And tau_at/mean_tau_at are pessimistic off the map.
  EXPECT_DOUBLE_EQ(tm.tau_at(-1.0, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(tm.mean_tau_at(0.5, 99.0), 1.0);
}

TEST(BuildMaps, MeanTauMatchesBruteForce) {
  Rng rng(hash64("meantau-brute"));
  TraversabilityParams params;
  const HeightMap m = random_map(rng, 10, 13, 0.3);
  const TerrainMaps maps = build_maps(m, params);
  const int half = params.window_side / 2;
  const double cells = params.window_side * params.window_side;
  for (int r = 0; r < m.spec.rows; ++r) {
    for (int c = 0; c < m.spec.cols; ++c) {
      double sum = 0.0;
      for (int dr = -half; dr <= half; ++dr) {
        for (int dc = -half; dc <= half; ++dc) {
          const int rr = r + dr, cc = c + dc;
          sum += m.spec.in_bounds(rr, cc)
                     ? maps.trav.tau[m.spec.index(rr, cc)]
                     : 1.0;
        }
      }
      EXPECT_NEAR(maps.trav.mean_tau[m.spec.index(r, c)], sum / cells, 1e-9);
    }
  }
}

TEST(BuildMaps, ConstraintsCanBeDisabled) {
  // A tall thin ridge produces slope/bumpiness evidence over dense data.
  HeightMap m;
  m.reset({20, 20, 0.1, 0.0, 0.0});
  for (int r = 0; r < 20; ++r)
    for (int c = 0; c < 20; ++c) m.at(r, c) = (c == 10) ? 1.0 : 0.0;

  TraversabilityParams params;
  const TerrainMaps with = build_maps(m, params);
  std::size_t flagged = 0;
  for (auto g : with.constraint.gamma) flagged += g;
  EXPECT_GT(flagged, 0u);

  params.constraints_enabled = false;
  const TerrainMaps without = build_maps(m, params);
  for (auto g : without.constraint.gamma) EXPECT_EQ(g, 0);

  // blocked_at honors the map and is pessimistic off-map.
  EXPECT_TRUE(with.constraint.blocked_at(1.05, 1.0));
  EXPECT_TRUE(with.constraint.blocked_at(-5.0, 1.0));
  EXPECT_FALSE(without.constraint.blocked_at(1.05, 1.0));
}

TEST(RelativeTraversability, SignedClimbInSurfaceFrame) {
  const double a = 30.0 * kHalfPi / 90.0;  // 30 degrees
  const Eigen::Vector3d incline_normal(-std::sin(a), 0, std::cos(a));

  // Climbing straight up a 30-degree incline with a horizontal body axis.
  EXPECT_NEAR(relative_traversability(incline_normal, {1, 0, 0},
                                      {std::cos(a), 0, std::sin(a)}),
              a, 1e-9);
  // Descending is the mirror image.
  EXPECT_NEAR(relative_traversability(incline_normal, {-1, 0, 0},
                                      {-std::cos(a), 0, -std::sin(a)}),
              -a, 1e-9);
  // Flat ground: no pitch.
  EXPECT_NEAR(relative_traversability({0, 0, 1}, {1, 0, 0}, {1, 0, 0}), 0.0,
              1e-12);
  // Traversing across the slope: the path does not climb.
  const Eigen::Vector3d cross_normal(0, -std::sin(a), std::cos(a));
  EXPECT_NEAR(relative_traversability(cross_normal, {1, 0, 0}, {1, 0, 0}), 0.0,
              1e-9);
  // Degenerate inputs carry no signal.
  EXPECT_DOUBLE_EQ(relative_traversability({0, 0, 1}, {1, 0, 0}, {0, 0, 0}),
                   0.0);
  EXPECT_DOUBLE_EQ(relative_traversability({0, 0, 1}, {1, 0, 0}, {0, 0, 1}),
                   0.0);
}

}  // namespace
}  // namespace tnav
