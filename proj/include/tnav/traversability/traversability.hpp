#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "tnav/gridmap/grid.hpp"

namespace tnav {

// Weights of the three normalized surface features in the apparent
// traversability score. Must be non-negative and sum to 1 so tau stays in
// [0, 1].
struct FeatureWeights {
  double slope = 0.3;
  double sparsity = 0.3;
  double bumpiness = 0.4;
};

// Feature thresholds of the regional constraint rule.
struct Thresholds {
  double slope = 0.7;
  double sparsity = 0.6;
  double bumpiness = 0.5;
};

// kTransport: bumpiness is the 1-D transport distance between observed
// window heights and their plane-fit predictions. kResidualRms swaps in a
// plane-residual RMS feature (flatness-style baseline) normalized by the
// same scale.
enum class BumpinessMode { kTransport, kResidualRms };

struct TraversabilityParams {
  FeatureWeights weights;
  Thresholds thresholds;
  double r_min = 0.2;   // vacancy ratio below which sparsity is 0
  double r_max = 0.8;   // vacancy ratio above which sparsity is 1
  double b_max = 0.1;   // bumpiness normalization scale (meters)
  int window_side = 5;  // analysis window side, cells (odd)
  BumpinessMode bumpiness_mode = BumpinessMode::kTransport;
  bool constraints_enabled = true;  // when false the constraint map is all 0

  void validate() const;
};

// Normalized per-cell features, each in [0, 1]. Cells without a usable plane
// fit carry zero slope/bumpiness evidence; sparsity always reflects vacancy.
struct CellFeatures {
  double slope = 0.0;
  double sparsity = 1.0;
  double bumpiness = 0.0;
  bool has_surface = false;
  double raw_slope_rad = 0.0;  // un-normalized slope angle
  double raw_distance = 0.0;   // un-normalized transport distance / RMS
  double vacancy = 1.0;        // vacancy ratio of the window
};

struct TraversabilityMap {
  GridSpec spec;
  std::vector<double> tau;
  std::vector<double> slope, sparsity, bumpiness;  // normalized feature planes
  // Window mean of tau centered on each cell; clipped window cells count as
  // tau = 1 (off-map pessimism), consistent with the controller's off-map rule.
  std::vector<double> mean_tau;

  // Value of the cell containing the point; 1.0 (worst) off-map.
  double tau_at(double wx, double wy) const {
    const int r = spec.row_of(wy), c = spec.col_of(wx);
    return spec.in_bounds(r, c) ? tau[spec.index(r, c)] : 1.0;
  }
  double mean_tau_at(double wx, double wy) const {
    const int r = spec.row_of(wy), c = spec.col_of(wx);
    return spec.in_bounds(r, c) ? mean_tau[spec.index(r, c)] : 1.0;
  }
};

struct ConstraintMap {
  GridSpec spec;
  std::vector<std::uint8_t> gamma;

  // Off-map counts as constrained.
  bool blocked_at(double wx, double wy) const {
    const int r = spec.row_of(wy), c = spec.col_of(wx);
    return !spec.in_bounds(r, c) || gamma[spec.index(r, c)] != 0;
  }
};

// Full analysis bundle for one terrain.
struct TerrainMaps {
  HeightMap height;
  NormalMap normals;
  TraversabilityMap trav;
  ConstraintMap constraint;
  TraversabilityParams params;
};

// Slope angle of the fitted plane against vertical, normalized by pi/2.
// Degenerate fits carry no slope evidence (0).
double slope_feature(const PlaneFit& fit);

// Piecewise-linear in the vacancy ratio r: 0 below r_min, 1 above r_max,
// linear between.
double sparsity_feature(double vacancy_ratio, double r_min, double r_max);

// 1-D transport distance between the window's observed heights and the
// fitted plane heights at the same (x, y); for equal-size samples this is the
// mean absolute difference of the sorted sequences. Normalized by b_max and
// clamped to [0, 1]; a near-vertical fit saturates to 1.
double bumpiness_feature(const Kernel& kernel, const PlaneFit& fit, double b_max);

// Plane-residual RMS normalized by b_max (flatness-style alternative).
double flatness_feature(const PlaneFit& fit, double b_max);

double apparent_traversability(const CellFeatures& f, const FeatureWeights& w);

// Region is constrained when strong slope or bumpiness evidence coincides
// with low sparsity (enough observations to trust the evidence).
bool regional_constraint(const CellFeatures& f, const Thresholds& t);

// Reference single-cell route (window gather + SVD plane fit). The batched
// build_maps must agree with this path; tests enforce it.
CellFeatures compute_cell_features(const HeightMap& map, int r, int c,
                                   const TraversabilityParams& params);

TerrainMaps build_maps(const HeightMap& map, const TraversabilityParams& params);

// Signed pitch of a path direction relative to the robot body, measured in
// the surface frame: positive when the path climbs relative to the robot
// forward axis. `normal` is the surface normal (unit, z >= 0), `forward` the
// robot forward direction, `path_dir` the path tangent; all in world frame.
double relative_traversability(const Eigen::Vector3d& normal,
                               const Eigen::Vector3d& forward,
                               const Eigen::Vector3d& path_dir);

}  // namespace tnav
