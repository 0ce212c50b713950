#include "tnav/traversability/traversability.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>

#include "tnav/errors.hpp"
#include "tnav/kernels/kernels.hpp"

namespace tnav {

void TraversabilityParams::validate() const {
  const double sum = weights.slope + weights.sparsity + weights.bumpiness;
  if (weights.slope < 0 || weights.sparsity < 0 || weights.bumpiness < 0 ||
      std::abs(sum - 1.0) > 1e-9)
    throw ConfigError("feature weights must be non-negative and sum to 1");
  if (!(r_min >= 0.0 && r_min < r_max && r_max <= 1.0))
    throw ConfigError("need 0 <= r_min < r_max <= 1");
  if (b_max <= 0.0) throw ConfigError("b_max must be positive");
  if (window_side < 1 || window_side % 2 == 0)
    throw ConfigError("window_side must be odd and >= 1");
  for (double e : {thresholds.slope, thresholds.sparsity, thresholds.bumpiness})
    if (e < 0.0 || e > 1.0) throw ConfigError("thresholds must lie in [0, 1]");
}

double slope_feature(const PlaneFit& fit) {
  if (!fit.valid) return 0.0;
  const double angle = std::acos(clamp(fit.normal.z(), -1.0, 1.0));
  return clamp(angle / (kPi / 2.0), 0.0, 1.0);
}

double sparsity_feature(double vacancy_ratio, double r_min, double r_max) {
  if (vacancy_ratio <= r_min) return 0.0;
  if (vacancy_ratio >= r_max) return 1.0;
  return (vacancy_ratio - r_min) / (r_max - r_min);
}

namespace {

// Transport distance between two equal-size 1-D samples: with unit mass per
// point the optimal coupling is the monotone (sorted-to-sorted) matching.
double transport_distance(std::vector<double>& a, std::vector<double>& b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return kernels::mean_abs_diff(a.data(), b.data(), a.size());
}

}  // namespace

double bumpiness_feature(const Kernel& kernel, const PlaneFit& fit, double b_max) {
  if (!fit.valid || kernel.count() == 0) return 0.0;
  std::vector<double> obs(kernel.zs);
  std::vector<double> pred;
  pred.reserve(kernel.count());
  for (std::size_t i = 0; i < kernel.count(); ++i) {
    const double zf = fit.z_at(kernel.xs[i], kernel.ys[i]);
    if (std::isnan(zf)) return 1.0;  // near-vertical plane, worst case
    pred.push_back(zf);
  }
  const double d = transport_distance(obs, pred);
  return clamp(d / b_max, 0.0, 1.0);
}

double flatness_feature(const PlaneFit& fit, double b_max) {
  if (!fit.valid) return 0.0;
  return clamp(fit.residual_rms / b_max, 0.0, 1.0);
}

double apparent_traversability(const CellFeatures& f, const FeatureWeights& w) {
  return (w.slope * f.slope + w.sparsity * f.sparsity) + w.bumpiness * f.bumpiness;
}

bool regional_constraint(const CellFeatures& f, const Thresholds& t) {
  return (f.slope > t.slope || f.bumpiness > t.bumpiness) &&
         f.sparsity < t.sparsity;
}

CellFeatures compute_cell_features(const HeightMap& map, int r, int c,
                                   const TraversabilityParams& params) {
  CellFeatures f;
  const Kernel kernel = extract_kernel(map, r, c, params.window_side);
  f.vacancy = kernel.vacancy_ratio();
  f.sparsity = sparsity_feature(f.vacancy, params.r_min, params.r_max);
  const PlaneFit fit = fit_plane(kernel);
  if (!fit.valid) return f;
  f.has_surface = true;
  f.raw_slope_rad = std::acos(clamp(fit.normal.z(), -1.0, 1.0));
  f.slope = slope_feature(fit);
  if (params.bumpiness_mode == BumpinessMode::kResidualRms) {
    f.raw_distance = fit.residual_rms;
    f.bumpiness = flatness_feature(fit, params.b_max);
  } else {
    std::vector<double> obs(kernel.zs);
    std::vector<double> pred;
    pred.reserve(kernel.count());
    bool vertical = false;
    for (std::size_t i = 0; i < kernel.count(); ++i) {
      const double zf = fit.z_at(kernel.xs[i], kernel.ys[i]);
      if (std::isnan(zf)) {
        vertical = true;
        break;
      }
      pred.push_back(zf);
    }
    if (vertical) {
      f.raw_distance = params.b_max;
      f.bumpiness = 1.0;
    } else {
      f.raw_distance = transport_distance(obs, pred);
      f.bumpiness = clamp(f.raw_distance / params.b_max, 0.0, 1.0);
    }
  }
  return f;
}

TerrainMaps build_maps(const HeightMap& map, const TraversabilityParams& params) {
  params.validate();
  TerrainMaps maps;
  maps.params = params;
  maps.height = map;
  maps.normals = compute_normal_map(map, params.window_side);

  const GridSpec& spec = map.spec;
  const std::size_t sz = spec.size();
  const int side = params.window_side;
  const int half = side / 2;
  const double cells = static_cast<double>(side) * side;

  TraversabilityMap& tm = maps.trav;
  tm.spec = spec;
  tm.slope.assign(sz, 0.0);
  tm.sparsity.assign(sz, 0.0);
  tm.bumpiness.assign(sz, 0.0);
  tm.tau.assign(sz, 0.0);
  tm.mean_tau.assign(sz, 0.0);

  const NormalMap& nm = maps.normals;
  std::vector<double> window_obs, window_pred;
  window_obs.reserve(static_cast<std::size_t>(side) * side);
  window_pred.reserve(window_obs.capacity());

  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      const std::size_t i = spec.index(r, c);
      const double vacancy = (cells - nm.count[i]) / cells;
      tm.sparsity[i] = sparsity_feature(vacancy, params.r_min, params.r_max);
      if (!nm.has_normal(i)) continue;
      tm.slope[i] =
          clamp(std::acos(clamp(nm.nz[i], -1.0, 1.0)) / (kPi / 2.0), 0.0, 1.0);
      if (params.bumpiness_mode == BumpinessMode::kResidualRms) {
        tm.bumpiness[i] = clamp(nm.residual_rms[i] / params.b_max, 0.0, 1.0);
        continue;
      }
      // Gather observed window heights and the fitted plane heights at the
      // same offsets, then take the monotone transport distance.
      window_obs.clear();
      window_pred.clear();
      bool vertical = false;
      for (int dr = -half; dr <= half && !vertical; ++dr) {
        const int nr = r + dr;
        if (nr < 0 || nr >= spec.rows) continue;
        for (int dc = -half; dc <= half; ++dc) {
          const int nc = c + dc;
          if (nc < 0 || nc >= spec.cols) continue;
          const double z = map.at(nr, nc);
          if (std::isnan(z)) continue;
          const double zf =
              nm.plane_z(i, dc * spec.resolution, dr * spec.resolution);
          if (std::isnan(zf)) {
            vertical = true;
            break;
          }
          window_obs.push_back(z);
          window_pred.push_back(zf);
        }
      }
      if (vertical) {
        tm.bumpiness[i] = 1.0;
        continue;
      }
      const double d = transport_distance(window_obs, window_pred);
      tm.bumpiness[i] = clamp(d / params.b_max, 0.0, 1.0);
    }
  }

  kernels::weighted_sum3(tm.slope.data(), tm.sparsity.data(),
                         tm.bumpiness.data(), params.weights.slope,
                         params.weights.sparsity, params.weights.bumpiness,
                         tm.tau.data(), sz);

  // Window mean of tau with clipped cells counting as tau = 1.
  std::vector<double> box(sz, 0.0);
  kernels::window_box_sum(tm.tau.data(), spec.rows, spec.cols, side, box.data());
  for (int r = 0; r < spec.rows; ++r) {
    const int rows_in = std::min(r + half, spec.rows - 1) - std::max(r - half, 0) + 1;
    for (int c = 0; c < spec.cols; ++c) {
      const int cols_in = std::min(c + half, spec.cols - 1) - std::max(c - half, 0) + 1;
      const double overlap = static_cast<double>(rows_in) * cols_in;
      const std::size_t i = spec.index(r, c);
      tm.mean_tau[i] = (box[i] + (cells - overlap)) / cells;
    }
  }

  ConstraintMap& cm = maps.constraint;
  cm.spec = spec;
  cm.gamma.assign(sz, 0);
  if (params.constraints_enabled) {
    for (std::size_t i = 0; i < sz; ++i) {
      const bool evidence =
          tm.slope[i] > params.thresholds.slope ||
          tm.bumpiness[i] > params.thresholds.bumpiness;
      if (evidence && tm.sparsity[i] < params.thresholds.sparsity)
        cm.gamma[i] = 1;
    }
  }
  return maps;
}

double relative_traversability(const Eigen::Vector3d& normal,
                               const Eigen::Vector3d& forward,
                               const Eigen::Vector3d& path_dir) {
  const double pn = path_dir.norm();
  const double fn = forward.norm();
  if (pn < 1e-12 || fn < 1e-12) return 0.0;
  const Eigen::Vector3d p_hat = path_dir / pn;

  // Surface frame: e_z is the normal, e_x the path direction projected onto
  // the surface, e_y = e_x x e_z (points to the right of travel).
  const Eigen::Vector3d e_z = normal.normalized();
  Eigen::Vector3d e_x = p_hat - p_hat.dot(e_z) * e_z;
  const double exn = e_x.norm();
  if (exn < 1e-12) return 0.0;  // path parallel to the normal
  e_x /= exn;
  const Eigen::Vector3d e_y = e_x.cross(e_z);

  // Robot forward axis restricted to the x-z plane of the surface frame.
  Eigen::Vector3d q = forward / fn;
  q -= q.dot(e_y) * e_y;
  const double qn = q.norm();
  if (qn < 1e-12) return 0.0;  // forward axis parallel to e_y
  q /= qn;

  const double s = clamp(q.cross(p_hat).dot(e_y), -1.0, 1.0);
  return std::asin(s);
}

}  // namespace tnav
