#include "tnav/gridmap/grid.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "tnav/errors.hpp"

namespace tnav {

GridSpec bounding_spec(const std::vector<Eigen::Vector3d>& points,
                       double resolution) {
  TNAV_REQUIRE(resolution > 0.0, "resolution must be positive");
  TNAV_REQUIRE(!points.empty(), "bounding_spec needs at least one point");
  double min_x = points[0].x(), max_x = points[0].x();
  double min_y = points[0].y(), max_y = points[0].y();
  for (const auto& p : points) {
    min_x = std::min(min_x, p.x());
    max_x = std::max(max_x, p.x());
    min_y = std::min(min_y, p.y());
    max_y = std::max(max_y, p.y());
  }
  GridSpec spec;
  spec.resolution = resolution;
  spec.origin_x = std::floor(min_x / resolution) * resolution;
  spec.origin_y = std::floor(min_y / resolution) * resolution;
  spec.cols = static_cast<int>(std::floor((max_x - spec.origin_x) / resolution)) + 1;
  spec.rows = static_cast<int>(std::floor((max_y - spec.origin_y) / resolution)) + 1;
  return spec;
}

HeightMap rasterize(const std::vector<Eigen::Vector3d>& points,
                    const GridSpec& spec) {
  HeightMap map;
  map.reset(spec);
  std::vector<double> sum(spec.size(), 0.0);
  std::vector<std::uint32_t> cnt(spec.size(), 0);
  for (const auto& p : points) {
    if (std::isnan(p.z())) continue;
    const int r = spec.row_of(p.y());
    const int c = spec.col_of(p.x());
    if (!spec.in_bounds(r, c)) continue;
    const std::size_t i = spec.index(r, c);
    sum[i] += p.z();
    ++cnt[i];
  }
  for (std::size_t i = 0; i < spec.size(); ++i)
    if (cnt[i] > 0) map.z[i] = sum[i] / static_cast<double>(cnt[i]);
  return map;
}

Kernel extract_kernel(const HeightMap& map, int r, int c, int side) {
  TNAV_REQUIRE(side >= 1 && (side % 2) == 1, "window side must be odd");
  Kernel k;
  k.side = side;
  const int half = side / 2;
  k.xs.reserve(static_cast<std::size_t>(side) * side);
  k.ys.reserve(k.xs.capacity());
  k.zs.reserve(k.xs.capacity());
  for (int dr = -half; dr <= half; ++dr) {
    const int nr = r + dr;
    if (nr < 0 || nr >= map.spec.rows) continue;
    for (int dc = -half; dc <= half; ++dc) {
      const int nc = c + dc;
      if (nc < 0 || nc >= map.spec.cols) continue;
      const double z = map.at(nr, nc);
      if (std::isnan(z)) continue;
      k.xs.push_back(dc * map.spec.resolution);
      k.ys.push_back(dr * map.spec.resolution);
      k.zs.push_back(z);
    }
  }
  return k;
}

PlaneFit fit_plane(const std::vector<Eigen::Vector3d>& points) {
  PlaneFit fit;
  const std::size_t n = points.size();
  if (n < 3) return fit;
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(n);
  Eigen::MatrixXd a(n, 3);
  for (std::size_t i = 0; i < n; ++i) a.row(i) = (points[i] - centroid).transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  fit.s0 = s(0);
  fit.s1 = s(1);
  fit.s2 = s(2);
  if (fit.s0 <= 0.0 || fit.s1 <= 1e-6 * fit.s0) return fit;
  Eigen::Vector3d normal = svd.matrixV().col(2);
  if (normal.z() < 0.0) normal = -normal;
  fit.valid = true;
  fit.normal = normal;
  fit.centroid = centroid;
  fit.residual_rms = fit.s2 / std::sqrt(static_cast<double>(n));
  return fit;
}

PlaneFit fit_plane(const Kernel& kernel) {
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(kernel.count());
  for (std::size_t i = 0; i < kernel.count(); ++i)
    pts.emplace_back(kernel.xs[i], kernel.ys[i], kernel.zs[i]);
  return fit_plane(pts);
}

NormalMap compute_normal_map(const HeightMap& map, int window_side) {
  TNAV_REQUIRE(window_side >= 1 && (window_side % 2) == 1,
               "window side must be odd");
  NormalMap nm;
  nm.spec = map.spec;
  nm.window_side = window_side;

  // Moments are taken relative to the global mean height so the accumulation
  // is translation invariant regardless of absolute elevation.
  double zsum = 0.0;
  std::size_t zcnt = 0;
  for (double v : map.z) {
    if (!std::isnan(v)) {
      zsum += v;
      ++zcnt;
    }
  }
  nm.z_ref = zcnt > 0 ? zsum / static_cast<double>(zcnt) : 0.0;

  kernels::MomentField m;
  kernels::window_moments(map.z.data(), map.spec.rows, map.spec.cols,
                          window_side, map.spec.resolution, nm.z_ref, m);

  const std::size_t sz = map.spec.size();
  nm.nx.assign(sz, kNaN);
  nm.ny.assign(sz, kNaN);
  nm.nz.assign(sz, kNaN);
  nm.count.assign(sz, 0.0);
  nm.mx.assign(sz, kNaN);
  nm.my.assign(sz, kNaN);
  nm.mz.assign(sz, kNaN);
  nm.residual_rms.assign(sz, kNaN);

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
  for (std::size_t i = 0; i < sz; ++i) {
    const double n = m.n[i];
    nm.count[i] = n;
    if (n < 3.0) continue;
    const double mx = m.sx[i] / n;
    const double my = m.sy[i] / n;
    const double mz = m.sz[i] / n;
    // Centered scatter matrix; eigenvalues ascending, smallest eigenvector
    // is the plane normal and lambda0 the residual power.
    Eigen::Matrix3d cov;
    const double cxx = m.sxx[i] - m.sx[i] * mx;
    const double cxy = m.sxy[i] - m.sx[i] * my;
    const double cxz = m.sxz[i] - m.sx[i] * mz;
    const double cyy = m.syy[i] - m.sy[i] * my;
    const double cyz = m.syz[i] - m.sy[i] * mz;
    const double czz = m.szz[i] - m.sz[i] * mz;
    cov << cxx, cxy, cxz, cxy, cyy, cyz, cxz, cyz, czz;
    es.computeDirect(cov);
    const auto& ev = es.eigenvalues();
    const double l0 = std::max(0.0, ev(0));
    const double l1 = std::max(0.0, ev(1));
    const double l2 = std::max(0.0, ev(2));
    // Same rank rule as fit_plane: s1 <= 1e-6 * s0  <=>  l1 <= 1e-12 * l2.
    if (l2 <= 0.0 || l1 <= 1e-12 * l2) continue;
    Eigen::Vector3d normal = es.eigenvectors().col(0);
    if (normal.z() < 0.0) normal = -normal;
    nm.nx[i] = normal.x();
    nm.ny[i] = normal.y();
    nm.nz[i] = normal.z();
    nm.mx[i] = mx;
    nm.my[i] = my;
    nm.mz[i] = mz;
    nm.residual_rms[i] = std::sqrt(l0 / n);
  }
  return nm;
}

}  // namespace tnav
