#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

#include "tnav/common.hpp"
#include "tnav/kernels/kernels.hpp"

namespace tnav {

// Row-major grid. Columns advance along world +x, rows along world +y;
// cell (r, c) covers [origin + c*res, origin + (c+1)*res) x [...r...), and
// cell values are attributed to the cell center.
struct GridSpec {
  int rows = 0;
  int cols = 0;
  double resolution = 0.1;
  double origin_x = 0.0;
  double origin_y = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
  bool in_bounds(int r, int c) const {
    return r >= 0 && r < rows && c >= 0 && c < cols;
  }
  std::size_t index(int r, int c) const {
    return static_cast<std::size_t>(r) * cols + c;
  }
  double center_x(int c) const { return origin_x + (c + 0.5) * resolution; }
  double center_y(int r) const { return origin_y + (r + 0.5) * resolution; }
  int col_of(double wx) const {
    return static_cast<int>(std::floor((wx - origin_x) / resolution));
  }
  int row_of(double wy) const {
    return static_cast<int>(std::floor((wy - origin_y) / resolution));
  }
  bool contains(double wx, double wy) const {
    return in_bounds(row_of(wy), col_of(wx));
  }
  double width() const { return cols * resolution; }
  double height() const { return rows * resolution; }

  bool operator==(const GridSpec&) const = default;
};

// Heightfield; NaN marks vacant cells (no observations).
struct HeightMap {
  GridSpec spec;
  std::vector<double> z;

  void reset(const GridSpec& s) {
    spec = s;
    z.assign(s.size(), kNaN);
  }
  double at(int r, int c) const { return z[spec.index(r, c)]; }
  double& at(int r, int c) { return z[spec.index(r, c)]; }
  bool vacant(int r, int c) const { return std::isnan(at(r, c)); }
  // Height of the cell containing (wx, wy); NaN off-map or vacant.
  double sample(double wx, double wy) const {
    const int r = spec.row_of(wy);
    const int c = spec.col_of(wx);
    if (!spec.in_bounds(r, c)) return kNaN;
    return at(r, c);
  }
};

// Observed points of one analysis window. x/y are window-local offsets from
// the center cell's center (meters); z is absolute. Cells outside the map
// count as vacant, so vacancy() is always relative to the full side*side.
struct Kernel {
  int side = 0;
  std::vector<double> xs, ys, zs;

  std::size_t count() const { return zs.size(); }
  std::size_t capacity_cells() const {
    return static_cast<std::size_t>(side) * side;
  }
  double vacancy_ratio() const {
    const std::size_t cap = capacity_cells();
    return cap == 0 ? 1.0
                    : static_cast<double>(cap - count()) / static_cast<double>(cap);
  }
};

// Total-least-squares plane through a point set. `normal` is unit with
// normal.z() >= 0; singular values s0 >= s1 >= s2 of the centered point
// matrix. Degenerate (valid == false) when fewer than 3 points or the points
// are rank-deficient in the plane directions (s1 <= 1e-6 * s0).
struct PlaneFit {
  bool valid = false;
  Eigen::Vector3d normal = Eigen::Vector3d(kNaN, kNaN, kNaN);
  Eigen::Vector3d centroid = Eigen::Vector3d(kNaN, kNaN, kNaN);
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  double residual_rms = kNaN;

  // Plane height at (x, y) in the same frame the fit was computed in.
  // NaN when invalid or the plane is near-vertical.
  double z_at(double x, double y) const {
    if (!valid || std::abs(normal.z()) < 1e-12) return kNaN;
    return centroid.z() -
           (normal.x() * (x - centroid.x()) + normal.y() * (y - centroid.y())) /
               normal.z();
  }
};

// Per-cell plane-fit summaries over a fixed window, produced in one batched
// pass (moment accumulation + closed-form 3x3 eigensolve). Means mx/my are
// window-local; mz is relative to z_ref. NaN entries mark degenerate cells.
struct NormalMap {
  GridSpec spec;
  int window_side = 0;
  double z_ref = 0.0;
  std::vector<double> nx, ny, nz;
  std::vector<double> count;
  std::vector<double> mx, my, mz;
  std::vector<double> residual_rms;

  bool has_normal(std::size_t i) const { return !std::isnan(nz[i]); }
  // Fitted plane height (absolute z) at window-local offset (x, y) from the
  // cell center. NaN when degenerate or near-vertical.
  double plane_z(std::size_t i, double x, double y) const {
    if (!has_normal(i) || std::abs(nz[i]) < 1e-12) return kNaN;
    return (z_ref + mz[i]) -
           (nx[i] * (x - mx[i]) + ny[i] * (y - my[i])) / nz[i];
  }
};

// Mean-z rasterization; points outside the grid are ignored, empty cells
// stay NaN.
HeightMap rasterize(const std::vector<Eigen::Vector3d>& points,
                    const GridSpec& spec);

// Grid spec that covers a point cloud at the given resolution, origin snapped
// to the resolution lattice.
GridSpec bounding_spec(const std::vector<Eigen::Vector3d>& points,
                       double resolution);

// Window gather around (r, c); see Kernel for frame conventions.
Kernel extract_kernel(const HeightMap& map, int r, int c, int side);

PlaneFit fit_plane(const std::vector<Eigen::Vector3d>& points);
PlaneFit fit_plane(const Kernel& kernel);

NormalMap compute_normal_map(const HeightMap& map, int window_side);

}  // namespace tnav
