#include <algorithm>
#include <cmath>

#include "tnav/controller/controller.hpp"
#include "tnav/errors.hpp"

namespace tnav {

PathTracker::PathTracker(const PlannedPath& path, const TerrainMaps& maps,
                         const ControllerParams& params, std::uint64_t seed)
    : maps_(maps), params_(params), path_(path), rng_(seed) {
  params_.validate();
  TNAV_REQUIRE(!path_.waypoints.empty(), "tracker needs a non-empty path");
  arc_.resize(path_.waypoints.size());
  arc_[0] = 0.0;
  for (std::size_t i = 1; i < path_.waypoints.size(); ++i) {
    const auto& a = path_.waypoints[i - 1];
    const auto& b = path_.waypoints[i];
    arc_[i] = arc_[i - 1] + std::hypot(b.x - a.x, b.y - a.y);
  }
  warm_.assign(params_.horizon, ControlInput{});
}

void PathTracker::advance_watermark(const RobotState& current) {
  // Monotone nearest-waypoint watermark; the bounded lookahead keeps the
  // anchor from jumping across self-intersections.
  const std::size_t limit = std::min(path_.waypoints.size(), watermark_ + 60);
  std::size_t best = watermark_;
  double dbest = std::numeric_limits<double>::infinity();
  for (std::size_t i = watermark_; i < limit; ++i) {
    const auto& w = path_.waypoints[i];
    const double d = std::hypot(w.x - current.x, w.y - current.y);
    if (d < dbest - 1e-12) {
      dbest = d;
      best = i;
    }
  }
  watermark_ = best;
}

ReferenceWindow PathTracker::build_references(const RobotState& current) const {
  const auto& wps = path_.waypoints;
  const std::size_t n = wps.size();
  const std::size_t M = static_cast<std::size_t>(params_.ref_window);

  // The window follows one gear section: it is capped at the first reversal
  // (cusp) past the watermark. Exposing both cusp sides in one horizon makes
  // standing still a local optimum (the incentive signs cancel); sectioning
  // removes it, and the cusp waypoint repeats with zero desired speed exactly
  // like the end of the path, so the tracker settles there, the watermark
  // crosses, and the window flips to the next section.
  std::size_t cap = n - 1;
  if (watermark_ + 1 < n) {
    const bool rev = wps[watermark_ + 1].desired_speed < 0.0;
    for (std::size_t k = watermark_ + 1; k + 1 < n; ++k) {
      if ((wps[k + 1].desired_speed < 0.0) != rev) {
        cap = k;
        break;
      }
    }
  }

  ReferenceWindow refs;
  refs.states.reserve(M);
  refs.v_desired.reserve(M);
  refs.psi.reserve(M);
  refs.path_points.reserve(M);
  for (std::size_t j = 0; j < M; ++j) {
    const std::size_t i = std::min(watermark_ + j, cap);
    const auto& w = wps[i];
    refs.states.push_back(RobotState{w.x, w.y, w.heading});
    // Desired speed of the segment leaving i; the section's last waypoint
    // holds zero so tracking settles there.
    refs.v_desired.push_back(i < cap ? wps[i + 1].desired_speed : 0.0);
    refs.path_points.emplace_back(w.x, w.y, w.z);
  }

  // Pitch of each window segment relative to the robot's current body plane.
  Eigen::Vector3d normal(0.0, 0.0, 1.0);
  const GridSpec& spec = maps_.normals.spec;
  const int r = spec.row_of(current.y);
  const int c = spec.col_of(current.x);
  if (spec.in_bounds(r, c)) {
    const std::size_t i = spec.index(r, c);
    if (maps_.normals.has_normal(i))
      normal = Eigen::Vector3d(maps_.normals.nx[i], maps_.normals.ny[i],
                               maps_.normals.nz[i]);
  }
  const Eigen::Vector3d h(std::cos(current.theta), std::sin(current.theta),
                          0.0);
  Eigen::Vector3d f = h - h.dot(normal) * normal;
  if (f.norm() < 1e-9) f = h;

  for (std::size_t j = 0; j < M; ++j) {
    const Eigen::Vector3d p =
        j + 1 < M ? Eigen::Vector3d(refs.path_points[j + 1] - refs.path_points[j])
                  : Eigen::Vector3d::Zero();
    if (p.norm() < 1e-9)
      refs.psi.push_back(j > 0 ? refs.psi[j - 1] : 0.0);
    else
      refs.psi.push_back(relative_traversability(normal, f, p));
  }
  return refs;
}

PathTracker::Output PathTracker::step(const RobotState& current) {
  advance_watermark(current);
  refs_ = build_references(current);

  SolveResult r;
  if (params_.solver == SolverKind::kMppi)
    r = solve_mppi(maps_.trav, current, refs_, params_, warm_, rng_);
  else
    r = solve_mpc_gradient(maps_.trav, current, refs_, params_, warm_, rng_);

  Output out;
  out.u = r.first;
  out.psi = r.psi_first;
  out.r_scale = r.r_scale_first;
  out.w_k = r.w_first;
  out.objective = r.objective_value;
  out.at_end = watermark_ + 1 >= path_.waypoints.size();
  out.path_progress =
      arc_.back() > 1e-12 ? arc_[watermark_] / arc_.back() : 1.0;
  return out;
}

}  // namespace tnav
