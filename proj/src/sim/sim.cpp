#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <limits>

#include "tnav/errors.hpp"
#include "tnav/sim/sim.hpp"

namespace tnav {

void SimParams::validate() const {
  if (!(grade_max > 0.0)) throw ConfigError("grade_max must be > 0");
  if (surmount_speed < 0.0) throw ConfigError("surmount_speed must be >= 0");
  if (!(tipover_max > 0.0)) throw ConfigError("tipover_max must be > 0");
  if (!(ground_clearance > 0.0))
    throw ConfigError("ground_clearance must be > 0");
  if (!(footprint_radius > 0.0))
    throw ConfigError("footprint_radius must be > 0");
  if (!(probe > 0.0)) throw ConfigError("probe must be > 0");
  if (!(dt > 0.0)) throw ConfigError("sim dt must be > 0");
}

void EpisodeConfig::validate() const {
  planner.validate();
  controller.validate();
  sim.validate();
  if (!(cruise_speed > 0.0)) throw ConfigError("cruise_speed must be > 0");
  if (max_steps < 1) throw ConfigError("max_steps must be >= 1");
  if (!(stuck_window > 0.0) || !(stuck_pos_eps > 0.0) || !(stuck_ang_eps > 0.0))
    throw ConfigError("stuck detection thresholds must be positive");
}

const char* to_string(FailureReason f) {
  switch (f) {
    case FailureReason::kNone: return "none";
    case FailureReason::kStuck: return "stuck";
    case FailureReason::kCollision: return "collision";
    case FailureReason::kRollover: return "rollover";
    case FailureReason::kTimeout: return "timeout";
    case FailureReason::kPlanFailure: return "plan_failure";
  }
  return "?";
}

SimRobot settle(const SimRobot& r, const Terrain& t, const SimParams& p) {
  SimRobot out = r;
  const HeightMap& hm = t.maps.height;
  const GridSpec& gs = hm.spec;
  const int half =
      std::max(1, static_cast<int>(std::lround(p.footprint_radius / gs.resolution)));
  const int rr = gs.row_of(r.pose.y);
  const int cc = gs.col_of(r.pose.x);

  Eigen::Vector3d n(0.0, 0.0, 1.0);
  bool have_plane = false;
  if (gs.in_bounds(rr, cc)) {
    const Kernel k = extract_kernel(hm, rr, cc, 2 * half + 1);
    const PlaneFit fit = fit_plane(k);
    if (fit.valid) {
      const double z =
          fit.z_at(r.pose.x - gs.center_x(cc), r.pose.y - gs.center_y(rr));
      if (std::isfinite(z)) {
        n = fit.normal;
        out.z = z;
        have_plane = true;
      }
    }
  }
  if (!have_plane) {
    const double zs = hm.sample(r.pose.x, r.pose.y);
    if (std::isfinite(zs)) out.z = zs;  // else keep the previous height
  }

  const Eigen::Vector3d h(std::cos(r.pose.theta), std::sin(r.pose.theta), 0.0);
  Eigen::Vector3d f = h - h.dot(n) * n;
  if (f.norm() < 1e-9) f = h;
  f.normalize();
  out.forward_axis = f;
  out.pitch = std::asin(clamp(f.z(), -1.0, 1.0));
  const Eigen::Vector3d left = n.cross(f);
  out.roll = std::asin(clamp(left.z(), -1.0, 1.0));
  return out;
}

SimRobot sim_step(const SimRobot& r, const ControlInput& u, const Terrain& t,
                  const SimParams& p, StepFlags* flags) {
  StepFlags f;
  const RobotState tentative = motion_step(r.pose, u, p.dt);

  double mu = 1.0;
  if (u.zeta != 0.0) {
    const double sgn = u.zeta > 0.0 ? 1.0 : -1.0;
    // Elevation gain per meter of travel, from the settled footprint plane.
    const double horiz = std::hypot(r.forward_axis.x(), r.forward_axis.y());
    const double climb =
        horiz > 1e-12 ? std::max(0.0, sgn * r.forward_axis.z() / horiz) : 0.0;
    mu = std::max(0.0, 1.0 - climb / p.grade_max);
    // A raw height step just past the leading edge refuses the move outright
    // below the surmount speed; the plane fit smooths ramps away, so only
    // near-vertical faces trigger this.
    const double dx = sgn * std::cos(r.pose.theta);
    const double dy = sgn * std::sin(r.pose.theta);
    const double ax = r.pose.x + dx * p.footprint_radius;
    const double ay = r.pose.y + dy * p.footprint_radius;
    const double za = t.maps.height.sample(ax, ay);
    const double zb =
        t.maps.height.sample(ax + dx * p.probe, ay + dy * p.probe);
    if (std::isfinite(za) && std::isfinite(zb) &&
        zb - za > p.ground_clearance && std::fabs(u.zeta) < p.surmount_speed) {
      mu = 0.0;
      f.blocked = true;
    }
  }
  f.traction = mu;

  SimRobot out = r;
  if (mu == 1.0) {
    out.pose = tentative;  // flat/descending ground realizes the model exactly
  } else {
    out.pose.x = r.pose.x + mu * (tentative.x - r.pose.x);
    out.pose.y = r.pose.y + mu * (tentative.y - r.pose.y);
    out.pose.theta = tentative.theta;  // rotation is never traction-scaled
  }
  out.realized_speed = mu * u.zeta;
  out = settle(out, t, p);

  for (const auto& pil : t.obstacles) {
    if (std::hypot(out.pose.x - pil.x, out.pose.y - pil.y) <
        p.footprint_radius + pil.radius) {
      f.collision = true;
      break;
    }
  }
  if (std::fabs(out.roll) > p.tipover_max ||
      std::fabs(out.pitch) > p.tipover_max)
    f.rollover = true;
  if (flags) *flags = f;
  return out;
}

bool detect_stuck(const std::vector<TrajectoryPoint>& traj, double window,
                  double pos_eps, double ang_eps, double dt) {
  TNAV_REQUIRE(window > 0.0 && dt > 0.0, "stuck window and dt must be positive");
  const std::size_t span = static_cast<std::size_t>(std::lround(window / dt));
  if (traj.size() < span + 1) return false;
  const std::size_t start = traj.size() - span - 1;
  const TrajectoryPoint& s0 = traj[start];
  for (std::size_t i = start + 1; i < traj.size(); ++i) {
    if (std::hypot(traj[i].x - s0.x, traj[i].y - s0.y) >= pos_eps) return false;
    if (std::fabs(angle_diff(traj[i].theta, s0.theta)) >= ang_eps) return false;
  }
  return true;
}

Metrics compute_metrics(const std::vector<TrajectoryPoint>& traj,
                        const PlannedPath& path) {
  TNAV_REQUIRE(!traj.empty(), "metrics need a non-empty trajectory");
  Metrics m;
  const std::size_t n = traj.size();

  if (n > 1) {
    double dz = 0.0, gap = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      dz += std::fabs(traj[i].z - traj[i - 1].z);
      gap += std::hypot(traj[i].x - traj[i - 1].pred_x,
                        traj[i].y - traj[i - 1].pred_y);
    }
    m.aeg_mm = dz / static_cast<double>(n - 1) * 1000.0;
    m.incons_cm = gap / static_cast<double>(n - 1) * 100.0;
  }

  const auto& wps = path.waypoints;
  for (const auto& w : wps) m.trav_sum += w.tau;
  m.trav_pct =
      wps.empty() ? 0.0 : m.trav_sum / static_cast<double>(wps.size()) * 100.0;

  if (wps.size() < 2) {
    m.progress = wps.empty() ? 0.0 : 1.0;
    return m;
  }
  std::vector<double> arc(wps.size(), 0.0);
  for (std::size_t i = 1; i < wps.size(); ++i)
    arc[i] = arc[i - 1] + std::hypot(wps[i].x - wps[i - 1].x,
                                     wps[i].y - wps[i - 1].y);
  double cte_sum = 0.0;
  double covered = 0.0;  // nearest-projection watermark, monotone via max
  for (const auto& pt : traj) {
    double best = std::numeric_limits<double>::infinity();
    double best_arc = 0.0;
    for (std::size_t s = 0; s + 1 < wps.size(); ++s) {
      const double ax = wps[s].x, ay = wps[s].y;
      const double vx = wps[s + 1].x - ax, vy = wps[s + 1].y - ay;
      const double l2 = vx * vx + vy * vy;
      const double tt =
          l2 > 1e-18
              ? clamp(((pt.x - ax) * vx + (pt.y - ay) * vy) / l2, 0.0, 1.0)
              : 0.0;
      const double px = ax + tt * vx, py = ay + tt * vy;
      const double d2 = square(pt.x - px) + square(pt.y - py);
      if (d2 < best) {
        best = d2;
        best_arc = arc[s] + tt * std::sqrt(l2);
      }
    }
    cte_sum += std::sqrt(best);
    covered = std::max(covered, best_arc);
  }
  m.cte_cm = cte_sum / static_cast<double>(n) * 100.0;
  m.progress = arc.back() > 1e-12 ? clamp(covered / arc.back(), 0.0, 1.0) : 1.0;
  return m;
}

EpisodeResult run_episode(const Terrain& terrain, const Pose2& start,
                          const Pose2& goal, const EpisodeConfig& cfg,
                          std::uint64_t seed) {
  cfg.validate();
  EpisodeResult res;

  // The flatness-baseline planner scores a different bumpiness feature;
  // rebuild the analysis planes from the same heightfield when needed.
  const TerrainMaps* maps = &terrain.maps;
  TerrainMaps rebuilt;
  {
    TraversabilityParams tp = terrain.maps.params;
    const BumpinessMode want = method_bumpiness_mode(cfg.planner.method);
    if (want != tp.bumpiness_mode) {
      tp.bumpiness_mode = want;
      rebuilt = build_maps(terrain.maps.height, tp);
      maps = &rebuilt;
    }
  }

  PlannedPath path;
  try {
    path = plan(*maps, start, goal, cfg.planner,
                hash_combine(seed, hash64("plan")));
  } catch (const Error&) {
    //  Unreachable or invalid endpoints on this terrain; recorded, not thrown.
    res.failure_reason = FailureReason::kPlanFailure;
    return res;
  }
  if (!path.success || path.waypoints.size() < 2) {
    res.failure_reason = FailureReason::kPlanFailure;
    return res;
  }
  assign_desired_velocity(path, cfg.cruise_speed, cfg.controller.zeta_min);
  res.path = path;

  SimRobot robot;
  robot.pose = RobotState::from_pose(start);
  robot = settle(robot, terrain, cfg.sim);

  PathTracker tracker(path, *maps, cfg.controller,
                      hash_combine(seed, hash64("track")));

  bool success = false;
  FailureReason fail = FailureReason::kTimeout;
  res.trajectory.reserve(static_cast<std::size_t>(cfg.max_steps) + 1);
  for (int k = 0; k < cfg.max_steps; ++k) {
    const auto out = tracker.step(robot.pose);
    const RobotState pred = motion_step(robot.pose, out.u, cfg.sim.dt);

    TrajectoryPoint tp;
    tp.t = k * cfg.sim.dt;
    tp.x = robot.pose.x;
    tp.y = robot.pose.y;
    tp.theta = robot.pose.theta;
    tp.z = robot.z;
    tp.zeta = out.u.zeta;
    tp.omega = out.u.omega;
    tp.realized_speed = robot.realized_speed;
    tp.psi = out.psi;
    tp.r_scale = out.r_scale;
    tp.w_k = out.w_k;
    tp.objective = out.objective;
    tp.pred_x = pred.x;
    tp.pred_y = pred.y;
    res.trajectory.push_back(tp);

    StepFlags flags;
    robot = sim_step(robot, out.u, terrain, cfg.sim, &flags);
    res.steps = k + 1;

    if (flags.collision) {
      fail = FailureReason::kCollision;
      break;
    }
    if (flags.rollover) {
      fail = FailureReason::kRollover;
      break;
    }
    if (std::hypot(robot.pose.x - goal.x, robot.pose.y - goal.y) <=
            cfg.planner.goal_tolerance &&
        std::fabs(angle_diff(robot.pose.theta, goal.heading)) <=
            cfg.planner.goal_heading_tolerance) {
      success = true;
      fail = FailureReason::kNone;
      break;
    }
    if (detect_stuck(res.trajectory, cfg.stuck_window, cfg.stuck_pos_eps,
                     cfg.stuck_ang_eps, cfg.sim.dt)) {
      fail = FailureReason::kStuck;
      break;
    }
  }

  TrajectoryPoint last;
  last.t = res.steps * cfg.sim.dt;
  last.x = robot.pose.x;
  last.y = robot.pose.y;
  last.theta = robot.pose.theta;
  last.z = robot.z;
  last.realized_speed = robot.realized_speed;
  last.pred_x = robot.pose.x;
  last.pred_y = robot.pose.y;
  res.trajectory.push_back(last);

  const Metrics m = compute_metrics(res.trajectory, path);
  res.success = success;
  res.failure_reason = fail;
  res.aeg_mm = m.aeg_mm;
  res.trav_pct = m.trav_pct;
  res.trav_sum = m.trav_sum;
  res.cte_cm = m.cte_cm;
  res.incons_cm = m.incons_cm;
  res.progress = success ? 1.0 : m.progress;
  return res;
}

}  // namespace tnav
