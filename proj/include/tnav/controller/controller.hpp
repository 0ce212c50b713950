#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tnav/planner/planner.hpp"
#include "tnav/rng.hpp"
#include "tnav/traversability/traversability.hpp"

namespace tnav {

struct RobotState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // kept in (-pi, pi]

  Pose2 pose() const { return Pose2{x, y, theta}; }
  static RobotState from_pose(const Pose2& p) { return {p.x, p.y, p.heading}; }
};

struct ControlInput {
  double zeta = 0.0;   // longitudinal speed command (m/s), signed
  double omega = 0.0;  // yaw rate command (rad/s)
};

struct ObjectiveWeights {
  double qx = 10.0, qy = 10.0, qtheta = 1.0;  // state error weights
  double r_zeta = 0.5, r_omega = 0.5;         // control effort weights
  double w_v = 3.0;                           // velocity incentive base
  double k_q = 5.0;                           // pitch-boost gain
  double lambda_open = 1.0;                   // open-space cost weight
};

enum class SolverKind { kMppi, kMpcGradient };
SolverKind solver_from_string(const std::string& s);
const char* to_string(SolverKind k);

struct ControllerParams {
  ObjectiveWeights weights;
  int horizon = 20;
  double dt = 0.1;
  double zeta_min = -0.3, zeta_max = 1.0;
  double omega_max = 1.5;
  bool adaptive = true;  // false: R_k = R and W_k = W_v (open-space kept)
  SolverKind solver = SolverKind::kMppi;
  // Sampling solver.
  int rollouts = 256;
  double noise_zeta = 0.15;
  double noise_omega = 0.3;
  double temperature = 1.0;
  // Projected-gradient solver.
  int mpc_iterations = 30;
  double mpc_step = 0.05;
  double fd_epsilon = 1e-5;
  int line_search_max = 12;
  // Open-space traversability probe.
  int open_samples = 16;
  double open_radius = 0.3;
  // Pitch angles are clamped here before tan() so the boost stays finite.
  double psi_clamp = 1.55;
  // Path samples exposed to the solvers per step (must cover the farthest
  // horizon reach, zeta_max * dt * horizon, at the path station spacing).
  int ref_window = 64;

  void validate() const;
};

// Unicycle step: x += zeta cos(theta) dt, y += zeta sin(theta) dt,
// theta += omega dt (wrapped).
RobotState motion_step(const RobotState& s, const ControlInput& u, double dt);

// Forward simulation; returns s_1..s_T for T = controls.size().
std::vector<RobotState> rollout(const RobotState& s0,
                                const std::vector<ControlInput>& controls,
                                double dt);

// Control-effort scale (1 - mean_tau)^-2. Throws on mean_tau >= 1
// (saturated terrain); solvers treat that case as an infinite rollout cost
// instead of calling this.
double adaptive_R_scale(double mean_tau);

// Velocity incentive gain (1 + k_q * max(0, tan(psi))) * w_v; psi is clamped
// to +-psi_clamp first.
double adaptive_W(double psi, double w_v, double k_q, double psi_clamp = 1.55);

// A window of consecutive path samples starting at the tracker's watermark.
// All four vectors share one size. Tracking is nearest-sample: each rollout
// keeps a cursor into the window and advances it monotonically while the next
// sample is closer to the predicted position, so the path drives lateral and
// heading errors while the velocity incentive (not a time-indexed reference)
// drives progress. path_points carries the 3-D positions used for the
// per-sample pitch angles psi.
struct ReferenceWindow {
  std::vector<RobotState> states;
  std::vector<double> v_desired;
  std::vector<double> psi;
  std::vector<Eigen::Vector3d> path_points;

  std::size_t size() const { return states.size(); }
};

// Monotone nearest-sample cursor advance shared by the objective, the
// solvers, and their tests: starting at `cursor`, step forward while the next
// sample is at least as close to (x, y).
inline std::size_t advance_cursor(const ReferenceWindow& refs,
                                  std::size_t cursor, double x, double y) {
  const std::size_t n = refs.states.size();
  double best = square(x - refs.states[cursor].x) +
                square(y - refs.states[cursor].y);
  while (cursor + 1 < n) {
    const double d = square(x - refs.states[cursor + 1].x) +
                     square(y - refs.states[cursor + 1].y);
    if (d > best) break;
    best = d;
    ++cursor;
  }
  return cursor;
}

// Disc sample offsets for the open-space cost, drawn once per solve.
std::vector<std::pair<double, double>> draw_open_offsets(Rng& rng, int samples,
                                                         double radius);

// Mean traversability over the offsets around every predicted state; off-map
// probes count tau = 1.
double open_space_cost(const TraversabilityMap& trav,
                       const std::vector<RobotState>& states,
                       const std::vector<std::pair<double, double>>& offsets);

// Full horizon objective; pure in (states, controls, refs, offsets). Each
// predicted state is scored against its nearest window sample (monotone
// cursor from the window start). With adaptive enabled, saturated terrain
// under any predicted state yields +inf.
double objective(const TraversabilityMap& trav,
                 const std::vector<RobotState>& states,
                 const std::vector<ControlInput>& controls,
                 const ReferenceWindow& refs, const ObjectiveWeights& w,
                 bool adaptive,
                 const std::vector<std::pair<double, double>>& open_offsets);

struct SolveResult {
  ControlInput first;
  std::vector<ControlInput> sequence;
  double objective_value = 0.0;
  double r_scale_first = 1.0;  // effort scale at the first predicted state
  double w_first = 0.0;        // velocity gain of the first step
  double psi_first = 0.0;
};

// Sampling-based solver: perturbs the warm-started sequence with clamped
// Gaussian noise, softmax-averages the rollouts by cost, then shifts the
// result one step for the next call. Deterministic for a fixed seed.
SolveResult solve_mppi(const TraversabilityMap& trav, const RobotState& state,
                       const ReferenceWindow& refs,
                       const ControllerParams& params,
                       std::vector<ControlInput>& warm, Rng& rng);

// Projected-gradient solver with central finite differences and a monotone
// backtracking line search; open-space offsets are frozen per solve.
SolveResult solve_mpc_gradient(const TraversabilityMap& trav,
                               const RobotState& state,
                               const ReferenceWindow& refs,
                               const ControllerParams& params,
                               std::vector<ControlInput>& warm, Rng& rng);

// Tracks a planned path: anchors the reference window at the nearest
// waypoint (monotone watermark), exposes the next ref_window path samples to
// the solver, and delegates to the configured solver.
class PathTracker {
 public:
  PathTracker(const PlannedPath& path, const TerrainMaps& maps,
              const ControllerParams& params, std::uint64_t seed);

  struct Output {
    ControlInput u;
    double psi = 0.0;
    double r_scale = 1.0;
    double w_k = 0.0;
    double objective = 0.0;
    bool at_end = false;       // reference window collapsed onto the goal
    double path_progress = 0;  // watermark arc length / total arc length
  };
  Output step(const RobotState& current);

  const ReferenceWindow& last_references() const { return refs_; }
  double total_arc() const { return arc_.empty() ? 0.0 : arc_.back(); }

 private:
  void advance_watermark(const RobotState& current);
  ReferenceWindow build_references(const RobotState& current) const;

  const TerrainMaps& maps_;
  ControllerParams params_;
  PlannedPath path_;
  std::vector<double> arc_;  // cumulative XY arc length per waypoint
  std::size_t watermark_ = 0;
  std::vector<ControlInput> warm_;
  Rng rng_;
  ReferenceWindow refs_;
};

}  // namespace tnav
