#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tnav/controller/controller.hpp"
#include "tnav/planner/planner.hpp"
#include "tnav/traversability/traversability.hpp"

namespace tnav {

// Raised band across the x axis with sharp faces; an optional gap (in y)
// leaves a passage. Heights taper linearly to zero across the gap edges.
struct SillSpec {
  double x_center = 0.0;
  double height = 0.15;
  double width = 0.6;
  double gap_center = 0.0;
  double gap_half_width = 0.0;  // 0 = no gap
};

// Rounded bumps scattered by the terrain seed; density is bumps per square
// meter, radius/height are nominal (each instance varies by hashed factors).
struct RockSpec {
  double density = 0.0;
  double radius = 0.25;
  double height = 0.15;
};

// Sunken parabolic band across the x axis.
struct DitchSpec {
  double x_center = 0.0;
  double depth = 0.2;
  double width = 1.2;
};

// Vertical posts; cells under a post are vacant (no ground returns) and the
// post is a collision body for the simulator.
struct PillarSpec {
  int count = 0;
  double radius = 0.25;
};

struct TerrainSpec {
  std::string id = "terrain";
  int octaves = 3;
  double amplitude = 0.1;   // total fractal amplitude, meters
  double wavelength = 3.0;  // base octave wavelength, meters
  double inclination_deg = 0.0;  // global grade along +x
  std::vector<SillSpec> sills;
  RockSpec rocks;
  std::vector<DitchSpec> ditches;
  PillarSpec pillars;
  double extent_x = 18.0;
  double extent_y = 12.0;
  double resolution = 0.1;
  std::uint64_t seed = 1;

  void validate() const;
};

struct Pillar {
  double x = 0.0;
  double y = 0.0;
  double radius = 0.25;
};

struct Terrain {
  std::string id;
  TerrainMaps maps;
  std::vector<Pillar> obstacles;
  double inclination_deg = 0.0;
  std::uint64_t seed = 0;
};

// Deterministic synthesis: quantized (0.1 mm) heightfield from seeded fractal
// value noise + global incline + placed features, then the full analysis
// bundle via build_maps. Identical spec -> bit-identical terrain.
Terrain generate_terrain(const TerrainSpec& spec,
                         const TraversabilityParams& tp = {});

enum class Difficulty { kEasy, kPlain, kHard };
const char* to_string(Difficulty d);
Difficulty difficulty_from_string(const std::string& s);

struct DifficultyCuts {
  double easy_below = 0.15;
  double plain_below = 0.35;

  void validate() const;  // cuts must be ordered
};

// Mean apparent traversability over non-vacant cells.
double terrain_mean_tau(const Terrain& t);

Difficulty difficulty_level(const Terrain& t, const DifficultyCuts& cuts = {});

struct SimParams {
  double grade_max = 0.4663076581549986;    // tan(25 deg)
  double surmount_speed = 0.6;              // m/s needed to mount a step
  double tipover_max = 0.6108652381980153;  // 35 deg
  double ground_clearance = 0.13;
  double footprint_radius = 0.4;
  double probe = 0.1;  // leading-edge probe interval, meters
  double dt = 0.1;

  void validate() const;
};

struct SimRobot {
  RobotState pose;
  double z = 0.0;  // settled on the local plane
  Eigen::Vector3d forward_axis{1.0, 0.0, 0.0};  // in the local plane
  double roll = 0.0;
  double pitch = 0.0;  // positive nose-up
  double realized_speed = 0.0;
};

// Re-fit the footprint plane under (x, y) and settle z, forward_axis, and
// roll/pitch onto it. Falls back to the raw cell height (or keeps the old z)
// when the footprint has no usable fit.
SimRobot settle(const SimRobot& r, const Terrain& t, const SimParams& p);

struct StepFlags {
  bool collision = false;
  bool rollover = false;
  bool blocked = false;    // leading-edge step refused the move
  double traction = 1.0;
};

// Kinematic step with terrain coupling: the commanded unicycle displacement
// is scaled by traction max(0, 1 - climb_grade/grade_max), where climb_grade
// is the settled plane's elevation gain per meter along the motion direction;
// the move is refused outright when the raw height step one probe interval
// past the leading edge exceeds ground_clearance, unless |zeta| >=
// surmount_speed. Rotation is never scaled. Flat ground realizes the
// unicycle model exactly.
SimRobot sim_step(const SimRobot& r, const ControlInput& u, const Terrain& t,
                  const SimParams& p, StepFlags* flags = nullptr);

struct TrajectoryPoint {
  double t = 0.0;
  double x = 0.0, y = 0.0, theta = 0.0, z = 0.0;
  double zeta = 0.0, omega = 0.0;  // issued command
  double realized_speed = 0.0;
  double psi = 0.0, r_scale = 1.0, w_k = 0.0, objective = 0.0;
  double pred_x = 0.0, pred_y = 0.0;  // one-step model prediction
};

// True when both the position displacement and the heading change relative
// to the state at the start of the trailing window stay below the epsilons
// for the whole window. False while the trace is shorter than the window.
bool detect_stuck(const std::vector<TrajectoryPoint>& traj, double window,
                  double pos_eps, double ang_eps, double dt);

enum class FailureReason {
  kNone,
  kStuck,
  kCollision,
  kRollover,
  kTimeout,
  kPlanFailure
};
const char* to_string(FailureReason f);

struct Metrics {
  double aeg_mm = 0.0;     // mean |dz| per tick
  double trav_pct = 0.0;   // mean tau over planned waypoints, percent
  double trav_sum = 0.0;   // raw tau sum over planned waypoints
  double cte_cm = 0.0;     // mean distance to the nearest path segment
  double incons_cm = 0.0;  // mean model-vs-realized one-step gap
  double progress = 0.0;   // covered path arc fraction, [0, 1]
};

Metrics compute_metrics(const std::vector<TrajectoryPoint>& traj,
                        const PlannedPath& path);

struct EpisodeResult {
  bool success = false;
  int steps = 0;
  double progress = 0.0;
  double aeg_mm = 0.0;
  double trav_pct = 0.0;
  double trav_sum = 0.0;
  double cte_cm = 0.0;
  double incons_cm = 0.0;
  FailureReason failure_reason = FailureReason::kNone;
  std::vector<TrajectoryPoint> trajectory;
  PlannedPath path;
};

struct EpisodeConfig {
  PlannerParams planner;
  ControllerParams controller;
  SimParams sim;
  double cruise_speed = 0.7;    // desired |speed| along the path (m/s)
  int max_steps = 3000;
  double stuck_window = 30.0;   // seconds
  double stuck_pos_eps = 0.05;  // meters
  double stuck_ang_eps = 0.1;   // radians

  void validate() const;
};

// Plan once, then tick controller + simulator until the goal tolerance is
// met or a failure triggers. Planner failures are recorded in the result,
// not thrown. Deterministic in (terrain, start, goal, config, seed).
EpisodeResult run_episode(const Terrain& terrain, const Pose2& start,
                          const Pose2& goal, const EpisodeConfig& cfg,
                          std::uint64_t seed);

// Flat approach, one sharp sill across the route, flat runout: exercises the
// momentum rule (low-speed approaches are refused at the face).
TerrainSpec sill_scenario_spec(double sill_height = 0.17);

// 27 seeded specs spanning the three difficulty levels (9 gentle / 9 medium /
// 9 rough parameter groups).
std::vector<TerrainSpec> benchmark_suite();

// Copies of each base spec at inclinations 0/5/10/15 degrees, ids suffixed
// "_i<deg>".
std::vector<TerrainSpec> expand_inclinations(const std::vector<TerrainSpec>& base);

}  // namespace tnav
