#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "tnav/errors.hpp"
#include "tnav/rng.hpp"
#include "tnav/sim/sim.hpp"

namespace tnav {
namespace {

TerrainSpec flat_spec() {
  TerrainSpec spec;
  spec.id = "flat";
  spec.octaves = 1;
  spec.amplitude = 0.0;
  spec.extent_x = 12.0;
  spec.extent_y = 8.0;
  spec.seed = 3;
  return spec;
}

TerrainSpec incline_spec(double deg) {
  TerrainSpec spec = flat_spec();
  spec.id = "incline";
  spec.inclination_deg = deg;
  return spec;
}

TEST(Terrain, GenerationIsBitDeterministic) {
  TerrainSpec spec;
  spec.id = "det";
  spec.octaves = 3;
  spec.amplitude = 0.12;
  spec.wavelength = 3.0;
  spec.extent_x = 10.0;
  spec.extent_y = 8.0;
  spec.seed = 42;
  spec.rocks = {0.08, 0.25, 0.12};
  spec.sills.push_back({5.0, 0.12, 0.5, 4.0, 1.1});
  spec.pillars = {2, 0.3};

  const Terrain a = generate_terrain(spec);
  const Terrain b = generate_terrain(spec);
  ASSERT_EQ(a.maps.height.z.size(), b.maps.height.z.size());
  for (std::size_t i = 0; i < a.maps.height.z.size(); ++i) {
    if (std::isnan(a.maps.height.z[i])) {
      EXPECT_TRUE(std::isnan(b.maps.height.z[i]));
    } else {
      EXPECT_DOUBLE_EQ(a.maps.height.z[i], b.maps.height.z[i]);
    }
    EXPECT_DOUBLE_EQ(a.maps.trav.tau[i], b.maps.trav.tau[i]);
    EXPECT_EQ(a.maps.constraint.gamma[i], b.maps.constraint.gamma[i]);
  }
  ASSERT_EQ(a.obstacles.size(), b.obstacles.size());
  for (std::size_t i = 0; i < a.obstacles.size(); ++i) {
    EXPECT_DOUBLE_EQ(a.obstacles[i].x, b.obstacles[i].x);
    EXPECT_DOUBLE_EQ(a.obstacles[i].y, b.obstacles[i].y);
  }

  // A different seed actually moves the ground.
  spec.seed = 43;
  const Terrain c = generate_terrain(spec);
  int differing = 0;
  for (std::size_t i = 0; i < a.maps.height.z.size(); ++i) {
    if (std::isnan(a.maps.height.z[i]) || std::isnan(c.maps.height.z[i]))
      continue;
    differing += a.maps.height.z[i] != c.maps.height.z[i];
  }
  EXPECT_GT(differing, 1000);
}

TEST(Terrain, HeightsAreQuantizedToTenthMillimeter) {
  TerrainSpec spec;
  spec.octaves = 4;
  spec.amplitude = 0.2;
  spec.extent_x = 8.0;
  spec.extent_y = 6.0;
  spec.inclination_deg = 7.0;
  spec.seed = 17;
  const Terrain t = generate_terrain(spec);
  for (double z : t.maps.height.z) {
    if (std::isnan(z)) continue;
    const double q = z * 10000.0;
    EXPECT_NEAR(q, std::nearbyint(q), 1e-6);
  }
}

TEST(Terrain, InclineRaisesGroundAlongX) {
  const Terrain t = generate_terrain(incline_spec(10.0));
  const double z_low = t.maps.height.sample(1.0, 4.0);
  const double z_high = t.maps.height.sample(11.0, 4.0);
  EXPECT_NEAR(z_high - z_low, 10.0 * std::tan(10.0 * kPi / 180.0),
              0.02);  // quantization + cell-center offsets
}

TEST(Terrain, DifficultyTracksRoughness) {
  const Terrain flat = generate_terrain(flat_spec());
  EXPECT_LT(terrain_mean_tau(flat), 0.05);
  EXPECT_EQ(difficulty_level(flat), Difficulty::kEasy);

  TerrainSpec rough;
  rough.id = "rough";
  rough.octaves = 4;
  rough.amplitude = 0.25;
  rough.wavelength = 2.0;
  rough.extent_x = 12.0;
  rough.extent_y = 8.0;
  rough.seed = 9;
  rough.rocks = {0.2, 0.3, 0.2};
  const Terrain r = generate_terrain(rough);
  EXPECT_GT(terrain_mean_tau(r), terrain_mean_tau(flat));

  DifficultyCuts bad{0.5, 0.2};
  EXPECT_THROW(bad.validate(), ConfigError);
  EXPECT_EQ(difficulty_from_string("easy"), Difficulty::kEasy);
  EXPECT_EQ(difficulty_from_string(to_string(Difficulty::kHard)),
            Difficulty::kHard);
  EXPECT_THROW(difficulty_from_string("extreme"), ConfigError);
}

TEST(Settle, FlatGroundIsLevel) {
  const Terrain t = generate_terrain(flat_spec());
  SimRobot r;
  r.pose = RobotState{4.0, 4.0, 0.7};
  const SimRobot s = settle(r, t, SimParams{});
  EXPECT_NEAR(s.z, 0.0, 1e-9);
  EXPECT_NEAR(s.pitch, 0.0, 1e-9);
  EXPECT_NEAR(s.roll, 0.0, 1e-9);
  EXPECT_NEAR(s.forward_axis.x(), std::cos(0.7), 1e-9);
  EXPECT_NEAR(s.forward_axis.y(), std::sin(0.7), 1e-9);
  EXPECT_NEAR(s.forward_axis.z(), 0.0, 1e-9);
}

TEST(Settle, InclineGivesPitchAndRoll) {
  const double deg = 12.0;
  const double rad = deg * kPi / 180.0;
  const Terrain t = generate_terrain(incline_spec(deg));
  SimParams p;
  SimRobot r;
  // Facing uphill: pure nose-up pitch.
  r.pose = RobotState{6.0, 4.0, 0.0};
  const SimRobot up = settle(r, t, p);
  EXPECT_NEAR(up.pitch, rad, 0.02);
  EXPECT_NEAR(up.roll, 0.0, 0.02);
  // Facing downhill: nose-down.
  r.pose.theta = kPi;
  EXPECT_NEAR(settle(r, t, p).pitch, -rad, 0.02);
  // Facing across the slope: pure roll.
  r.pose.theta = kPi / 2;
  const SimRobot across = settle(r, t, p);
  EXPECT_NEAR(across.pitch, 0.0, 0.02);
  EXPECT_NEAR(std::abs(across.roll), rad, 0.02);
}

TEST(Settle, OffMapKeepsPreviousHeight) {
  const Terrain t = generate_terrain(flat_spec());
  SimRobot r;
  r.pose = RobotState{-5.0, -5.0, 0.0};
  r.z = 1.25;
  const SimRobot s = settle(r, t, SimParams{});
  EXPECT_DOUBLE_EQ(s.z, 1.25);
}

TEST(SimStep, FlatGroundRealizesModelExactly) {
  const Terrain t = generate_terrain(flat_spec());
  const SimParams p;
  SimRobot r;
  r.pose = RobotState{3.0, 4.0, 0.4};
  r = settle(r, t, p);
  const ControlInput u{0.7, 0.3};
  StepFlags flags;
  const SimRobot s = sim_step(r, u, t, p, &flags);
  const RobotState want = motion_step(r.pose, u, p.dt);
  // mu == 1 takes the exact passthrough branch: bitwise equality.
  EXPECT_EQ(s.pose.x, want.x);
  EXPECT_EQ(s.pose.y, want.y);
  EXPECT_EQ(s.pose.theta, want.theta);
  EXPECT_DOUBLE_EQ(s.realized_speed, 0.7);
  EXPECT_DOUBLE_EQ(flags.traction, 1.0);
  EXPECT_FALSE(flags.blocked);
  EXPECT_FALSE(flags.collision);
  EXPECT_FALSE(flags.rollover);
}

TEST(SimStep, ClimbScalesTractionDescentDoesNot) {
  const double deg = 15.0;
  const Terrain t = generate_terrain(incline_spec(deg));
  const SimParams p;
  SimRobot up;
  up.pose = RobotState{5.0, 4.0, 0.0};  // facing uphill
  up = settle(up, t, p);
  const ControlInput u{0.7, 0.0};
  StepFlags flags;
  const SimRobot s = sim_step(up, u, t, p, &flags);
  const double climb = std::tan(deg * kPi / 180.0);
  const double mu_want = 1.0 - climb / p.grade_max;
  EXPECT_NEAR(flags.traction, mu_want, 0.02);
  EXPECT_NEAR(s.pose.x - up.pose.x, mu_want * 0.7 * p.dt, 0.002);
  EXPECT_FALSE(flags.blocked);

  // Downhill: no climb, exact model.
  SimRobot down;
  down.pose = RobotState{8.0, 4.0, kPi};
  down = settle(down, t, p);
  StepFlags dflags;
  const SimRobot sd = sim_step(down, u, t, p, &dflags);
  EXPECT_DOUBLE_EQ(dflags.traction, 1.0);
  EXPECT_EQ(sd.pose.x, motion_step(down.pose, u, p.dt).x);

  // Steeper than grade_max: the climb stalls entirely.
  const Terrain steep = generate_terrain(incline_spec(30.0));
  SimRobot stuck;
  stuck.pose = RobotState{5.0, 4.0, 0.0};
  stuck = settle(stuck, steep, p);
  StepFlags sflags;
  const SimRobot ss = sim_step(stuck, u, steep, p, &sflags);
  EXPECT_DOUBLE_EQ(sflags.traction, 0.0);
  EXPECT_DOUBLE_EQ(ss.pose.x, stuck.pose.x);
}

TEST(SimStep, PitchPastTipoverFlagsRollover) {
  const Terrain t = generate_terrain(incline_spec(40.0));  // > 35 deg limit
  const SimParams p;
  SimRobot r;
  r.pose = RobotState{5.0, 4.0, 0.0};
  r = settle(r, t, p);
  ASSERT_GT(r.pitch, p.tipover_max);
  StepFlags flags;
  sim_step(r, {0.3, 0.0}, t, p, &flags);
  EXPECT_TRUE(flags.rollover);
}

TEST(SimStep, RotationIsNeverTractionScaled) {
  const Terrain steep = generate_terrain(incline_spec(30.0));
  const SimParams p;
  SimRobot r;
  r.pose = RobotState{5.0, 4.0, 0.0};
  r = settle(r, steep, p);
  const ControlInput u{0.5, 1.0};
  const SimRobot s = sim_step(r, u, steep, p);
  EXPECT_NEAR(angle_diff(s.pose.theta, r.pose.theta), 0.1, 1e-12);
}

TEST(SimStep, LeadingEdgeStepBlocksSlowApproach) {
  // 0.17 m sharp sill: taller than the 0.13 m clearance.
  const Terrain t = generate_terrain(sill_scenario_spec(0.17));
  const SimParams p;
  // Probe just past the leading edge must land on the sill face: robot at
  // face - footprint_radius - probe/2.
  const double face_x = 6.0 - 0.2;  // sill spans [5.8, 6.2]
  SimRobot r;
  r.pose = RobotState{face_x - p.footprint_radius - 0.05, 4.0, 0.0};
  r = settle(r, t, p);

  const ControlInput slow{0.3, 0.0};
  StepFlags flags;
  const SimRobot s = sim_step(r, slow, t, p, &flags);
  EXPECT_TRUE(flags.blocked);
  EXPECT_DOUBLE_EQ(flags.traction, 0.0);
  EXPECT_DOUBLE_EQ(s.pose.x, r.pose.x);

  // At surmount speed the same approach is allowed through.
  const ControlInput fast{0.65, 0.0};
  StepFlags fflags;
  const SimRobot sf = sim_step(r, fast, t, p, &fflags);
  EXPECT_FALSE(fflags.blocked);
  EXPECT_GT(sf.pose.x, r.pose.x);

  // A sill below the clearance never triggers the rule.
  const Terrain low = generate_terrain(sill_scenario_spec(0.10));
  SimRobot rl = r;
  rl = settle(rl, low, p);
  StepFlags lflags;
  sim_step(rl, slow, low, p, &lflags);
  EXPECT_FALSE(lflags.blocked);
}

TEST(SimStep, PillarContactIsCollision) {
  TerrainSpec spec = flat_spec();
  spec.id = "pillars";
  spec.pillars = {3, 0.3};
  const Terrain t = generate_terrain(spec);
  ASSERT_FALSE(t.obstacles.empty());
  const Pillar& pil = t.obstacles.front();
  const SimParams p;
  SimRobot r;
  r.pose = RobotState{pil.x - p.footprint_radius - pil.radius + 0.02, pil.y, 0.0};
  r = settle(r, t, p);
  StepFlags flags;
  sim_step(r, {0.0, 0.0}, t, p, &flags);
  EXPECT_TRUE(flags.collision);
}

TEST(StuckDetector, RequiresFullQuietWindow) {
  auto traj_of = [](int n, double step_x, double step_theta) {
    std::vector<TrajectoryPoint> traj(n);
    for (int i = 0; i < n; ++i) {
      traj[i].x = i * step_x;
      traj[i].theta = i * step_theta;
    }
    return traj;
  };
  // window 3 s at dt 0.1 -> 30 ticks + anchor.
  EXPECT_FALSE(detect_stuck(traj_of(20, 0.0, 0.0), 3.0, 0.05, 0.1, 0.1));
  EXPECT_TRUE(detect_stuck(traj_of(40, 0.0, 0.0), 3.0, 0.05, 0.1, 0.1));
  // Position drift beyond eps resets the verdict.
  EXPECT_FALSE(detect_stuck(traj_of(40, 0.01, 0.0), 3.0, 0.05, 0.1, 0.1));
  // Pure rotation also counts as movement.
  EXPECT_FALSE(detect_stuck(traj_of(40, 0.0, 0.02), 3.0, 0.05, 0.1, 0.1));
  // Tiny jitter below both epsilons is still stuck.
  EXPECT_TRUE(detect_stuck(traj_of(40, 0.0001, 0.0001), 3.0, 0.05, 0.1, 0.1));
}

TEST(Metrics, HandAssembledExample) {
  PlannedPath path;
  for (double x : {0.0, 1.0, 2.0}) {
    PlannedPath::Waypoint w;
    w.x = x;
    w.y = 0.0;
    w.tau = 0.25;
    path.waypoints.push_back(w);
  }
  std::vector<TrajectoryPoint> traj(3);
  traj[0] = {};  // (0, 0), z 0
  traj[0].pred_x = 0.5;
  traj[0].pred_y = 0.0;
  traj[1].x = 0.5;
  traj[1].y = 0.1;  // 0.1 off the segment
  traj[1].z = 0.02;
  traj[1].pred_x = 1.0;
  traj[1].pred_y = 0.1;
  traj[2].x = 1.0;
  traj[2].y = 0.0;
  traj[2].z = 0.01;
  traj[2].pred_x = 1.0;
  traj[2].pred_y = 0.0;

  const Metrics m = compute_metrics(traj, path);
  // aeg: (|0.02 - 0| + |0.01 - 0.02|) / 2 = 0.015 m -> 15 mm.
  EXPECT_NEAR(m.aeg_mm, 15.0, 1e-9);
  // inconsistency: gaps (0.1, 0.1) -> mean 0.1 m -> 10 cm.
  EXPECT_NEAR(m.incons_cm, 10.0, 1e-9);
  // cte: distances 0, 0.1, 0 -> mean / 3 -> in cm.
  EXPECT_NEAR(m.cte_cm, 0.1 / 3.0 * 100.0, 1e-9);
  // progress: farthest projection at x = 1 of 2 m total.
  EXPECT_NEAR(m.progress, 0.5, 1e-9);
  // traversability: mean tau 0.25 -> 25 %.
  EXPECT_NEAR(m.trav_pct, 25.0, 1e-9);
  EXPECT_NEAR(m.trav_sum, 0.75, 1e-12);
}

EpisodeConfig quick_episode() {
  EpisodeConfig cfg;
  cfg.planner.iterations = 2000;
  cfg.planner.stall_window = 300;
  cfg.controller.rollouts = 128;
  cfg.max_steps = 1500;
  return cfg;
}

TEST(Episode, SucceedsOnFlatTerrain) {
  const Terrain t = generate_terrain(flat_spec());
  const EpisodeConfig cfg = quick_episode();
  const Pose2 start{1.0, 4.0, 0.0}, goal{11.0, 4.0, 0.0};
  const EpisodeResult res = run_episode(t, start, goal, cfg, 12345);
  EXPECT_TRUE(res.success);
  EXPECT_EQ(res.failure_reason, FailureReason::kNone);
  EXPECT_DOUBLE_EQ(res.progress, 1.0);
  EXPECT_LT(res.cte_cm, 10.0);
  EXPECT_LT(res.aeg_mm, 5.0);
  EXPECT_GT(res.steps, 10);
}

TEST(Episode, DeterministicForFixedSeed) {
  const Terrain t = generate_terrain(flat_spec());
  const EpisodeConfig cfg = quick_episode();
  const Pose2 start{1.0, 4.0, 0.0}, goal{11.0, 4.0, 0.0};
  const EpisodeResult a = run_episode(t, start, goal, cfg, 777);
  const EpisodeResult b = run_episode(t, start, goal, cfg, 777);
  ASSERT_EQ(a.trajectory.size(), b.trajectory.size());
  for (std::size_t i = 0; i < a.trajectory.size(); ++i) {
    EXPECT_EQ(a.trajectory[i].x, b.trajectory[i].x);
    EXPECT_EQ(a.trajectory[i].y, b.trajectory[i].y);
    EXPECT_EQ(a.trajectory[i].theta, b.trajectory[i].theta);
    EXPECT_EQ(a.trajectory[i].zeta, b.trajectory[i].zeta);
    EXPECT_EQ(a.trajectory[i].omega, b.trajectory[i].omega);
  }
  EXPECT_EQ(a.steps, b.steps);
  EXPECT_EQ(a.success, b.success);
  EXPECT_DOUBLE_EQ(a.aeg_mm, b.aeg_mm);
  EXPECT_DOUBLE_EQ(a.cte_cm, b.cte_cm);
}

TEST(Episode, PlanFailureIsRecordedNotThrown) {
  const Terrain t = generate_terrain(flat_spec());
  const EpisodeConfig cfg = quick_episode();
  const EpisodeResult res =
      run_episode(t, {1.0, 4.0, 0.0}, {99.0, 4.0, 0.0}, cfg, 1);
  EXPECT_FALSE(res.success);
  EXPECT_EQ(res.failure_reason, FailureReason::kPlanFailure);
  EXPECT_DOUBLE_EQ(res.progress, 0.0);
}

// Episode configuration for the sill-crossing comparison. The step is taller
// than the ground clearance, so the simulator refuses contact below the
// surmount speed; with the speed-effort damping below, the fixed-weight
// controller's velocity equilibrium settles well under that threshold while
// the pitch-boosted one commands enough speed at the face to mount it.
EpisodeConfig sill_episode() {
  EpisodeConfig cfg;
  cfg.planner.method = PlannerMethod::kTao;
  cfg.planner.iterations = 2000;
  cfg.planner.stall_window = 300;
  cfg.controller.rollouts = 256;
  cfg.controller.noise_zeta = 0.10;
  cfg.controller.weights.r_zeta = 1.5;
  cfg.cruise_speed = 0.75;
  cfg.stuck_window = 12.0;
  cfg.max_steps = 1500;
  return cfg;
}

TEST(Episode, SillSeparatesAdaptiveFromVanilla) {
  const Terrain t = generate_terrain(sill_scenario_spec(0.17));
  EpisodeConfig cfg = sill_episode();
  const Pose2 start{1.0, 4.0, 0.0}, goal{11.0, 4.0, 0.0};

  cfg.controller.adaptive = true;
  const EpisodeResult adaptive = run_episode(t, start, goal, cfg, 4);
  EXPECT_TRUE(adaptive.success) << to_string(adaptive.failure_reason);

  cfg.controller.adaptive = false;
  const EpisodeResult vanilla = run_episode(t, start, goal, cfg, 4);
  EXPECT_FALSE(vanilla.success);
  EXPECT_EQ(vanilla.failure_reason, FailureReason::kStuck);
  EXPECT_LT(vanilla.progress, 0.99);
  // Stuck means the commanded speed stalled: the last second of commands all
  // sit below the surmount threshold and the robot stopped translating.
  ASSERT_GE(vanilla.trajectory.size(), 10u);
  for (std::size_t i = vanilla.trajectory.size() - 10;
       i < vanilla.trajectory.size(); ++i) {
    EXPECT_LT(vanilla.trajectory[i].zeta, 0.6);
    EXPECT_DOUBLE_EQ(vanilla.trajectory[i].realized_speed, 0.0);
  }
}

TEST(Suite, TwentySevenSpecsWithUniqueIds) {
  const auto suite = benchmark_suite();
  ASSERT_EQ(suite.size(), 27u);
  std::set<std::string> ids;
  for (const auto& s : suite) {
    EXPECT_NO_THROW(s.validate());
    ids.insert(s.id);
  }
  EXPECT_EQ(ids.size(), 27u);
}

TEST(Suite, InclinationExpansionSuffixesIds) {
  const auto suite = benchmark_suite();
  const auto expanded = expand_inclinations(suite);
  ASSERT_EQ(expanded.size(), suite.size() * 4);
  EXPECT_EQ(expanded[0].id, "t01_i0");
  EXPECT_DOUBLE_EQ(expanded[0].inclination_deg, 0.0);
  EXPECT_EQ(expanded[3].id, "t01_i15");
  EXPECT_DOUBLE_EQ(expanded[3].inclination_deg, 15.0);
  EXPECT_EQ(expanded[4].id, "t02_i0");
}

TEST(Validation, SpecAndConfigChecks) {
  TerrainSpec spec = flat_spec();
  EXPECT_NO_THROW(spec.validate());
  spec.resolution = 0.0;
  EXPECT_THROW(spec.validate(), ConfigError);

  SimParams p;
  EXPECT_NO_THROW(p.validate());
  p.ground_clearance = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);

  EpisodeConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.cruise_speed = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

}  // namespace
}  // namespace tnav
