#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tnav/sim/sim.hpp"

namespace tnav {

// One benchmark matrix entry. `name()` uniquely identifies
// planner+solver+adaptive and keys the episode seed derivation.
struct MethodArm {
  PlannerMethod planner = PlannerMethod::kTao;
  SolverKind solver = SolverKind::kMppi;
  bool adaptive = true;

  std::string name() const;
};

MethodArm arm_from_name(const std::string& name);

// Effective settings of a run: single-episode parameters plus the benchmark
// matrix. Field units match the library structs exactly so the JSON file
// round-trips without conversion loss.
struct RunConfig {
  TraversabilityParams trav;
  EpisodeConfig episode;
  TerrainSpec terrain;  // terrain of single-terrain commands
  std::optional<Pose2> start;  // absent: x = 1 m margin, centered, heading 0
  std::optional<Pose2> goal;   // absent: 1 m short of the far edge
  int trials = 5;
  std::uint64_t base_seed = 12345;
  int workers = 1;
  DifficultyCuts cuts;
  bool inclinations = true;       // sweep the suite over 0/5/10/15 degrees
  std::vector<MethodArm> arms;    // empty: full default matrix
  std::vector<TerrainSpec> suite; // empty: built-in 27-spec suite
  std::string out_dir = "out";

  void validate() const;
};

// Default matrix: the traversability-aware planner+controller and its
// ablations (elevation-only planner, no-constraint planner, flatness-feature
// planner, fixed-weight controller).
std::vector<MethodArm> default_arms();

// Endpoints for a terrain: configured ones, or the margin rule.
Pose2 effective_start(const RunConfig& cfg, const Terrain& t);
Pose2 effective_goal(const RunConfig& cfg, const Terrain& t);

// Strict parse: unknown keys are config errors; absent keys take defaults.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& cfg);
void save_config(const std::string& path, const RunConfig& cfg);

}  // namespace tnav
