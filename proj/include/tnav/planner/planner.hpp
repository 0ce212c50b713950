#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tnav/planner/reeds_shepp.hpp"
#include "tnav/rng.hpp"
#include "tnav/traversability/traversability.hpp"

namespace tnav {

// Planner variants. kTao: traversability-weighted rejection sampling,
// traversability edge cost, constraint map enforced. kDem: uniform sampling,
// elevation-gradient edge cost, no constraints. kTauOnly: like kTao without
// the constraint map. kPutnFlatness: like kTauOnly but maps are built with
// the residual-RMS flatness feature instead of the transport bumpiness.
enum class PlannerMethod { kTao, kDem, kTauOnly, kPutnFlatness };

PlannerMethod planner_method_from_string(const std::string& s);
const char* to_string(PlannerMethod m);

// Whether maps for this method enforce the regional constraint and which
// bumpiness feature they use.
bool method_uses_constraints(PlannerMethod m);
BumpinessMode method_bumpiness_mode(PlannerMethod m);

enum class EdgeCostForm { kVerbatim, kRatio };

struct PlannerParams {
  PlannerMethod method = PlannerMethod::kTao;
  double kappa = 5.0;            // traversability cost gain
  double delta_l = 0.1;          // edge sampling interval (m)
  double turning_radius = 0.5;   // minimum turning radius (m)
  int iterations = 5000;         // sampling budget
  int stall_window = 500;        // early stop after no improvement
  double goal_tolerance = 0.5;   // position tolerance (m)
  double goal_heading_tolerance = kPi / 6.0;
  double goal_bias = 0.05;       // probability of sampling the goal pose
  double max_extension = 2.0;    // steer truncation length (m)
  int max_neighbors = 16;        // rewiring candidate cap
  double neighbor_gamma = 10.0;  // shrinking-radius constant
  EdgeCostForm cost_form = EdgeCostForm::kVerbatim;

  void validate() const;
};

struct SamplingBounds {
  double min_x = 0, max_x = 0, min_y = 0, max_y = 0;
  static SamplingBounds from_spec(const GridSpec& spec) {
    return {spec.origin_x, spec.origin_x + spec.cols * spec.resolution,
            spec.origin_y, spec.origin_y + spec.rows * spec.resolution};
  }
};

// One steered edge, sampled every delta_l meters of arc length. `points`
// excludes the segment start; the last sample coincides with `to`. rho is
// the sampling weight (1 - tau)(1 - gamma) at each sample.
struct PathSegment {
  Pose2 from, to;
  rs::Path geometry;
  double length = 0.0;
  std::vector<Pose2> points;
  std::vector<int> gear;
  std::vector<double> z, tau, rho;
  double sum_rho = 0.0;
  bool valid = false;
};

struct Node {
  Pose2 pose;
  double z = 0.0;
  int parent = -1;
  double cost = 0.0;    // accumulated edge cost from the root
  double length = 0.0;  // accumulated arc length from the root
};

struct PlannedPath {
  struct Waypoint {
    double x = 0, y = 0, z = 0;
    double heading = 0;
    double desired_speed = 0;
    double tau = 0;
  };
  std::vector<Waypoint> waypoints;
  bool success = false;
  double total_cost = 0.0;
  double total_length = 0.0;
  int iterations_used = 0;
};

// Acceptance weight of a sample at a cell: (1 - tau) * (1 - gamma).
double sampling_weight(double tau, double gamma);

// Draws a pose whose (x, y) is accepted with probability proportional to the
// sampling weight (uniform for kDem). Throws RuntimeFailure("sampling") when
// the map rejects too many candidates.
Pose2 rejection_sample(Rng& rng, const TerrainMaps& maps,
                       const SamplingBounds& bounds, const PlannerParams& params);

// Shortest bounded-curvature connection from -> to, truncated at
// max_extension when `truncate` (the returned `to` then lies mid-path).
// Samples the edge, fills per-point terrain data, and validates: all points
// on-map with usable height and no constrained cell.
PathSegment steer(const TerrainMaps& maps, const Pose2& from, const Pose2& to,
                  const PlannerParams& params, bool truncate = true);

// Traversability edge cost. Verbatim form:
//   max(0, (1 + kappa * (1 / sum(rho) - N)) * length), N = sample count;
// +inf when every sample has zero weight. Ratio form:
//   length * (1 + kappa * (N / sum(rho) - 1)).
double edge_cost(const PathSegment& seg, const PlannerParams& params);

// Un-clamped verbatim cost value, for diagnostics/export.
double edge_cost_raw(const PathSegment& seg, const PlannerParams& params);

// Elevation-gradient baseline cost:
//   length * (1 + kappa * mean|dz| / delta_l)
// over consecutive samples (including the gap from the segment start, whose
// height is z_from).
double dem_cost_baseline(const PathSegment& seg, double z_from,
                         const PlannerParams& params);

// Anytime optimizing tree planner over the posed terrain. Deterministic for
// a fixed seed. Tree comparisons are lexicographic on (cost, length) so that
// zero-cost safe regions still prefer short paths. Returns success=false if
// no goal-satisfying node exists within the budget.
PlannedPath plan(const TerrainMaps& maps, const Pose2& start, const Pose2& goal,
                 const PlannerParams& params, std::uint64_t seed,
                 std::vector<Node>* tree_out = nullptr);

// Sets waypoint desired speeds: +zeta_nominal on forward gear,
// -min(zeta_nominal, |zeta_min|) on reverse gear.
void assign_desired_velocity(PlannedPath& path, double zeta_nominal,
                             double zeta_min);

// Path CSV (header x,y,z,heading,desired_speed,tau), shortest round-trip
// doubles.
void save_path_csv(const std::string& path, const PlannedPath& planned);
PlannedPath load_path_csv(const std::string& path);

// Tree CSV (header node,parent,x,y,heading,z,cost,length).
void save_tree_csv(const std::string& path, const std::vector<Node>& nodes);

}  // namespace tnav
