#include "tnav/planner/planner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "tnav/errors.hpp"
#include "tnav/io_util.hpp"

namespace tnav {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Height of the cell containing (x, y); falls back to the fitted plane at
// the cell center when the raw cell is vacant.
double lookup_z(const TerrainMaps& maps, double x, double y) {
  const GridSpec& spec = maps.height.spec;
  const int r = spec.row_of(y);
  const int c = spec.col_of(x);
  if (!spec.in_bounds(r, c)) return kNaN;
  const double z = maps.height.at(r, c);
  if (!std::isnan(z)) return z;
  const std::size_t i = spec.index(r, c);
  if (maps.normals.has_normal(i)) return maps.normals.plane_z(i, 0.0, 0.0);
  return kNaN;
}

// Cheap tree metric for nearest/near queries (position plus a heading term
// scaled to length units).
double tree_metric(const Pose2& a, const Pose2& b, double radius) {
  return std::hypot(a.x - b.x, a.y - b.y) +
         radius * std::fabs(angle_diff(a.heading, b.heading));
}

// (cost, length) lexicographic improvement with an absolute tolerance so FP
// noise cannot flip decisions.
bool lex_better(double cost_a, double len_a, double cost_b, double len_b) {
  if (cost_a < cost_b - 1e-12) return true;
  if (cost_a > cost_b + 1e-12) return false;
  return len_a < len_b - 1e-12;
}

}  // namespace

PlannerMethod planner_method_from_string(const std::string& s) {
  if (s == "tao") return PlannerMethod::kTao;
  if (s == "dem") return PlannerMethod::kDem;
  if (s == "tau_only") return PlannerMethod::kTauOnly;
  if (s == "putn_flatness") return PlannerMethod::kPutnFlatness;
  throw ConfigError("unknown planner method: " + s);
}

const char* to_string(PlannerMethod m) {
  switch (m) {
    case PlannerMethod::kTao: return "tao";
    case PlannerMethod::kDem: return "dem";
    case PlannerMethod::kTauOnly: return "tau_only";
    case PlannerMethod::kPutnFlatness: return "putn_flatness";
  }
  return "unknown";
}

bool method_uses_constraints(PlannerMethod m) {
  return m == PlannerMethod::kTao;
}

BumpinessMode method_bumpiness_mode(PlannerMethod m) {
  return m == PlannerMethod::kPutnFlatness ? BumpinessMode::kResidualRms
                                           : BumpinessMode::kTransport;
}

void PlannerParams::validate() const {
  if (kappa < 0) throw ConfigError("kappa must be non-negative");
  if (delta_l <= 0) throw ConfigError("delta_l must be positive");
  if (turning_radius <= 0) throw ConfigError("turning_radius must be positive");
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (stall_window < 1) throw ConfigError("stall_window must be >= 1");
  if (goal_tolerance <= 0) throw ConfigError("goal_tolerance must be positive");
  if (goal_heading_tolerance <= 0 || goal_heading_tolerance > kPi)
    throw ConfigError("goal_heading_tolerance must be in (0, pi]");
  if (goal_bias < 0 || goal_bias > 1)
    throw ConfigError("goal_bias must be in [0, 1]");
  if (max_extension < delta_l)
    throw ConfigError("max_extension must be >= delta_l");
  if (max_neighbors < 1) throw ConfigError("max_neighbors must be >= 1");
  if (neighbor_gamma <= 0) throw ConfigError("neighbor_gamma must be positive");
}

double sampling_weight(double tau, double gamma) {
  return (1.0 - tau) * (1.0 - gamma);
}

Pose2 rejection_sample(Rng& rng, const TerrainMaps& maps,
                       const SamplingBounds& bounds,
                       const PlannerParams& params) {
  const bool weighted = params.method != PlannerMethod::kDem;
  constexpr int kMaxAttempts = 100000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Pose2 p;
    p.x = rng.uniform(bounds.min_x, bounds.max_x);
    p.y = rng.uniform(bounds.min_y, bounds.max_y);
    p.heading = wrap_angle(rng.uniform(-kPi, kPi));
    if (!weighted) return p;
    const double tau = maps.trav.tau_at(p.x, p.y);
    const double gamma = method_uses_constraints(params.method) &&
                                 maps.constraint.blocked_at(p.x, p.y)
                             ? 1.0
                             : 0.0;
    const double rho = sampling_weight(tau, gamma);
    if (rng.uniform01() < rho) return p;
  }
  throw RuntimeFailure("sampling",
                       "rejection sampler exhausted its attempt budget");
}

PathSegment steer(const TerrainMaps& maps, const Pose2& from, const Pose2& to,
                  const PlannerParams& params, bool truncate) {
  PathSegment seg;
  seg.from = from;
  seg.geometry = rs::solve(from, to, params.turning_radius);
  const double full_len = seg.geometry.total * params.turning_radius;
  const bool truncated = truncate && full_len > params.max_extension;
  seg.length = truncated ? params.max_extension : full_len;
  seg.valid = true;
  seg.to = from;

  if (seg.length <= 1e-12) return seg;  // trivial self-connection

  const int n_full = static_cast<int>(std::floor(seg.length / params.delta_l + 1e-9));
  std::vector<double> stations;
  stations.reserve(n_full + 1);
  for (int k = 1; k <= n_full; ++k) stations.push_back(k * params.delta_l);
  if (stations.empty() || seg.length - stations.back() > 1e-9)
    stations.push_back(seg.length);

  const GridSpec& spec = maps.height.spec;
  for (double s : stations) {
    const rs::Sample sample = rs::interpolate(from, seg.geometry, s, params.turning_radius);
    Pose2 pose = sample.pose;
    if (!truncated && s == stations.back()) pose = to;  // exact endpoint
    if (!spec.contains(pose.x, pose.y)) {
      seg.valid = false;
      return seg;
    }
    if (method_uses_constraints(params.method) &&
        maps.constraint.blocked_at(pose.x, pose.y)) {
      seg.valid = false;
      return seg;
    }
    const double z = lookup_z(maps, pose.x, pose.y);
    if (std::isnan(z)) {
      seg.valid = false;
      return seg;
    }
    const double tau = maps.trav.tau_at(pose.x, pose.y);
    seg.points.push_back(pose);
    seg.gear.push_back(sample.gear);
    seg.z.push_back(z);
    seg.tau.push_back(tau);
    seg.rho.push_back(sampling_weight(tau, 0.0));
    seg.sum_rho += seg.rho.back();
  }
  seg.to = seg.points.back();
  return seg;
}

double edge_cost_raw(const PathSegment& seg, const PlannerParams& params) {
  const double n = static_cast<double>(seg.points.size());
  if (n == 0.0) return 0.0;
  if (seg.sum_rho <= 0.0) return kInf;
  return (1.0 + params.kappa * (1.0 / seg.sum_rho - n)) * seg.length;
}

double edge_cost(const PathSegment& seg, const PlannerParams& params) {
  const double n = static_cast<double>(seg.points.size());
  if (n == 0.0) return 0.0;
  if (seg.sum_rho <= 0.0) return kInf;
  if (params.cost_form == EdgeCostForm::kRatio)
    return seg.length * (1.0 + params.kappa * (n / seg.sum_rho - 1.0));
  return std::max(0.0, edge_cost_raw(seg, params));
}

double dem_cost_baseline(const PathSegment& seg, double z_from,
                         const PlannerParams& params) {
  const std::size_t n = seg.points.size();
  if (n == 0) return 0.0;
  double total = std::fabs(seg.z[0] - z_from);
  for (std::size_t i = 1; i < n; ++i) total += std::fabs(seg.z[i] - seg.z[i - 1]);
  const double mean_dz = total / static_cast<double>(n);
  return seg.length * (1.0 + params.kappa * (mean_dz / params.delta_l));
}

namespace {

struct TreeNode {
  Pose2 pose;
  double z = 0.0;
  int parent = -1;
  double cost = 0.0;
  double length = 0.0;
  PathSegment seg;  // edge parent -> this
  std::vector<int> children;
};

double segment_cost(const PathSegment& seg, double z_from,
                    const PlannerParams& params) {
  if (!seg.valid) return kInf;
  if (params.method == PlannerMethod::kDem)
    return dem_cost_baseline(seg, z_from, params);
  return edge_cost(seg, params);
}

// Propagates a (cost, length) delta through a rewired subtree.
void propagate(std::vector<TreeNode>& nodes, int root, double dcost,
               double dlen) {
  std::vector<int> stack = {root};
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    nodes[i].cost += dcost;
    nodes[i].length += dlen;
    for (int ch : nodes[i].children) stack.push_back(ch);
  }
}

bool within_goal(const Pose2& p, const Pose2& goal, const PlannerParams& params) {
  return distance(p, goal) <= params.goal_tolerance &&
         std::fabs(angle_diff(p.heading, goal.heading)) <=
             params.goal_heading_tolerance;
}

}  // namespace

PlannedPath plan(const TerrainMaps& maps, const Pose2& start, const Pose2& goal,
                 const PlannerParams& params, std::uint64_t seed,
                 std::vector<Node>* tree_out) {
  params.validate();
  const GridSpec& spec = maps.height.spec;
  if (!spec.contains(start.x, start.y) || !spec.contains(goal.x, goal.y))
    throw ConfigError("start/goal outside the map");
  if (method_uses_constraints(params.method)) {
    if (maps.constraint.blocked_at(start.x, start.y))
      throw ConfigError("start lies in a constrained region");
    if (maps.constraint.blocked_at(goal.x, goal.y))
      throw ConfigError("goal lies in a constrained region");
  }
  const double z_start = lookup_z(maps, start.x, start.y);
  const double z_goal = lookup_z(maps, goal.x, goal.y);
  if (std::isnan(z_start) || std::isnan(z_goal))
    throw ConfigError("start/goal height unobserved");

  const SamplingBounds bounds = SamplingBounds::from_spec(spec);
  Rng rng(seed);

  std::vector<TreeNode> nodes;
  nodes.reserve(static_cast<std::size_t>(params.iterations) + 1);
  nodes.push_back(TreeNode{start, z_start, -1, 0.0, 0.0, PathSegment{}, {}});

  std::vector<int> goal_set;
  if (within_goal(start, goal, params)) goal_set.push_back(0);

  int best_goal = -1;
  double best_cost = kInf, best_len = kInf;
  int since_improved = 0;
  int iterations_used = 0;

  std::vector<std::pair<double, int>> near;  // (metric distance, node index)

  for (int iter = 0; iter < params.iterations; ++iter) {
    ++iterations_used;
    const bool to_goal = rng.uniform01() < params.goal_bias;
    const Pose2 target =
        to_goal ? goal : rejection_sample(rng, maps, bounds, params);

    // Nearest node under the tree metric.
    int nearest = 0;
    double dmin = kInf;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double d = tree_metric(nodes[i].pose, target, params.turning_radius);
      if (d < dmin) {
        dmin = d;
        nearest = static_cast<int>(i);
      }
    }

    PathSegment seg = steer(maps, nodes[nearest].pose, target, params, true);
    if (!seg.valid || seg.points.empty()) {
      ++since_improved;
      if (best_goal >= 0 && since_improved >= params.stall_window) break;
      continue;
    }
    const Pose2 new_pose = seg.to;

    // Shrinking neighbor radius, capped by count.
    const double n_now = static_cast<double>(nodes.size()) + 1.0;
    const double radius =
        std::min(params.max_extension,
                 std::max(4.0 * params.delta_l,
                          params.neighbor_gamma *
                              std::cbrt(std::log(n_now + 1.0) / n_now)));
    near.clear();
    bool duplicate = false;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double d = tree_metric(nodes[i].pose, new_pose, params.turning_radius);
      if (d < 1e-6) {
        duplicate = true;
        break;
      }
      if (d <= radius) near.emplace_back(d, static_cast<int>(i));
    }
    if (duplicate) {
      ++since_improved;
      if (best_goal >= 0 && since_improved >= params.stall_window) break;
      continue;
    }
    std::sort(near.begin(), near.end());
    if (static_cast<int>(near.size()) > params.max_neighbors)
      near.resize(params.max_neighbors);

    // Parent choice among {nearest} + neighbors, lexicographic on
    // (cost, length).
    int parent = nearest;
    PathSegment parent_seg = std::move(seg);
    double parent_edge_cost = segment_cost(parent_seg, nodes[nearest].z, params);
    double new_cost = nodes[nearest].cost + parent_edge_cost;
    double new_len = nodes[nearest].length + parent_seg.length;
    for (const auto& [d, i] : near) {
      if (i == nearest) continue;
      // Lower bound: edge cost >= 0 and edge length >= straight-line
      // distance, so hopeless candidates skip the steer entirely.
      const double d_lb = std::hypot(nodes[i].pose.x - new_pose.x,
                                     nodes[i].pose.y - new_pose.y);
      if (!lex_better(nodes[i].cost, nodes[i].length + d_lb, new_cost, new_len))
        continue;
      PathSegment cand = steer(maps, nodes[i].pose, new_pose, params, false);
      if (!cand.valid || cand.points.empty()) continue;
      const double c = nodes[i].cost + segment_cost(cand, nodes[i].z, params);
      const double l = nodes[i].length + cand.length;
      if (lex_better(c, l, new_cost, new_len)) {
        parent = i;
        parent_seg = std::move(cand);
        new_cost = c;
        new_len = l;
      }
    }
    if (!std::isfinite(new_cost)) {
      ++since_improved;
      if (best_goal >= 0 && since_improved >= params.stall_window) break;
      continue;
    }

    const int new_idx = static_cast<int>(nodes.size());
    nodes.push_back(TreeNode{new_pose, parent_seg.z.back(), parent, new_cost,
                             new_len, std::move(parent_seg), {}});
    nodes[parent].children.push_back(new_idx);
    if (within_goal(new_pose, goal, params)) goal_set.push_back(new_idx);

    // Rewire neighbors through the new node.
    for (const auto& [d, i] : near) {
      if (i == parent) continue;
      const double d_lb = std::hypot(nodes[i].pose.x - new_pose.x,
                                     nodes[i].pose.y - new_pose.y);
      if (!lex_better(new_cost, new_len + d_lb, nodes[i].cost, nodes[i].length))
        continue;
      PathSegment cand = steer(maps, new_pose, nodes[i].pose, params, false);
      if (!cand.valid || cand.points.empty()) continue;
      const double c = new_cost + segment_cost(cand, nodes[new_idx].z, params);
      const double l = new_len + cand.length;
      if (!lex_better(c, l, nodes[i].cost, nodes[i].length)) continue;
      auto& old_children = nodes[nodes[i].parent].children;
      old_children.erase(std::find(old_children.begin(), old_children.end(), i));
      const double dcost = c - nodes[i].cost;
      const double dlen = l - nodes[i].length;
      nodes[i].parent = new_idx;
      nodes[i].seg = std::move(cand);
      nodes[new_idx].children.push_back(i);
      propagate(nodes, i, dcost, dlen);
    }

    // Track the best goal-satisfying node.
    bool improved = false;
    for (int gi : goal_set) {
      if (lex_better(nodes[gi].cost, nodes[gi].length, best_cost, best_len)) {
        best_cost = nodes[gi].cost;
        best_len = nodes[gi].length;
        best_goal = gi;
        improved = true;
      }
    }
    since_improved = improved ? 0 : since_improved + 1;
    if (best_goal >= 0 && since_improved >= params.stall_window) break;
  }

  // Goal-set costs may have changed via rewiring after the last improvement
  // check; settle on the final best.
  for (int gi : goal_set) {
    if (lex_better(nodes[gi].cost, nodes[gi].length, best_cost, best_len)) {
      best_cost = nodes[gi].cost;
      best_len = nodes[gi].length;
      best_goal = gi;
    }
  }

  if (tree_out) {
    tree_out->clear();
    tree_out->reserve(nodes.size());
    for (const auto& n : nodes)
      tree_out->push_back(Node{n.pose, n.z, n.parent, n.cost, n.length});
  }

  PlannedPath out;
  out.iterations_used = iterations_used;
  if (best_goal < 0) return out;

  std::vector<int> chain;
  for (int i = best_goal; i >= 0; i = nodes[i].parent) chain.push_back(i);
  std::reverse(chain.begin(), chain.end());

  auto waypoint_at = [&maps](const Pose2& p, double z, int gear) {
    PlannedPath::Waypoint w;
    w.x = p.x;
    w.y = p.y;
    w.z = z;
    w.heading = p.heading;
    w.tau = maps.trav.tau_at(p.x, p.y);
    w.desired_speed = gear;  // placeholder sign carrier until velocities set
    return w;
  };

  const int first_gear =
      (chain.size() > 1 && !nodes[chain[1]].seg.gear.empty())
          ? nodes[chain[1]].seg.gear.front()
          : 1;
  out.waypoints.push_back(waypoint_at(nodes[chain[0]].pose, nodes[chain[0]].z,
                                      first_gear));
  for (std::size_t k = 1; k < chain.size(); ++k) {
    const PathSegment& s = nodes[chain[k]].seg;
    for (std::size_t j = 0; j < s.points.size(); ++j)
      out.waypoints.push_back(waypoint_at(s.points[j], s.z[j], s.gear[j]));
  }
  out.success = true;
  out.total_cost = nodes[best_goal].cost;
  out.total_length = nodes[best_goal].length;
  return out;
}

void assign_desired_velocity(PlannedPath& path, double zeta_nominal,
                             double zeta_min) {
  TNAV_REQUIRE(zeta_nominal > 0.0, "zeta_nominal must be positive");
  const double reverse_speed = std::min(zeta_nominal, std::fabs(zeta_min));
  for (auto& w : path.waypoints)
    w.desired_speed = w.desired_speed >= 0 ? zeta_nominal : -reverse_speed;
}

void save_path_csv(const std::string& file, const PlannedPath& planned) {
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw IoError("cannot write " + file);
  out << "x,y,z,heading,desired_speed,tau\n";
  for (const auto& w : planned.waypoints) {
    out << format_double(w.x) << ',' << format_double(w.y) << ','
        << format_double(w.z) << ',' << format_double(w.heading) << ','
        << format_double(w.desired_speed) << ',' << format_double(w.tau)
        << '\n';
  }
  if (!out) throw IoError("write failed: " + file);
}

PlannedPath load_path_csv(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot read " + file);
  std::string line;
  if (!std::getline(in, line)) throw IoError(file + ": empty path file");
  PlannedPath p;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 6) throw IoError(file + ": expected 6 columns");
    PlannedPath::Waypoint w;
    w.x = parse_double(f[0]);
    w.y = parse_double(f[1]);
    w.z = parse_double(f[2]);
    w.heading = parse_double(f[3]);
    w.desired_speed = parse_double(f[4]);
    w.tau = parse_double(f[5]);
    p.waypoints.push_back(w);
  }
  p.success = !p.waypoints.empty();
  return p;
}

void save_tree_csv(const std::string& file, const std::vector<Node>& nodes) {
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw IoError("cannot write " + file);
  out << "node,parent,x,y,heading,z,cost,length\n";
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node& n = nodes[i];
    out << format_int(static_cast<long long>(i)) << ','
        << format_int(n.parent) << ',' << format_double(n.pose.x) << ','
        << format_double(n.pose.y) << ',' << format_double(n.pose.heading)
        << ',' << format_double(n.z) << ',' << format_double(n.cost) << ','
        << format_double(n.length) << '\n';
  }
  if (!out) throw IoError("write failed: " + file);
}

}  // namespace tnav
