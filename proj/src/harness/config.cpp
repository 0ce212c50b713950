#include "tnav/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include "tnav/errors.hpp"

namespace tnav {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& detail) { throw ConfigError(detail); }

// Strict object access: every present key must be in the allowed set, so
// typos fail loudly instead of silently taking defaults.
void check_keys(const json& j, const char* section,
                std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) bad(std::string(section) + " must be an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const auto& k : allowed) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) bad("unknown key '" + item.key() + "' in " + section);
  }
}

double get_num(const json& j, const char* section, const char* key,
               double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) bad(std::string(section) + "." + key + " must be a number");
  return v.get<double>();
}

int get_int(const json& j, const char* section, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer())
    bad(std::string(section) + "." + key + " must be an integer");
  return v.get<int>();
}

std::uint64_t get_u64(const json& j, const char* section, const char* key,
                      std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_unsigned() && !v.is_number_integer())
    bad(std::string(section) + "." + key + " must be an integer");
  return v.get<std::uint64_t>();
}

bool get_bool(const json& j, const char* section, const char* key,
              bool fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_boolean()) bad(std::string(section) + "." + key + " must be a bool");
  return v.get<bool>();
}

std::string get_str(const json& j, const char* section, const char* key,
                    const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_string()) bad(std::string(section) + "." + key + " must be a string");
  return v.get<std::string>();
}

std::vector<double> get_vec(const json& j, const char* section, const char* key,
                            std::size_t count, const std::vector<double>& fb) {
  if (!j.contains(key)) return fb;
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != count)
    bad(std::string(section) + "." + key + " must be an array of " +
        std::to_string(count) + " numbers");
  std::vector<double> out;
  out.reserve(count);
  for (const auto& e : v) {
    if (!e.is_number()) bad(std::string(section) + "." + key + " has a non-number");
    out.push_back(e.get<double>());
  }
  return out;
}

const char* to_string(BumpinessMode m) {
  return m == BumpinessMode::kTransport ? "transport" : "residual_rms";
}

BumpinessMode bumpiness_mode_from_string(const std::string& s) {
  if (s == "transport") return BumpinessMode::kTransport;
  if (s == "residual_rms") return BumpinessMode::kResidualRms;
  bad("unknown bumpiness mode '" + s + "'");
}

const char* to_string(EdgeCostForm f) {
  return f == EdgeCostForm::kVerbatim ? "verbatim" : "ratio";
}

EdgeCostForm cost_form_from_string(const std::string& s) {
  if (s == "verbatim") return EdgeCostForm::kVerbatim;
  if (s == "ratio") return EdgeCostForm::kRatio;
  bad("unknown edge cost form '" + s + "'");
}

TraversabilityParams parse_trav(const json& j) {
  TraversabilityParams p;
  check_keys(j, "traversability",
             {"alpha", "epsilon", "r_min", "r_max", "b_max", "window_side",
              "bumpiness", "constraints"});
  const auto alpha = get_vec(j, "traversability", "alpha", 3,
                             {p.weights.slope, p.weights.sparsity,
                              p.weights.bumpiness});
  p.weights = {alpha[0], alpha[1], alpha[2]};
  const auto eps = get_vec(j, "traversability", "epsilon", 3,
                           {p.thresholds.slope, p.thresholds.sparsity,
                            p.thresholds.bumpiness});
  p.thresholds = {eps[0], eps[1], eps[2]};
  p.r_min = get_num(j, "traversability", "r_min", p.r_min);
  p.r_max = get_num(j, "traversability", "r_max", p.r_max);
  p.b_max = get_num(j, "traversability", "b_max", p.b_max);
  p.window_side = get_int(j, "traversability", "window_side", p.window_side);
  p.bumpiness_mode = bumpiness_mode_from_string(
      get_str(j, "traversability", "bumpiness", to_string(p.bumpiness_mode)));
  p.constraints_enabled =
      get_bool(j, "traversability", "constraints", p.constraints_enabled);
  return p;
}

json trav_json(const TraversabilityParams& p) {
  json j;
  j["alpha"] = {p.weights.slope, p.weights.sparsity, p.weights.bumpiness};
  j["epsilon"] = {p.thresholds.slope, p.thresholds.sparsity,
                  p.thresholds.bumpiness};
  j["r_min"] = p.r_min;
  j["r_max"] = p.r_max;
  j["b_max"] = p.b_max;
  j["window_side"] = p.window_side;
  j["bumpiness"] = to_string(p.bumpiness_mode);
  j["constraints"] = p.constraints_enabled;
  return j;
}

PlannerParams parse_planner(const json& j) {
  PlannerParams p;
  check_keys(j, "planner",
             {"method", "N", "kappa", "delta_l", "turning_radius",
              "stall_window", "goal_tolerance", "goal_heading_tolerance",
              "goal_bias", "max_extension", "max_neighbors", "neighbor_gamma",
              "cost_form"});
  p.method = planner_method_from_string(
      get_str(j, "planner", "method", to_string(p.method)));
  p.iterations = get_int(j, "planner", "N", p.iterations);
  p.kappa = get_num(j, "planner", "kappa", p.kappa);
  p.delta_l = get_num(j, "planner", "delta_l", p.delta_l);
  p.turning_radius = get_num(j, "planner", "turning_radius", p.turning_radius);
  p.stall_window = get_int(j, "planner", "stall_window", p.stall_window);
  p.goal_tolerance = get_num(j, "planner", "goal_tolerance", p.goal_tolerance);
  p.goal_heading_tolerance =
      get_num(j, "planner", "goal_heading_tolerance", p.goal_heading_tolerance);
  p.goal_bias = get_num(j, "planner", "goal_bias", p.goal_bias);
  p.max_extension = get_num(j, "planner", "max_extension", p.max_extension);
  p.max_neighbors = get_int(j, "planner", "max_neighbors", p.max_neighbors);
  p.neighbor_gamma = get_num(j, "planner", "neighbor_gamma", p.neighbor_gamma);
  p.cost_form = cost_form_from_string(
      get_str(j, "planner", "cost_form", to_string(p.cost_form)));
  return p;
}

json planner_json(const PlannerParams& p) {
  json j;
  j["method"] = to_string(p.method);
  j["N"] = p.iterations;
  j["kappa"] = p.kappa;
  j["delta_l"] = p.delta_l;
  j["turning_radius"] = p.turning_radius;
  j["stall_window"] = p.stall_window;
  j["goal_tolerance"] = p.goal_tolerance;
  j["goal_heading_tolerance"] = p.goal_heading_tolerance;
  j["goal_bias"] = p.goal_bias;
  j["max_extension"] = p.max_extension;
  j["max_neighbors"] = p.max_neighbors;
  j["neighbor_gamma"] = p.neighbor_gamma;
  j["cost_form"] = to_string(p.cost_form);
  return j;
}

ControllerParams parse_controller(const json& j) {
  ControllerParams p;
  check_keys(j, "controller",
             {"solver", "adaptive", "T", "dt", "Q", "R", "W_v", "k_q",
              "lambda", "zeta_min", "zeta_max", "omega_max", "rollouts",
              "noise_zeta", "noise_omega", "temperature", "mpc_iterations",
              "mpc_step", "fd_epsilon", "line_search_max", "open_samples",
              "open_radius", "psi_clamp", "ref_window"});
  p.solver =
      solver_from_string(get_str(j, "controller", "solver", to_string(p.solver)));
  p.adaptive = get_bool(j, "controller", "adaptive", p.adaptive);
  p.horizon = get_int(j, "controller", "T", p.horizon);
  p.dt = get_num(j, "controller", "dt", p.dt);
  const auto q = get_vec(j, "controller", "Q", 3,
                         {p.weights.qx, p.weights.qy, p.weights.qtheta});
  p.weights.qx = q[0];
  p.weights.qy = q[1];
  p.weights.qtheta = q[2];
  const auto r =
      get_vec(j, "controller", "R", 2, {p.weights.r_zeta, p.weights.r_omega});
  p.weights.r_zeta = r[0];
  p.weights.r_omega = r[1];
  p.weights.w_v = get_num(j, "controller", "W_v", p.weights.w_v);
  p.weights.k_q = get_num(j, "controller", "k_q", p.weights.k_q);
  p.weights.lambda_open = get_num(j, "controller", "lambda", p.weights.lambda_open);
  p.zeta_min = get_num(j, "controller", "zeta_min", p.zeta_min);
  p.zeta_max = get_num(j, "controller", "zeta_max", p.zeta_max);
  p.omega_max = get_num(j, "controller", "omega_max", p.omega_max);
  p.rollouts = get_int(j, "controller", "rollouts", p.rollouts);
  p.noise_zeta = get_num(j, "controller", "noise_zeta", p.noise_zeta);
  p.noise_omega = get_num(j, "controller", "noise_omega", p.noise_omega);
  p.temperature = get_num(j, "controller", "temperature", p.temperature);
  p.mpc_iterations = get_int(j, "controller", "mpc_iterations", p.mpc_iterations);
  p.mpc_step = get_num(j, "controller", "mpc_step", p.mpc_step);
  p.fd_epsilon = get_num(j, "controller", "fd_epsilon", p.fd_epsilon);
  p.line_search_max = get_int(j, "controller", "line_search_max", p.line_search_max);
  p.open_samples = get_int(j, "controller", "open_samples", p.open_samples);
  p.open_radius = get_num(j, "controller", "open_radius", p.open_radius);
  p.psi_clamp = get_num(j, "controller", "psi_clamp", p.psi_clamp);
  p.ref_window = get_int(j, "controller", "ref_window", p.ref_window);
  return p;
}

json controller_json(const ControllerParams& p) {
  json j;
  j["solver"] = to_string(p.solver);
  j["adaptive"] = p.adaptive;
  j["T"] = p.horizon;
  j["dt"] = p.dt;
  j["Q"] = {p.weights.qx, p.weights.qy, p.weights.qtheta};
  j["R"] = {p.weights.r_zeta, p.weights.r_omega};
  j["W_v"] = p.weights.w_v;
  j["k_q"] = p.weights.k_q;
  j["lambda"] = p.weights.lambda_open;
  j["zeta_min"] = p.zeta_min;
  j["zeta_max"] = p.zeta_max;
  j["omega_max"] = p.omega_max;
  j["rollouts"] = p.rollouts;
  j["noise_zeta"] = p.noise_zeta;
  j["noise_omega"] = p.noise_omega;
  j["temperature"] = p.temperature;
  j["mpc_iterations"] = p.mpc_iterations;
  j["mpc_step"] = p.mpc_step;
  j["fd_epsilon"] = p.fd_epsilon;
  j["line_search_max"] = p.line_search_max;
  j["open_samples"] = p.open_samples;
  j["open_radius"] = p.open_radius;
  j["psi_clamp"] = p.psi_clamp;
  j["ref_window"] = p.ref_window;
  return j;
}

SimParams parse_sim(const json& j) {
  SimParams p;
  check_keys(j, "sim",
             {"grade_max", "surmount_speed", "tipover_max", "ground_clearance",
              "footprint_radius", "probe", "dt"});
  p.grade_max = get_num(j, "sim", "grade_max", p.grade_max);
  p.surmount_speed = get_num(j, "sim", "surmount_speed", p.surmount_speed);
  p.tipover_max = get_num(j, "sim", "tipover_max", p.tipover_max);
  p.ground_clearance = get_num(j, "sim", "ground_clearance", p.ground_clearance);
  p.footprint_radius = get_num(j, "sim", "footprint_radius", p.footprint_radius);
  p.probe = get_num(j, "sim", "probe", p.probe);
  p.dt = get_num(j, "sim", "dt", p.dt);
  return p;
}

json sim_json(const SimParams& p) {
  json j;
  j["grade_max"] = p.grade_max;
  j["surmount_speed"] = p.surmount_speed;
  j["tipover_max"] = p.tipover_max;
  j["ground_clearance"] = p.ground_clearance;
  j["footprint_radius"] = p.footprint_radius;
  j["probe"] = p.probe;
  j["dt"] = p.dt;
  return j;
}

TerrainSpec parse_terrain(const json& j) {
  TerrainSpec s;
  check_keys(j, "terrain",
             {"id", "H", "W", "resolution", "octaves", "amplitude",
              "wavelength", "inclination_deg", "seed", "sills", "rocks",
              "ditches", "pillars"});
  s.id = get_str(j, "terrain", "id", s.id);
  s.resolution = get_num(j, "terrain", "resolution", s.resolution);
  const int rows =
      get_int(j, "terrain", "H", static_cast<int>(std::lround(s.extent_y / s.resolution)));
  const int cols =
      get_int(j, "terrain", "W", static_cast<int>(std::lround(s.extent_x / s.resolution)));
  s.extent_y = rows * s.resolution;
  s.extent_x = cols * s.resolution;
  s.octaves = get_int(j, "terrain", "octaves", s.octaves);
  s.amplitude = get_num(j, "terrain", "amplitude", s.amplitude);
  s.wavelength = get_num(j, "terrain", "wavelength", s.wavelength);
  s.inclination_deg = get_num(j, "terrain", "inclination_deg", s.inclination_deg);
  s.seed = get_u64(j, "terrain", "seed", s.seed);
  if (j.contains("sills")) {
    if (!j.at("sills").is_array()) bad("terrain.sills must be an array");
    for (const auto& e : j.at("sills")) {
      check_keys(e, "terrain.sills[]",
                 {"x", "height", "width", "gap_center", "gap_half_width"});
      SillSpec sill;
      sill.x_center = get_num(e, "sill", "x", sill.x_center);
      sill.height = get_num(e, "sill", "height", sill.height);
      sill.width = get_num(e, "sill", "width", sill.width);
      sill.gap_center = get_num(e, "sill", "gap_center", sill.gap_center);
      sill.gap_half_width = get_num(e, "sill", "gap_half_width", sill.gap_half_width);
      s.sills.push_back(sill);
    }
  }
  if (j.contains("rocks")) {
    const json& e = j.at("rocks");
    check_keys(e, "terrain.rocks", {"density", "radius", "height"});
    s.rocks.density = get_num(e, "rocks", "density", s.rocks.density);
    s.rocks.radius = get_num(e, "rocks", "radius", s.rocks.radius);
    s.rocks.height = get_num(e, "rocks", "height", s.rocks.height);
  }
  if (j.contains("ditches")) {
    if (!j.at("ditches").is_array()) bad("terrain.ditches must be an array");
    for (const auto& e : j.at("ditches")) {
      check_keys(e, "terrain.ditches[]", {"x", "depth", "width"});
      DitchSpec d;
      d.x_center = get_num(e, "ditch", "x", d.x_center);
      d.depth = get_num(e, "ditch", "depth", d.depth);
      d.width = get_num(e, "ditch", "width", d.width);
      s.ditches.push_back(d);
    }
  }
  if (j.contains("pillars")) {
    const json& e = j.at("pillars");
    check_keys(e, "terrain.pillars", {"count", "radius"});
    s.pillars.count = get_int(e, "pillars", "count", s.pillars.count);
    s.pillars.radius = get_num(e, "pillars", "radius", s.pillars.radius);
  }
  return s;
}

json terrain_json(const TerrainSpec& s) {
  json j;
  j["id"] = s.id;
  j["H"] = static_cast<int>(std::lround(s.extent_y / s.resolution));
  j["W"] = static_cast<int>(std::lround(s.extent_x / s.resolution));
  j["resolution"] = s.resolution;
  j["octaves"] = s.octaves;
  j["amplitude"] = s.amplitude;
  j["wavelength"] = s.wavelength;
  j["inclination_deg"] = s.inclination_deg;
  j["seed"] = s.seed;
  if (!s.sills.empty()) {
    json arr = json::array();
    for (const auto& sill : s.sills) {
      arr.push_back({{"x", sill.x_center},
                     {"height", sill.height},
                     {"width", sill.width},
                     {"gap_center", sill.gap_center},
                     {"gap_half_width", sill.gap_half_width}});
    }
    j["sills"] = std::move(arr);
  }
  if (s.rocks.density > 0.0) {
    j["rocks"] = {{"density", s.rocks.density},
                  {"radius", s.rocks.radius},
                  {"height", s.rocks.height}};
  }
  if (!s.ditches.empty()) {
    json arr = json::array();
    for (const auto& d : s.ditches) {
      arr.push_back({{"x", d.x_center}, {"depth", d.depth}, {"width", d.width}});
    }
    j["ditches"] = std::move(arr);
  }
  if (s.pillars.count > 0) {
    j["pillars"] = {{"count", s.pillars.count}, {"radius", s.pillars.radius}};
  }
  return j;
}

Pose2 parse_pose(const json& j, const char* key) {
  if (!j.is_array() || j.size() != 3)
    bad(std::string(key) + " must be [x, y, heading]");
  for (const auto& e : j)
    if (!e.is_number()) bad(std::string(key) + " has a non-number");
  return Pose2{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

std::string MethodArm::name() const {
  std::string n = to_string(planner);
  n += '+';
  n += to_string(solver);
  n += adaptive ? "+adaptive" : "+vanilla";
  return n;
}

MethodArm arm_from_name(const std::string& name) {
  const auto p1 = name.find('+');
  const auto p2 = name.find('+', p1 == std::string::npos ? p1 : p1 + 1);
  if (p1 == std::string::npos || p2 == std::string::npos)
    bad("method arm '" + name + "' must be planner+solver+{adaptive|vanilla}");
  MethodArm arm;
  arm.planner = planner_method_from_string(name.substr(0, p1));
  arm.solver = solver_from_string(name.substr(p1 + 1, p2 - p1 - 1));
  const std::string tail = name.substr(p2 + 1);
  if (tail == "adaptive") {
    arm.adaptive = true;
  } else if (tail == "vanilla") {
    arm.adaptive = false;
  } else {
    bad("method arm '" + name + "' must end in +adaptive or +vanilla");
  }
  return arm;
}

std::vector<MethodArm> default_arms() {
  return {
      {PlannerMethod::kTao, SolverKind::kMppi, true},
      {PlannerMethod::kDem, SolverKind::kMppi, true},
      {PlannerMethod::kTauOnly, SolverKind::kMppi, true},
      {PlannerMethod::kPutnFlatness, SolverKind::kMppi, true},
      {PlannerMethod::kTao, SolverKind::kMppi, false},
      {PlannerMethod::kDem, SolverKind::kMppi, false},
  };
}

void RunConfig::validate() const {
  trav.validate();
  episode.validate();
  terrain.validate();
  cuts.validate();
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (workers < 0) throw ConfigError("workers must be >= 0 (0 = auto)");
  if (out_dir.empty()) throw ConfigError("out_dir must be non-empty");
  for (const auto& s : suite) s.validate();
}

Pose2 effective_start(const RunConfig& cfg, const Terrain& t) {
  if (cfg.start) return *cfg.start;
  const GridSpec& g = t.maps.height.spec;
  return Pose2{1.0, 0.5 * g.rows * g.resolution, 0.0};
}

Pose2 effective_goal(const RunConfig& cfg, const Terrain& t) {
  if (cfg.goal) return *cfg.goal;
  const GridSpec& g = t.maps.height.spec;
  return Pose2{g.cols * g.resolution - 1.0, 0.5 * g.rows * g.resolution, 0.0};
}

RunConfig parse_config(const nlohmann::json& j) {
  RunConfig cfg;
  check_keys(j, "config",
             {"traversability", "planner", "controller", "sim", "episode",
              "terrain", "benchmark", "out_dir"});
  if (j.contains("traversability")) cfg.trav = parse_trav(j.at("traversability"));
  if (j.contains("planner")) cfg.episode.planner = parse_planner(j.at("planner"));
  if (j.contains("controller"))
    cfg.episode.controller = parse_controller(j.at("controller"));
  if (j.contains("sim")) cfg.episode.sim = parse_sim(j.at("sim"));
  if (j.contains("episode")) {
    const json& e = j.at("episode");
    check_keys(e, "episode",
               {"cruise_speed", "max_steps", "stuck_window", "stuck_pos_eps",
                "stuck_ang_eps", "start", "goal"});
    cfg.episode.cruise_speed =
        get_num(e, "episode", "cruise_speed", cfg.episode.cruise_speed);
    cfg.episode.max_steps = get_int(e, "episode", "max_steps", cfg.episode.max_steps);
    cfg.episode.stuck_window =
        get_num(e, "episode", "stuck_window", cfg.episode.stuck_window);
    cfg.episode.stuck_pos_eps =
        get_num(e, "episode", "stuck_pos_eps", cfg.episode.stuck_pos_eps);
    cfg.episode.stuck_ang_eps =
        get_num(e, "episode", "stuck_ang_eps", cfg.episode.stuck_ang_eps);
    if (e.contains("start")) cfg.start = parse_pose(e.at("start"), "episode.start");
    if (e.contains("goal")) cfg.goal = parse_pose(e.at("goal"), "episode.goal");
  }
  if (j.contains("terrain")) cfg.terrain = parse_terrain(j.at("terrain"));
  if (j.contains("benchmark")) {
    const json& b = j.at("benchmark");
    check_keys(b, "benchmark",
               {"trials", "base_seed", "workers", "inclinations",
                "difficulty_cuts", "methods", "suite"});
    cfg.trials = get_int(b, "benchmark", "trials", cfg.trials);
    cfg.base_seed = get_u64(b, "benchmark", "base_seed", cfg.base_seed);
    cfg.workers = get_int(b, "benchmark", "workers", cfg.workers);
    cfg.inclinations = get_bool(b, "benchmark", "inclinations", cfg.inclinations);
    const auto cuts = get_vec(b, "benchmark", "difficulty_cuts", 2,
                              {cfg.cuts.easy_below, cfg.cuts.plain_below});
    cfg.cuts = {cuts[0], cuts[1]};
    if (b.contains("methods")) {
      if (!b.at("methods").is_array()) bad("benchmark.methods must be an array");
      for (const auto& e : b.at("methods")) {
        if (!e.is_string()) bad("benchmark.methods entries must be strings");
        cfg.arms.push_back(arm_from_name(e.get<std::string>()));
      }
    }
    if (b.contains("suite")) {
      if (!b.at("suite").is_array()) bad("benchmark.suite must be an array");
      for (const auto& e : b.at("suite")) cfg.suite.push_back(parse_terrain(e));
    }
  }
  cfg.out_dir = get_str(j, "config", "out_dir", cfg.out_dir);
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("invalid JSON in '" + path + "': " + e.what());
  }
  return parse_config(j);
}

nlohmann::json to_json(const RunConfig& cfg) {
  json j;
  j["traversability"] = trav_json(cfg.trav);
  j["planner"] = planner_json(cfg.episode.planner);
  j["controller"] = controller_json(cfg.episode.controller);
  j["sim"] = sim_json(cfg.episode.sim);
  json e;
  e["cruise_speed"] = cfg.episode.cruise_speed;
  e["max_steps"] = cfg.episode.max_steps;
  e["stuck_window"] = cfg.episode.stuck_window;
  e["stuck_pos_eps"] = cfg.episode.stuck_pos_eps;
  e["stuck_ang_eps"] = cfg.episode.stuck_ang_eps;
  if (cfg.start) e["start"] = {cfg.start->x, cfg.start->y, cfg.start->heading};
  if (cfg.goal) e["goal"] = {cfg.goal->x, cfg.goal->y, cfg.goal->heading};
  j["episode"] = std::move(e);
  j["terrain"] = terrain_json(cfg.terrain);
  json b;
  b["trials"] = cfg.trials;
  b["base_seed"] = cfg.base_seed;
  b["workers"] = cfg.workers;
  b["inclinations"] = cfg.inclinations;
  b["difficulty_cuts"] = {cfg.cuts.easy_below, cfg.cuts.plain_below};
  if (!cfg.arms.empty()) {
    json arr = json::array();
    for (const auto& a : cfg.arms) arr.push_back(a.name());
    b["methods"] = std::move(arr);
  }
  if (!cfg.suite.empty()) {
    json arr = json::array();
    for (const auto& s : cfg.suite) arr.push_back(terrain_json(s));
    b["suite"] = std::move(arr);
  }
  j["benchmark"] = std::move(b);
  j["out_dir"] = cfg.out_dir;
  return j;
}

void save_config(const std::string& path, const RunConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config file '" + path + "'");
  out << to_json(cfg).dump(2) << '\n';
  if (!out) throw IoError("failed writing config file '" + path + "'");
}

}  // namespace tnav
