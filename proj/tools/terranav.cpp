// Command-line front end: terrain assessment, planning, closed-loop
// simulation, and the benchmark matrix. All artifacts are plain CSV/PGM/JSON
// files under the output directory (--out flag, TNAV_OUT_DIR env var, or the
// config's out_dir, in that precedence).
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tnav/errors.hpp"
#include "tnav/gridmap/io.hpp"
#include "tnav/harness/benchmark.hpp"
#include "tnav/harness/config.hpp"
#include "tnav/rng.hpp"

namespace fs = std::filesystem;

namespace tnav {
namespace {

struct Opts {
  std::string config_path;
  std::string out;
  std::string method;
  std::string level;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, Opts& o) {
  cmd->add_option("--config", o.config_path, "JSON run configuration file");
  cmd->add_option("--seed", o.seed, "override the base seed");
  cmd->add_option("--out", o.out,
                  "output directory (overrides TNAV_OUT_DIR and the config)");
  cmd->add_option("--method", o.method,
                  "planner {tao,dem,tau_only,putn_flatness} or full arm "
                  "planner+solver+{adaptive|vanilla}");
  cmd->add_option("--level", o.level, "difficulty filter {easy,plain,hard}");
}

RunConfig make_config(const Opts& o) {
  RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
  if (o.seed_set) cfg.base_seed = o.seed;
  return cfg;
}

// Applies --method to the single-episode settings.
void apply_method(RunConfig& cfg, const std::string& method) {
  if (method.empty()) return;
  if (method.find('+') != std::string::npos) {
    const MethodArm arm = arm_from_name(method);
    cfg.episode.planner.method = arm.planner;
    cfg.episode.controller.solver = arm.solver;
    cfg.episode.controller.adaptive = arm.adaptive;
  } else {
    cfg.episode.planner.method = planner_method_from_string(method);
  }
}

fs::path resolve_out_dir(const Opts& o, const RunConfig& cfg) {
  std::string dir = cfg.out_dir;
  if (const char* env = std::getenv("TNAV_OUT_DIR"); env && *env) dir = env;
  if (!o.out.empty()) dir = o.out;
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "'");
  return p;
}

// Analysis parameters as the selected planner method sees them.
TraversabilityParams method_trav(const RunConfig& cfg) {
  TraversabilityParams tp = cfg.trav;
  tp.bumpiness_mode = method_bumpiness_mode(cfg.episode.planner.method);
  return tp;
}

Terrain make_terrain(const Opts& o, RunConfig& cfg) {
  if (o.seed_set) cfg.terrain.seed = o.seed;
  return generate_terrain(cfg.terrain, method_trav(cfg));
}

void save_constraint_csv(const fs::path& path, const ConstraintMap& m) {
  std::vector<double> vals(m.gamma.begin(), m.gamma.end());
  save_grid_csv(path.string(), m.spec, vals);
}

// Control-log trajectory: t,x,y,theta,zeta,omega,psi,Rk_scale,Wk,objective.
void save_trajectory_csv(const fs::path& path,
                         const std::vector<TrajectoryPoint>& traj) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << "t,x,y,theta,zeta,omega,psi,Rk_scale,Wk,objective\n";
  for (const auto& p : traj) {
    out << format_double(p.t) << ',' << format_double(p.x) << ','
        << format_double(p.y) << ',' << format_double(p.theta) << ','
        << format_double(p.zeta) << ',' << format_double(p.omega) << ','
        << format_double(p.psi) << ',' << format_double(p.r_scale) << ','
        << format_double(p.w_k) << ',' << format_double(p.objective) << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

EpisodeRow make_row(const RunConfig& cfg, const Terrain& terrain,
                    std::uint64_t seed, const EpisodeResult& res) {
  EpisodeRow row;
  row.terrain_id = terrain.id;
  row.level = difficulty_level(terrain, cfg.cuts);
  row.arm = {cfg.episode.planner.method, cfg.episode.controller.solver,
             cfg.episode.controller.adaptive};
  row.seed = seed;
  row.success = res.success;
  row.steps = res.steps;
  row.progress = res.progress;
  row.aeg_mm = res.aeg_mm;
  row.trav_pct = res.trav_pct;
  row.cte_cm = res.cte_cm;
  row.incons_cm = res.incons_cm;
  row.failure_reason = res.failure_reason;
  return row;
}

int run_assess(const Opts& o) {
  RunConfig cfg = make_config(o);
  apply_method(cfg, o.method);
  const fs::path out = resolve_out_dir(o, cfg);
  const Terrain terrain = make_terrain(o, cfg);
  const TerrainMaps& m = terrain.maps;
  save_heightmap_csv((out / "height.csv").string(), m.height);
  save_heightmap_pgm((out / "height.pgm").string(), m.height);
  save_grid_csv((out / "tau.csv").string(), m.trav.spec, m.trav.tau);
  save_grid_csv((out / "mean_tau.csv").string(), m.trav.spec, m.trav.mean_tau);
  save_grid_csv((out / "slope.csv").string(), m.trav.spec, m.trav.slope);
  save_grid_csv((out / "sparsity.csv").string(), m.trav.spec, m.trav.sparsity);
  save_grid_csv((out / "bumpiness.csv").string(), m.trav.spec, m.trav.bumpiness);
  save_constraint_csv(out / "constraint.csv", m.constraint);
  std::cout << "terrain " << terrain.id << ": " << m.height.spec.rows << "x"
            << m.height.spec.cols << " cells, mean tau "
            << format_double(terrain_mean_tau(terrain)) << ", level "
            << to_string(difficulty_level(terrain, cfg.cuts)) << "\n"
            << "maps written to " << out.string() << "\n";
  return 0;
}

int run_plan(const Opts& o) {
  RunConfig cfg = make_config(o);
  apply_method(cfg, o.method);
  const fs::path out = resolve_out_dir(o, cfg);
  const Terrain terrain = make_terrain(o, cfg);
  const Pose2 start = effective_start(cfg, terrain);
  const Pose2 goal = effective_goal(cfg, terrain);
  // Same derivation as the closed-loop episode, so `plan` shows exactly the
  // path `simulate` executes for the same seed.
  const std::uint64_t plan_seed = hash_combine(cfg.base_seed, hash64("plan"));
  std::vector<Node> tree;
  PlannedPath path;
  try {
    path = plan(terrain.maps, start, goal, cfg.episode.planner, plan_seed, &tree);
  } catch (const Error&) {
    if (!tree.empty()) save_tree_csv((out / "tree.csv").string(), tree);
    throw;
  }
  save_tree_csv((out / "tree.csv").string(), tree);
  if (!path.success) {
    throw RuntimeFailure("plan", "no path found within the sampling budget "
                                 "(tree written to " +
                                     (out / "tree.csv").string() + ")");
  }
  assign_desired_velocity(path, cfg.episode.cruise_speed,
                          cfg.episode.controller.zeta_min);
  save_path_csv((out / "path.csv").string(), path);
  std::cout << "path: " << path.waypoints.size() << " waypoints, length "
            << format_double(path.total_length) << " m, cost "
            << format_double(path.total_cost) << ", iterations "
            << path.iterations_used << "\n"
            << "written to " << (out / "path.csv").string() << "\n";
  return 0;
}

int run_simulate(const Opts& o) {
  RunConfig cfg = make_config(o);
  apply_method(cfg, o.method);
  const fs::path out = resolve_out_dir(o, cfg);
  const Terrain terrain = make_terrain(o, cfg);
  const Pose2 start = effective_start(cfg, terrain);
  const Pose2 goal = effective_goal(cfg, terrain);
  const std::uint64_t seed = cfg.base_seed;
  const EpisodeResult res = run_episode(terrain, start, goal, cfg.episode, seed);
  save_trajectory_csv(out / "trajectory.csv", res.trajectory);
  if (!res.path.waypoints.empty())
    save_path_csv((out / "path.csv").string(), res.path);
  write_episode_csv((out / "episode.csv").string(),
                    {make_row(cfg, terrain, seed, res)});
  std::cout << "episode: " << (res.success ? "success" : "failure") << " ("
            << to_string(res.failure_reason) << "), steps " << res.steps
            << ", progress " << format_double(res.progress) << ", aeg "
            << format_double(res.aeg_mm) << " mm, trav "
            << format_double(res.trav_pct) << " %, cte "
            << format_double(res.cte_cm) << " cm, incons "
            << format_double(res.incons_cm) << " cm\n"
            << "logs written to " << out.string() << "\n";
  if (!res.success) {
    std::cerr << "error: episode: " << to_string(res.failure_reason) << "\n";
    return 3;
  }
  return 0;
}

int run_benchmark_cmd(const Opts& o) {
  RunConfig cfg = make_config(o);
  if (!o.method.empty()) {
    if (o.method.find('+') != std::string::npos) {
      cfg.arms = {arm_from_name(o.method)};
    } else {
      const PlannerMethod m = planner_method_from_string(o.method);
      std::vector<MethodArm> keep;
      for (const auto& a : cfg.arms.empty() ? default_arms() : cfg.arms)
        if (a.planner == m) keep.push_back(a);
      if (keep.empty()) throw UsageError("--method matches no benchmark arm");
      cfg.arms = keep;
    }
  }
  if (!o.level.empty()) {
    const Difficulty want = difficulty_from_string(o.level);
    std::vector<TerrainSpec> suite =
        cfg.suite.empty() ? benchmark_suite() : cfg.suite;
    if (cfg.inclinations) suite = expand_inclinations(suite);
    std::vector<TerrainSpec> keep;
    for (const auto& spec : suite) {
      const Terrain t = generate_terrain(spec, cfg.trav);
      if (difficulty_level(t, cfg.cuts) == want) keep.push_back(spec);
    }
    if (keep.empty()) throw UsageError("--level matches no suite terrain");
    cfg.suite = keep;
    cfg.inclinations = false;
  }
  const fs::path out = resolve_out_dir(o, cfg);
  const BenchmarkReport report = run_benchmark(
      cfg, [](const EpisodeRow& row, int done, int total) {
        std::cerr << "[" << done << "/" << total << "] " << row.terrain_id
                  << " " << row.arm.name() << " trial " << row.trial << ": "
                  << (row.success ? "success" : to_string(row.failure_reason))
                  << " (steps " << row.steps << ")\n";
      });
  write_episode_csv((out / "episodes.csv").string(), report.rows);
  write_summary_csv((out / "summary.csv").string(), report.aggregates);
  save_config((out / "config.json").string(), cfg);
  std::cout << render_summary_table(report.aggregates);
  std::cout << report.terrain_count << " terrains, " << report.rows.size()
            << " episodes; reports written to " << out.string() << "\n";
  return 0;
}

int run_report(const Opts& o) {
  RunConfig cfg = make_config(o);
  const fs::path out = resolve_out_dir(o, cfg);
  const auto rows = read_episode_csv((out / "episodes.csv").string());
  const auto aggregates = aggregate_rows(rows);
  write_summary_csv((out / "summary.csv").string(), aggregates);
  if (!o.level.empty()) {
    const Difficulty want = difficulty_from_string(o.level);
    std::vector<AggregateRow> shown;
    for (const auto& a : aggregates)
      if (a.level == want) shown.push_back(a);
    std::cout << render_summary_table(shown);
  } else {
    std::cout << render_summary_table(aggregates);
  }
  std::cout << rows.size() << " episodes; summary written to "
            << (out / "summary.csv").string() << "\n";
  return 0;
}

int dispatch(CLI::App& app, const std::vector<std::pair<CLI::App*, int (*)(const Opts&)>>& cmds,
             std::vector<Opts>& opts) {
  (void)app;
  for (std::size_t i = 0; i < cmds.size(); ++i) {
    if (cmds[i].first->parsed()) {
      opts[i].seed_set = cmds[i].first->count("--seed") > 0;
      return cmds[i].second(opts[i]);
    }
  }
  throw UsageError("a subcommand is required");
}

}  // namespace
}  // namespace tnav

int main(int argc, char** argv) {
  using namespace tnav;
  CLI::App app{"traversability-aware navigation toolkit"};
  app.require_subcommand(0, 1);
  std::vector<Opts> opts(5);
  std::vector<std::pair<CLI::App*, int (*)(const Opts&)>> cmds = {
      {app.add_subcommand("assess", "analyze a terrain and export its maps"),
       &run_assess},
      {app.add_subcommand("plan", "plan a path across a terrain"), &run_plan},
      {app.add_subcommand("simulate", "run one closed-loop episode"),
       &run_simulate},
      {app.add_subcommand("benchmark", "run the full method-matrix benchmark"),
       &run_benchmark_cmd},
      {app.add_subcommand("report", "re-aggregate an episode report"),
       &run_report},
  };
  for (std::size_t i = 0; i < cmds.size(); ++i) add_common(cmds[i].first, opts[i]);

  try {
    app.parse(argc, argv);
    return dispatch(app, cmds, opts);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.category() << ": " << e.what() << "\n";
    return (e.category() == "config" || e.category() == "usage" ||
            e.category() == "io")
               ? 2
               : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 3;
  }
}
