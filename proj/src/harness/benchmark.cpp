#include "tnav/harness/benchmark.hpp"

#include <atomic>
#include <charconv>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <utility>

#include "tnav/errors.hpp"
#include "tnav/rng.hpp"

namespace tnav {

namespace {

constexpr const char* kEpisodeHeader =
    "terrain_id,level,planner,controller,adaptive,seed,success,steps,"
    "progress,aeg_mm,trav_pct,cte_cm,incons_cm,failure_reason";

constexpr const char* kSummaryHeader =
    "method,level,episodes,successes,success_pct,mean_progress,mean_aeg_mm,"
    "mean_trav_pct,mean_cte_cm,mean_incons_cm";

FailureReason failure_reason_from_string(const std::string& s) {
  for (const FailureReason f :
       {FailureReason::kNone, FailureReason::kStuck, FailureReason::kCollision,
        FailureReason::kRollover, FailureReason::kTimeout,
        FailureReason::kPlanFailure}) {
    if (s == to_string(f)) return f;
  }
  throw IoError("unknown failure reason '" + s + "'");
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) {
      out.push_back(line.substr(pos));
      return out;
    }
    out.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
}

double parse_double(const std::string& s, const char* what) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw IoError(std::string("malformed ") + what + " value '" + s + "'");
  return v;
}

long long parse_ll(const std::string& s, const char* what) {
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw IoError(std::string("malformed ") + what + " value '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s, const char* what) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw IoError(std::string("malformed ") + what + " value '" + s + "'");
  return v;
}

struct GroupStats {
  int episodes = 0;
  int successes = 0;
  int planned = 0;  // rows that produced a path
  double progress = 0.0;
  double aeg_all = 0.0, aeg_ok = 0.0;
  double trav_pct = 0.0;
  double cte_all = 0.0, cte_ok = 0.0;
  double incons = 0.0;
};

}  // namespace

std::vector<AggregateRow> aggregate_rows(const std::vector<EpisodeRow>& rows) {
  // Method order follows first appearance; levels in difficulty order.
  std::vector<std::string> methods;
  for (const auto& r : rows) {
    const std::string name = r.arm.name();
    bool seen = false;
    for (const auto& m : methods) {
      if (m == name) {
        seen = true;
        break;
      }
    }
    if (!seen) methods.push_back(name);
  }

  std::vector<AggregateRow> out;
  for (const auto& method : methods) {
    for (const Difficulty level :
         {Difficulty::kEasy, Difficulty::kPlain, Difficulty::kHard}) {
      GroupStats g;
      for (const auto& r : rows) {
        if (r.level != level || r.arm.name() != method) continue;
        ++g.episodes;
        g.progress += r.progress;
        g.aeg_all += r.aeg_mm;
        g.cte_all += r.cte_cm;
        g.incons += r.incons_cm;
        if (r.success) {
          ++g.successes;
          g.aeg_ok += r.aeg_mm;
          g.cte_ok += r.cte_cm;
        }
        if (r.failure_reason != FailureReason::kPlanFailure) {
          ++g.planned;
          g.trav_pct += r.trav_pct;
        }
      }
      if (g.episodes == 0) continue;
      AggregateRow a;
      a.method = method;
      a.level = level;
      a.episodes = g.episodes;
      a.successes = g.successes;
      a.success_pct = 100.0 * g.successes / g.episodes;
      a.mean_progress = g.progress / g.episodes;
      a.mean_aeg_mm = g.successes > 0 ? g.aeg_ok / g.successes
                                      : g.aeg_all / g.episodes;
      a.mean_cte_cm = g.successes > 0 ? g.cte_ok / g.successes
                                      : g.cte_all / g.episodes;
      a.mean_trav_pct = g.planned > 0 ? g.trav_pct / g.planned : 0.0;
      a.mean_incons_cm = g.incons / g.episodes;
      out.push_back(std::move(a));
    }
  }
  return out;
}

BenchmarkReport run_benchmark(const RunConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  std::vector<TerrainSpec> suite =
      cfg.suite.empty() ? benchmark_suite() : cfg.suite;
  if (cfg.inclinations) suite = expand_inclinations(suite);
  const std::vector<MethodArm> arms =
      cfg.arms.empty() ? default_arms() : cfg.arms;
  const int trials = cfg.trials;

  int workers = cfg.workers;
  if (workers == 0) {
    workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
  }

  BenchmarkReport report;
  report.terrain_count = static_cast<int>(suite.size());
  const int per_terrain = static_cast<int>(arms.size()) * trials;
  const int total = report.terrain_count * per_terrain;
  report.rows.reserve(total);
  int done = 0;

  for (const TerrainSpec& spec : suite) {
    const Terrain terrain = generate_terrain(spec, cfg.trav);
    const Difficulty level = difficulty_level(terrain, cfg.cuts);
    const Pose2 start = effective_start(cfg, terrain);
    const Pose2 goal = effective_goal(cfg, terrain);

    // Task index maps to (arm, trial) in report order; workers fill result
    // slots so the merge is independent of scheduling.
    auto run_task = [&](int idx) {
      const MethodArm& arm = arms[idx / trials];
      const int trial = idx % trials;
      EpisodeConfig ec = cfg.episode;
      ec.planner.method = arm.planner;
      ec.controller.solver = arm.solver;
      ec.controller.adaptive = arm.adaptive;
      const std::uint64_t seed = derive_seed(
          cfg.base_seed, spec.id, arm.name(), static_cast<std::uint64_t>(trial));
      const EpisodeResult res = run_episode(terrain, start, goal, ec, seed);
      EpisodeRow row;
      row.terrain_id = spec.id;
      row.level = level;
      row.arm = arm;
      row.trial = trial;
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
    };

    if (workers <= 1) {
      for (int idx = 0; idx < per_terrain; ++idx) {
        report.rows.push_back(run_task(idx));
        ++done;
        if (progress) progress(report.rows.back(), done, total);
      }
    } else {
      std::vector<EpisodeRow> slots(per_terrain);
      std::atomic<int> next{0};
      std::atomic<bool> failed{false};
      std::exception_ptr error;
      std::mutex error_mutex;
      auto worker = [&] {
        while (!failed.load(std::memory_order_relaxed)) {
          const int idx = next.fetch_add(1);
          if (idx >= per_terrain) return;
          try {
            slots[idx] = run_task(idx);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
            failed.store(true, std::memory_order_relaxed);
            return;
          }
        }
      };
      std::vector<std::thread> pool;
      const int n = std::min(workers, per_terrain);
      pool.reserve(n);
      for (int i = 0; i < n; ++i) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
      if (error) std::rethrow_exception(error);
      for (auto& row : slots) {
        report.rows.push_back(std::move(row));
        ++done;
        if (progress) progress(report.rows.back(), done, total);
      }
    }
  }

  report.aggregates = aggregate_rows(report.rows);
  return report;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  TNAV_REQUIRE(res.ec == std::errc{}, "format_double: buffer too small");
  return std::string(buf, res.ptr);
}

void write_episode_csv(const std::string& path,
                       const std::vector<EpisodeRow>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << kEpisodeHeader << '\n';
  for (const auto& r : rows) {
    out << r.terrain_id << ',' << to_string(r.level) << ','
        << to_string(r.arm.planner) << ',' << to_string(r.arm.solver) << ','
        << (r.arm.adaptive ? 1 : 0) << ',' << r.seed << ','
        << (r.success ? 1 : 0) << ',' << r.steps << ','
        << format_double(r.progress) << ',' << format_double(r.aeg_mm) << ','
        << format_double(r.trav_pct) << ',' << format_double(r.cte_cm) << ','
        << format_double(r.incons_cm) << ','
        << to_string(r.failure_reason) << '\n';
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::vector<EpisodeRow> read_episode_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kEpisodeHeader)
    throw IoError("'" + path + "' is not an episode report (bad header)");
  std::vector<EpisodeRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 14)
      throw IoError("'" + path + "': expected 14 fields, got " +
                    std::to_string(f.size()));
    EpisodeRow r;
    r.terrain_id = f[0];
    r.level = difficulty_from_string(f[1]);
    r.arm.planner = planner_method_from_string(f[2]);
    r.arm.solver = solver_from_string(f[3]);
    const long long adaptive = parse_ll(f[4], "adaptive");
    if (adaptive != 0 && adaptive != 1)
      throw IoError("'" + path + "': adaptive must be 0 or 1");
    r.arm.adaptive = adaptive == 1;
    r.seed = parse_u64(f[5], "seed");
    r.success = parse_ll(f[6], "success") != 0;
    r.steps = static_cast<int>(parse_ll(f[7], "steps"));
    r.progress = parse_double(f[8], "progress");
    r.aeg_mm = parse_double(f[9], "aeg_mm");
    r.trav_pct = parse_double(f[10], "trav_pct");
    r.cte_cm = parse_double(f[11], "cte_cm");
    r.incons_cm = parse_double(f[12], "incons_cm");
    r.failure_reason = failure_reason_from_string(f[13]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_summary_csv(const std::string& path,
                       const std::vector<AggregateRow>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << kSummaryHeader << '\n';
  for (const auto& a : rows) {
    out << a.method << ',' << to_string(a.level) << ',' << a.episodes << ','
        << a.successes << ',' << format_double(a.success_pct) << ','
        << format_double(a.mean_progress) << ',' << format_double(a.mean_aeg_mm)
        << ',' << format_double(a.mean_trav_pct) << ','
        << format_double(a.mean_cte_cm) << ','
        << format_double(a.mean_incons_cm) << '\n';
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::string render_summary_table(const std::vector<AggregateRow>& rows) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-28s %-6s %5s %5s %7s %6s %8s %9s %7s %8s\n",
                "method", "level", "eps", "ok", "ok%", "prog", "aeg(mm)",
                "trav(%)", "cte(cm)", "inc(cm)");
  os << buf;
  for (const auto& a : rows) {
    std::snprintf(buf, sizeof buf,
                  "%-28s %-6s %5d %5d %7.1f %6.3f %8.2f %9.2f %7.2f %8.3f\n",
                  a.method.c_str(), to_string(a.level), a.episodes, a.successes,
                  a.success_pct, a.mean_progress, a.mean_aeg_mm, a.mean_trav_pct,
                  a.mean_cte_cm, a.mean_incons_cm);
    os << buf;
  }
  return os.str();
}

}  // namespace tnav
