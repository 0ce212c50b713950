#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tnav/harness/config.hpp"

namespace tnav {

// One episode of the benchmark matrix, reduced to its report columns:
// terrain_id,level,planner,controller,adaptive,seed,success,steps,progress,
// aeg_mm,trav_pct,cte_cm,incons_cm,failure_reason. `trial` is bookkeeping
// only (the seed already encodes it) and is not serialized.
struct EpisodeRow {
  std::string terrain_id;
  Difficulty level = Difficulty::kEasy;
  MethodArm arm;
  int trial = 0;
  std::uint64_t seed = 0;
  bool success = false;
  int steps = 0;
  double progress = 0.0;
  double aeg_mm = 0.0;
  double trav_pct = 0.0;
  double cte_cm = 0.0;
  double incons_cm = 0.0;
  FailureReason failure_reason = FailureReason::kNone;
};

// Per (method, difficulty) aggregate, recomputable exactly from the rows.
// Trajectory-quality means (elevation gradient, cross-track error) are taken
// over successful episodes so a robot idling against an obstacle cannot
// masquerade as smooth; groups with no successes fall back to all episodes.
// Traversability means skip planner failures (there is no path to score).
struct AggregateRow {
  std::string method;  // MethodArm::name()
  Difficulty level = Difficulty::kEasy;
  int episodes = 0;
  int successes = 0;
  double success_pct = 0.0;
  double mean_progress = 0.0;   // all episodes
  double mean_aeg_mm = 0.0;     // successes (fallback: all)
  double mean_trav_pct = 0.0;   // episodes with a plan
  double mean_cte_cm = 0.0;     // successes (fallback: all)
  double mean_incons_cm = 0.0;  // all episodes
};

struct BenchmarkReport {
  std::vector<EpisodeRow> rows;  // ordered by (terrain, method, trial)
  std::vector<AggregateRow> aggregates;
  int terrain_count = 0;
};

// Group rows by (method, level); aggregate order follows the first
// appearance of the method among the rows, then difficulty.
std::vector<AggregateRow> aggregate_rows(const std::vector<EpisodeRow>& rows);

// Runs arms x trials over every suite terrain (seeded generation, one
// terrain resident at a time), merging worker results in task order so the
// report is independent of scheduling. Episode seeds derive from
// (base_seed, terrain id, arm name, trial).
using ProgressFn = std::function<void(const EpisodeRow&, int done, int total)>;
BenchmarkReport run_benchmark(const RunConfig& cfg,
                              const ProgressFn& progress = nullptr);

// CSV round-trip. Doubles print in shortest round-trip form, so parsing a
// written file reproduces the exact values (and re-aggregation the exact
// summary).
std::string format_double(double v);
void write_episode_csv(const std::string& path, const std::vector<EpisodeRow>& rows);
std::vector<EpisodeRow> read_episode_csv(const std::string& path);
void write_summary_csv(const std::string& path, const std::vector<AggregateRow>& rows);
std::string render_summary_table(const std::vector<AggregateRow>& rows);

}  // namespace tnav
