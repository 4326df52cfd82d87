#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rta/scenario.hpp"
#include "rta/tabular_q.hpp"

namespace rta {

enum class RtaKind { kSim, kReach, kQTable, kAlwaysS, kAlwaysU };

std::optional<RtaKind> rta_kind_from_string(const std::string& s);
const char* to_string(RtaKind k);

struct EpisodeMetrics {
  double rt_ms = 0.0;   // mean wall time per switch decision (decider only)
  double ttc_s = 0.0;   // minimum time to collision; negative on violation
  double u_pct = 0.0;   // percent of decision steps choosing U
  double mean_dist = 0.0;  // mean distance to leader / closest aircraft
  bool violated = false;
};

// One CSV row per agent per decision step; the final row of an episode
// carries action -1 (no decision is taken from the terminal state).
struct TrajectoryRow {
  int t = 0;
  int agent = 0;
  StateVec state{};
  int action = -1;
  double reward = 0.0;
  double min_unsafe_dist = 0.0;
};

struct EpisodeRecord {
  uint64_t seed = 0;
  std::vector<TrajectoryRow> rows;
  std::vector<double> step_min_dist;  // global signed distance per boundary
  EpisodeMetrics metrics;
};

struct Report {
  std::string config_echo;  // scenario config JSON
  RtaKind rta = RtaKind::kAlwaysS;
  uint64_t master_seed = 0;
  std::vector<EpisodeMetrics> episodes;
  double mean_rt_ms = 0.0;
  double mean_ttc_s = 0.0;
  double mean_u_pct = 0.0;
  double mean_dist = 0.0;
  double fail_pct = 0.0;
};

// Runs `episodes` randomized episodes under the chosen decider. Per-episode
// seeds derive from the master seed, so reports are reproducible. When
// `records` is non-null the full trajectories are captured for export.
Report evaluate(const ScenarioConfig& cfg, RtaKind rta, int episodes, uint64_t seed,
                const QTable* table = nullptr,
                std::vector<EpisodeRecord>* records = nullptr);

// Minimum over the run of signed-distance / closing-speed (forward
// differences over decision boundaries). Non-closing steps contribute the
// 1e9 sentinel; a violating run returns the negated estimate at the last
// pre-violation step.
double time_to_collision(const std::vector<double>& step_min_dist, double period_s,
                         bool violated);

// CSV export: t, agent_id, x, y, z, psi, gamma, v, action, reward,
// min_unsafe_dist; one row per agent per decision step, 17 significant
// digits, LF endings. Re-exporting the same episode is byte-identical.
void export_trajectory(const EpisodeRecord& episode, const ScenarioConfig& cfg,
                       const std::string& path);

std::string report_json(const Report& report);

// Recomputes the aggregate block from the per-episode list (self-check).
void recompute_aggregates(Report& report);

}  // namespace rta
