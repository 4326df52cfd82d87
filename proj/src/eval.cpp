#include "rta/eval.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "rta/baseline_rta.hpp"
#include "rta/errors.hpp"
#include "rta/rng.hpp"

namespace rta {

using nlohmann::json;

namespace {

constexpr double kNeverClosingSentinel = 1e9;
constexpr double kClosingSpeedFloor = 1e-6;  // m/s

std::vector<int> decide_actions(const ScenarioConfig& cfg, const ScenarioState& state,
                                RtaKind rta, const QTable* table, uint64_t episode_seed) {
  const int agents = cfg.num_agents();
  std::vector<int> actions(agents, kActionS);
  switch (rta) {
    case RtaKind::kAlwaysS:
      break;
    case RtaKind::kAlwaysU:
      std::fill(actions.begin(), actions.end(), kActionU);
      break;
    case RtaKind::kSim: {
      int joint = sim_rta_decide(cfg, state, derive_seed(episode_seed, 4096 + state.t));
      std::fill(actions.begin(), actions.end(), joint);
      break;
    }
    case RtaKind::kReach: {
      int joint = reach_rta_decide(cfg, state);
      std::fill(actions.begin(), actions.end(), joint);
      break;
    }
    case RtaKind::kQTable:
      for (int agent = 0; agent < agents; ++agent) {
        actions[agent] =
            table->decide(observation(cfg, state.leader, state.followers, agent));
      }
      break;
  }
  return actions;
}

EpisodeMetrics run_episode(const ScenarioConfig& cfg, RtaKind rta, const QTable* table,
                           uint64_t episode_seed, EpisodeRecord* record) {
  SplitMix64 rng(episode_seed);
  ScenarioState state = reset_randomized(cfg, rng);
  const int agents = cfg.num_agents();

  long long decisions = 0;
  long long u_picks = 0;
  double decider_seconds = 0.0;
  double dist_sum = 0.0;
  long long dist_count = 0;
  std::vector<double> step_min_dist;
  step_min_dist.push_back(min_unsafe_distance(cfg, state));
  for (int agent = 0; agent < agents; ++agent) {
    dist_sum += proximity_distance(cfg, state.leader, state.followers, agent);
    ++dist_count;
  }

  while (!state.done) {
    int t = state.t;
    ScenarioState before = state;

    auto start = std::chrono::steady_clock::now();
    std::vector<int> actions = decide_actions(cfg, state, rta, table, episode_seed);
    auto stop = std::chrono::steady_clock::now();
    decider_seconds += std::chrono::duration<double>(stop - start).count();
    ++decisions;
    for (int a : actions) u_picks += a == kActionU ? 1 : 0;

    StepResult step = env_step(cfg, state, actions);

    if (record) {
      for (int agent = 0; agent < agents; ++agent) {
        record->rows.push_back(
            {t, agent, before.followers[agent], actions[agent], step.reward,
             agent_unsafe_distance(cfg, before.leader, before.followers, agent)});
      }
    }
    step_min_dist.push_back(min_unsafe_distance(cfg, state));
    for (int agent = 0; agent < agents; ++agent) {
      dist_sum += proximity_distance(cfg, state.leader, state.followers, agent);
      ++dist_count;
    }
  }

  if (record) {
    for (int agent = 0; agent < agents; ++agent) {
      record->rows.push_back(
          {state.t, agent, state.followers[agent], -1, 0.0,
           agent_unsafe_distance(cfg, state.leader, state.followers, agent)});
    }
    record->step_min_dist = step_min_dist;
  }

  EpisodeMetrics metrics;
  metrics.violated = state.violation;
  metrics.rt_ms = decisions > 0 ? 1e3 * decider_seconds / decisions : 0.0;
  metrics.u_pct = decisions > 0 ? 100.0 * u_picks / (decisions * agents) : 0.0;
  metrics.mean_dist = dist_count > 0 ? dist_sum / dist_count : 0.0;
  metrics.ttc_s =
      time_to_collision(step_min_dist, cfg.period_seconds(), state.violation);
  return metrics;
}

}  // namespace

std::optional<RtaKind> rta_kind_from_string(const std::string& s) {
  if (s == "sim") return RtaKind::kSim;
  if (s == "reach") return RtaKind::kReach;
  if (s == "qtable") return RtaKind::kQTable;
  if (s == "always_s") return RtaKind::kAlwaysS;
  if (s == "always_u") return RtaKind::kAlwaysU;
  return std::nullopt;
}

const char* to_string(RtaKind k) {
  switch (k) {
    case RtaKind::kSim: return "sim";
    case RtaKind::kReach: return "reach";
    case RtaKind::kQTable: return "qtable";
    case RtaKind::kAlwaysS: return "always_s";
    case RtaKind::kAlwaysU: return "always_u";
  }
  return "?";
}

double time_to_collision(const std::vector<double>& step_min_dist, double period_s,
                         bool violated) {
  if (step_min_dist.empty()) throw PreconditionError("time_to_collision: empty trajectory");
  if (violated) {
    size_t first_violation = 0;
    while (first_violation < step_min_dist.size() && step_min_dist[first_violation] >= 0.0) {
      ++first_violation;
    }
    if (first_violation == 0 || first_violation == step_min_dist.size()) {
      return -kClosingSpeedFloor;  // defensive; reset() forbids starting violated
    }
    size_t j = first_violation - 1;
    double closing = (step_min_dist[j] - step_min_dist[j + 1]) / period_s;
    return -(step_min_dist[j] / std::max(closing, kClosingSpeedFloor));
  }
  double best = kNeverClosingSentinel;
  for (size_t i = 0; i + 1 < step_min_dist.size(); ++i) {
    double closing = (step_min_dist[i] - step_min_dist[i + 1]) / period_s;
    if (closing <= 0.0) continue;  // not closing: contributes the sentinel
    best = std::min(best, step_min_dist[i] / std::max(closing, kClosingSpeedFloor));
  }
  return best;
}

Report evaluate(const ScenarioConfig& cfg, RtaKind rta, int episodes, uint64_t seed,
                const QTable* table, std::vector<EpisodeRecord>* records) {
  if (episodes < 1) throw PreconditionError("evaluate: episodes must be >= 1");
  if (rta == RtaKind::kQTable && table == nullptr) {
    throw ConfigError("evaluate: the qtable decider requires a table file");
  }
  Report report;
  report.config_echo = scenario_json(cfg);
  report.rta = rta;
  report.master_seed = seed;
  report.episodes.reserve(episodes);
  for (int i = 0; i < episodes; ++i) {
    uint64_t episode_seed = derive_seed(seed, i);
    EpisodeRecord* record = nullptr;
    if (records) {
      records->push_back({});
      record = &records->back();
      record->seed = episode_seed;
    }
    EpisodeMetrics metrics = run_episode(cfg, rta, table, episode_seed, record);
    if (record) record->metrics = metrics;
    report.episodes.push_back(metrics);
  }
  recompute_aggregates(report);
  return report;
}

void recompute_aggregates(Report& report) {
  double rt = 0.0, ttc = 0.0, u = 0.0, dist = 0.0;
  long long failures = 0;
  for (const auto& m : report.episodes) {
    rt += m.rt_ms;
    ttc += m.ttc_s;
    u += m.u_pct;
    dist += m.mean_dist;
    failures += m.violated ? 1 : 0;
  }
  double n = static_cast<double>(report.episodes.size());
  report.mean_rt_ms = rt / n;
  report.mean_ttc_s = ttc / n;
  report.mean_u_pct = u / n;
  report.mean_dist = dist / n;
  report.fail_pct = 100.0 * failures / n;
}

void export_trajectory(const EpisodeRecord& episode, const ScenarioConfig& cfg,
                       const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write trajectory file: " + path);
  const Model model = cfg.follower_model();
  out << "t,agent_id,x,y,z,psi,gamma,v,action,reward,min_unsafe_dist\n";
  char buf[64];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (const auto& row : episode.rows) {
    double x = 0, y = 0, z = 0, psi = 0, gamma = 0, v = 0;
    switch (model) {
      case Model::kAcc:
        x = row.state[0];
        v = row.state[1];
        break;
      case Model::kDubins:
        x = row.state[0];
        y = row.state[1];
        psi = row.state[2];
        v = row.state[3];
        break;
      case Model::kAir:
        x = row.state[0];
        y = row.state[1];
        z = row.state[2];
        psi = row.state[3];
        gamma = row.state[4];
        v = row.state[5];
        break;
    }
    const char* action = row.action == kActionU ? "U" : (row.action == kActionS ? "S" : "-");
    out << row.t << ',' << row.agent << ',' << fmt(x) << ',' << fmt(y) << ',' << fmt(z)
        << ',' << fmt(psi) << ',' << fmt(gamma) << ',' << fmt(v) << ',' << action << ','
        << fmt(row.reward) << ',' << fmt(row.min_unsafe_dist) << '\n';
  }
  if (!out) throw ConfigError("write failed for trajectory file: " + path);
}

std::string report_json(const Report& report) {
  json doc;
  doc["rta"] = to_string(report.rta);
  doc["seed"] = report.master_seed;
  doc["config"] = json::parse(report.config_echo);
  json eps = json::array();
  for (const auto& m : report.episodes) {
    eps.push_back({{"rt_ms", m.rt_ms},
                   {"ttc_s", m.ttc_s},
                   {"u_pct", m.u_pct},
                   {"mean_dist", m.mean_dist},
                   {"violated", m.violated}});
  }
  doc["episodes"] = eps;
  doc["aggregates"] = {{"mean_rt_ms", report.mean_rt_ms},
                       {"mean_ttc_s", report.mean_ttc_s},
                       {"mean_u_pct", report.mean_u_pct},
                       {"mean_dist", report.mean_dist},
                       {"fail_pct", report.fail_pct}};
  return doc.dump(2) + "\n";
}

}  // namespace rta
