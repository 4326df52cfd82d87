#include "rta/tabular_q.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rta/errors.hpp"
#include "rta/rng.hpp"

namespace rta {

using nlohmann::json;

namespace {

double epsilon_at(const Hyperparams& hp, int episode, int episodes) {
  double span = hp.eps_decay_fraction * episodes;
  double frac = span > 0.0 ? std::min(1.0, episode / span) : 1.0;
  return hp.eps_start + (hp.eps_end - hp.eps_start) * frac;
}

QTable make_table(const Quantizer& quantizer, int num_actions, double gamma,
                  const Hyperparams& hp, uint64_t seed, std::string tag) {
  QTable qt;
  qt.scenario_tag = std::move(tag);
  qt.quantizer = quantizer;
  qt.num_actions = num_actions;
  qt.gamma = gamma;
  qt.hp = hp;
  qt.seed = seed;
  qt.q.assign(quantizer.num_cells() * num_actions, 0.0);
  qt.visits.assign(qt.q.size(), 0);
  return qt;
}

void q_update(QTable& qt, long long cell, int action, double target) {
  size_t idx = static_cast<size_t>(cell) * qt.num_actions + action;
  double alpha = qt.hp.alpha0 / (1.0 + qt.visits[idx] / qt.hp.alpha_visit_scale);
  qt.visits[idx] += 1;
  qt.q[idx] += alpha * (target - qt.q[idx]);
}

}  // namespace

int QTable::decide_cell(long long cell) const {
  size_t base = static_cast<size_t>(cell) * num_actions;
  int best = u_action;
  double best_q = q[base + u_action];
  for (int a = 0; a < num_actions; ++a) {
    if (a == u_action) continue;
    if (q[base + a] > best_q) {
      best_q = q[base + a];
      best = a;
    }
  }
  return best;
}

int QTable::decide(std::span<const double> obs) const {
  return decide_cell(quantizer.index(obs));
}

double QTable::max_q(long long cell) const {
  size_t base = static_cast<size_t>(cell) * num_actions;
  double best = q[base];
  for (int a = 1; a < num_actions; ++a) best = std::max(best, q[base + a]);
  return best;
}

namespace {

// Greedy evaluation batch used for checkpoint selection: mean discounted
// return and violation count over fixed-seed randomized episodes.
std::pair<double, int> greedy_probe(const ScenarioConfig& cfg, const QTable& qt,
                                    int episodes, uint64_t seed) {
  double total_return = 0.0;
  int violations = 0;
  const int agents = cfg.num_agents();
  std::vector<int> actions(agents);
  for (int ep = 0; ep < episodes; ++ep) {
    SplitMix64 rng(derive_seed(seed, ep));
    ScenarioState state = reset_randomized(cfg, rng);
    double discount = 1.0;
    while (!state.done) {
      for (int agent = 0; agent < agents; ++agent) {
        actions[agent] = qt.decide(observation(cfg, state.leader, state.followers, agent));
      }
      StepResult step = env_step(cfg, state, actions);
      total_return += discount * step.reward;
      discount *= cfg.gamma;
    }
    violations += state.violation ? 1 : 0;
  }
  return {total_return / episodes, violations};
}

}  // namespace

QTable train_scenario(const ScenarioConfig& cfg, const Hyperparams& hp, int episodes,
                      uint64_t seed) {
  if (episodes < 1) throw PreconditionError("train: episodes must be >= 1");
  if (cfg.obs_dims.empty()) {
    throw ConfigError("observation.dims: required for training");
  }
  Quantizer quantizer{cfg.obs_dims};
  quantizer.validate();
  QTable qt = make_table(quantizer, 2, cfg.gamma, hp, seed, to_string(cfg.kind));
  qt.u_action = kActionU;
  qt.episode_returns.reserve(episodes);
  qt.episode_violations.reserve(episodes);

  const int agents = cfg.num_agents();
  std::vector<long long> cells(agents);
  std::vector<long long> next_cells(agents);
  std::vector<int> actions(agents);

  struct Checkpoint {
    std::vector<double> q;
    std::vector<long long> visits;
  };
  std::vector<Checkpoint> checkpoints;
  const int checkpoint_every = std::max(1, episodes / 10);

  for (int ep = 0; ep < episodes; ++ep) {
    SplitMix64 rng(derive_seed(seed, ep));
    ScenarioState state = reset_randomized(cfg, rng);
    for (int agent = 0; agent < agents; ++agent) {
      cells[agent] =
          quantizer.index(observation(cfg, state.leader, state.followers, agent));
    }
    double eps = epsilon_at(hp, ep, episodes);
    double episode_return = 0.0;
    double discount = 1.0;
    while (!state.done) {
      for (int agent = 0; agent < agents; ++agent) {
        bool explore = rng.uniform01() < eps;
        actions[agent] = explore ? static_cast<int>(rng.below(2))
                                 : qt.decide_cell(cells[agent]);
      }
      StepResult step = env_step(cfg, state, actions);
      episode_return += discount * step.reward;
      discount *= cfg.gamma;
      if (!step.done) {
        for (int agent = 0; agent < agents; ++agent) {
          next_cells[agent] =
              quantizer.index(observation(cfg, state.leader, state.followers, agent));
        }
      }
      for (int agent = 0; agent < agents; ++agent) {
        double target = step.done
                            ? step.reward
                            : step.reward + cfg.gamma * qt.max_q(next_cells[agent]);
        q_update(qt, cells[agent], actions[agent], target);
      }
      cells = next_cells;
    }
    qt.episode_returns.push_back(episode_return);
    qt.episode_violations.push_back(state.violation ? 1 : 0);
    if ((ep + 1) % checkpoint_every == 0 || ep + 1 == episodes) {
      checkpoints.push_back({qt.q, qt.visits});
    }
  }

  // Model selection: best greedy mean return among checkpoints with zero
  // probe violations; keep the final table when none qualifies.
  const uint64_t probe_seed = derive_seed(seed, 0x9E3779B9ull);
  int best = -1;
  double best_return = 0.0;
  QTable probe_table = qt;
  for (size_t i = 0; i < checkpoints.size(); ++i) {
    probe_table.q = checkpoints[i].q;
    auto [mean_return, violations] = greedy_probe(cfg, probe_table, 20, probe_seed);
    if (violations == 0 && (best < 0 || mean_return > best_return)) {
      best = static_cast<int>(i);
      best_return = mean_return;
    }
  }
  if (best >= 0) {
    qt.q = checkpoints[best].q;
    qt.visits = checkpoints[best].visits;
  }
  return qt;
}

QTable train_plant(const Plant& plant, std::span<const double> reward_table,
                   double gamma, const Hyperparams& hp, int episodes, int episode_len,
                   uint64_t seed) {
  if (episodes < 1) throw PreconditionError("train: episodes must be >= 1");
  if (episode_len < 1) throw PreconditionError("train: episode_len must be >= 1");
  const int n = plant.num_states();
  const int num_actions = plant.num_actions();
  Quantizer identity{{{-0.5, n - 0.5, n}}};
  QTable qt = make_table(identity, num_actions, gamma, hp, seed, "plant");
  qt.u_action = plant.action_index("U").value_or(0);

  for (int ep = 0; ep < episodes; ++ep) {
    SplitMix64 rng(derive_seed(seed, ep));
    int state = plant.initial;
    double eps = epsilon_at(hp, ep, episodes);
    double episode_return = 0.0;
    double discount = 1.0;
    for (int step = 0; step < episode_len; ++step) {
      bool explore = rng.uniform01() < eps;
      int action = explore ? static_cast<int>(rng.below(num_actions))
                           : qt.decide_cell(state);
      int next = plant.step(state, action);
      double reward = reward_table[static_cast<size_t>(state) * num_actions + action];
      episode_return += discount * reward;
      discount *= gamma;
      // Fixed-length episodes over a live plant: always bootstrap, so the
      // table tracks the infinite-horizon values.
      q_update(qt, state, action, reward + gamma * qt.max_q(next));
      state = next;
    }
    qt.episode_returns.push_back(episode_return);
    qt.episode_violations.push_back(0);
  }
  return qt;
}

std::string qtable_json(const QTable& qt) {
  json doc;
  doc["scenario"] = qt.scenario_tag;
  json dims = json::array();
  for (const auto& d : qt.quantizer.dims) {
    dims.push_back({{"lo", d.lo}, {"hi", d.hi}, {"cells", d.cells}});
  }
  doc["quantizer"] = dims;
  doc["num_actions"] = qt.num_actions;
  doc["u_action"] = qt.u_action;
  doc["gamma"] = qt.gamma;
  doc["seed"] = qt.seed;
  doc["hyperparams"] = {{"alpha0", qt.hp.alpha0},
                        {"alpha_visit_scale", qt.hp.alpha_visit_scale},
                        {"eps_start", qt.hp.eps_start},
                        {"eps_end", qt.hp.eps_end},
                        {"eps_decay_fraction", qt.hp.eps_decay_fraction}};
  doc["q"] = qt.q;
  doc["visits"] = qt.visits;
  return doc.dump() + "\n";
}

QTable parse_qtable_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("q-table file is not valid JSON: ") + e.what());
  }
  try {
    QTable qt;
    qt.scenario_tag = doc.at("scenario").get<std::string>();
    for (const auto& d : doc.at("quantizer")) {
      qt.quantizer.dims.push_back(
          {d.at("lo").get<double>(), d.at("hi").get<double>(), d.at("cells").get<int>()});
    }
    qt.quantizer.validate();
    qt.num_actions = doc.at("num_actions").get<int>();
    qt.u_action = doc.at("u_action").get<int>();
    qt.gamma = doc.at("gamma").get<double>();
    qt.seed = doc.at("seed").get<uint64_t>();
    const auto& hp = doc.at("hyperparams");
    qt.hp.alpha0 = hp.at("alpha0").get<double>();
    qt.hp.alpha_visit_scale = hp.at("alpha_visit_scale").get<double>();
    qt.hp.eps_start = hp.at("eps_start").get<double>();
    qt.hp.eps_end = hp.at("eps_end").get<double>();
    qt.hp.eps_decay_fraction = hp.at("eps_decay_fraction").get<double>();
    qt.q = doc.at("q").get<std::vector<double>>();
    qt.visits = doc.at("visits").get<std::vector<long long>>();
    if (qt.q.size() != static_cast<size_t>(qt.quantizer.num_cells()) * qt.num_actions ||
        qt.visits.size() != qt.q.size()) {
      throw ConfigError("q-table file: value array does not match the quantizer");
    }
    return qt;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed q-table file: ") + e.what());
  }
}

void save_qtable(const QTable& qt, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write q-table file: " + path);
  out << qtable_json(qt);
}

QTable load_qtable(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open q-table file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_qtable_json(buffer.str());
}

}  // namespace rta
