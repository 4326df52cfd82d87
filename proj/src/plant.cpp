#include "rta/plant.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "rta/errors.hpp"
#include "rta/rng.hpp"

namespace rta {

namespace {

constexpr double kDistributionTolerance = 1e-12;

void check_distribution(const std::vector<double>& dist) {
  double sum = 0.0;
  for (double p : dist) {
    if (p < 0.0 || p > 1.0) {
      throw PreconditionError("policy distribution entry outside [0,1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kDistributionTolerance) {
    throw PreconditionError("policy distribution does not sum to 1");
  }
}

int sample_distribution(const std::vector<double>& dist, double u) {
  double acc = 0.0;
  for (size_t i = 0; i < dist.size(); ++i) {
    acc += dist[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(dist.size()) - 1;
}

}  // namespace

int UnsafeSet::count() const {
  return static_cast<int>(std::count(member_.begin(), member_.end(), true));
}

int Plant::step(int q, int a) const {
  if (q < 0 || q >= num_states() || a < 0 || a >= num_actions()) {
    throw PreconditionError("step: state or action index out of range");
  }
  return next[static_cast<size_t>(q) * num_actions() + a];
}

std::optional<int> Plant::action_index(std::string_view name) const {
  for (int a = 0; a < num_actions(); ++a) {
    if (action_names[a] == name) return a;
  }
  return std::nullopt;
}

std::optional<int> Plant::state_index(std::string_view name) const {
  for (int s = 0; s < num_states(); ++s) {
    if (state_names[s] == name) return s;
  }
  return std::nullopt;
}

int Plant::safe_action() const {
  if (auto a = action_index("S")) return *a;
  throw PreconditionError("plant has no action named S");
}

int Plant::untrusted_action() const {
  if (auto a = action_index("U")) return *a;
  throw PreconditionError("plant has no action named U");
}

void Plant::validate() const {
  if (num_states() < 1) throw ConfigError("plant needs at least one state");
  if (num_actions() < 1) throw ConfigError("plant needs at least one action");
  if (initial < 0 || initial >= num_states()) {
    throw ConfigError("plant initial state index out of range");
  }
  if (next.size() != static_cast<size_t>(num_states()) * num_actions()) {
    throw ConfigError("plant transition table is not total");
  }
  for (int t : next) {
    if (t < 0 || t >= num_states()) {
      throw ConfigError("plant transition target out of range");
    }
  }
}

const std::vector<Mdp::Transition>& Mdp::distribution(int q, int a) const {
  if (q < 0 || q >= num_states() || a < 0 || a >= num_actions()) {
    throw PreconditionError("distribution: state or action index out of range");
  }
  return rows[static_cast<size_t>(q) * num_actions() + a];
}

double Mdp::min_positive_prob() const {
  double b = 1.0;
  for (const auto& row : rows) {
    for (const auto& t : row) {
      if (t.prob > 0.0) b = std::min(b, t.prob);
    }
  }
  return b;
}

void Mdp::validate() const {
  if (num_states() < 1) throw ConfigError("mdp needs at least one state");
  if (num_actions() < 1) throw ConfigError("mdp needs at least one action");
  if (initial < 0 || initial >= num_states()) {
    throw ConfigError("mdp initial state index out of range");
  }
  if (rows.size() != static_cast<size_t>(num_states()) * num_actions()) {
    throw ConfigError("mdp transition table is not total");
  }
  for (const auto& row : rows) {
    if (row.empty()) throw ConfigError("mdp has an empty transition distribution");
    double sum = 0.0;
    for (const auto& t : row) {
      if (t.next < 0 || t.next >= num_states()) {
        throw ConfigError("mdp transition target out of range");
      }
      if (t.prob < 0.0 || t.prob > 1.0) {
        throw ConfigError("mdp transition probability outside [0,1]");
      }
      sum += t.prob;
    }
    if (std::abs(sum - 1.0) > kDistributionTolerance) {
      throw ConfigError("mdp transition distribution does not sum to 1");
    }
  }
}

Mdp to_mdp(const Plant& plant) {
  Mdp mdp;
  mdp.state_names = plant.state_names;
  mdp.action_names = plant.action_names;
  mdp.initial = plant.initial;
  mdp.rows.resize(plant.next.size());
  for (size_t i = 0; i < plant.next.size(); ++i) {
    mdp.rows[i] = {{plant.next[i], 1.0}};
  }
  return mdp;
}

double RewardStructure::max_reward() const {
  double m = r.empty() ? 0.0 : r[0];
  for (double x : r) m = std::max(m, x);
  return m;
}

double RewardStructure::max_abs_reward() const {
  double m = 0.0;
  for (double x : r) m = std::max(m, std::abs(x));
  return m;
}

void RewardStructure::validate(int num_states) const {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw ConfigError("discount factor must lie in (0,1)");
  }
  if (r.size() != static_cast<size_t>(num_states) * num_actions) {
    throw ConfigError("reward table size does not match the model");
  }
}

std::vector<double> StationaryDecider::act(const FiniteRun& run) const {
  std::vector<double> dist(num_actions_, 0.0);
  dist.at(policy_.at(run.last_state())) = 1.0;
  return dist;
}

std::vector<double> UniformDecider::act(const FiniteRun&) const {
  return std::vector<double>(num_actions_, 1.0 / num_actions_);
}

std::vector<double> FunctionalDecider::act(const FiniteRun& run) const {
  std::vector<double> dist(num_actions_, 0.0);
  dist.at(choose_(run)) = 1.0;
  return dist;
}

template <class Model, class Successor>
static FiniteRun generate_run_impl(const Model& model, const HistoryPolicy& policy,
                                   int horizon, uint64_t seed, Successor successor) {
  if (horizon < 0) throw PreconditionError("generate_run: horizon must be >= 0");
  SplitMix64 rng(seed);
  FiniteRun run;
  run.states.reserve(horizon + 1);
  run.actions.reserve(horizon);
  run.states.push_back(model.initial);
  for (int i = 0; i < horizon; ++i) {
    std::vector<double> dist = policy.act(run);
    if (static_cast<int>(dist.size()) != model.num_actions()) {
      throw PreconditionError("policy distribution arity mismatch");
    }
    check_distribution(dist);
    int a = sample_distribution(dist, rng.uniform01());
    run.actions.push_back(a);
    run.states.push_back(successor(run.states.back(), a, rng));
  }
  return run;
}

FiniteRun generate_run(const Plant& plant, const HistoryPolicy& policy, int horizon,
                       uint64_t seed) {
  return generate_run_impl(plant, policy, horizon, seed,
                           [&](int q, int a, SplitMix64&) { return plant.step(q, a); });
}

FiniteRun generate_run(const Mdp& mdp, const HistoryPolicy& policy, int horizon,
                       uint64_t seed) {
  return generate_run_impl(
      mdp, policy, horizon, seed, [&](int q, int a, SplitMix64& rng) {
        const auto& row = mdp.distribution(q, a);
        double u = rng.uniform01();
        double acc = 0.0;
        for (const auto& t : row) {
          acc += t.prob;
          if (u < acc) return t.next;
        }
        return row.back().next;
      });
}

double run_reward(const FiniteRun& run, std::span<const double> reward_table,
                  int num_actions, double gamma) {
  double total = 0.0;
  double weight = 1.0;
  for (int i = 0; i < run.length(); ++i) {
    total += weight * reward_table[static_cast<size_t>(run.states[i]) * num_actions +
                                   run.actions[i]];
    weight *= gamma;
  }
  return total;
}

double run_reward(const FiniteRun& run, const RewardStructure& rs) {
  return run_reward(run, rs.r, rs.num_actions, rs.gamma);
}

double stationary_policy_value(const Plant& plant, const StationaryPolicy& policy,
                               std::span<const double> reward_table, double gamma) {
  const int n = plant.num_states();
  const int num_actions = plant.num_actions();
  std::vector<int> first_visit(n, -1);
  std::vector<int> path;
  std::vector<double> step_reward;
  path.reserve(n + 1);
  int q = plant.initial;
  while (first_visit[q] < 0) {
    first_visit[q] = static_cast<int>(path.size());
    path.push_back(q);
    int a = policy.at(q);
    step_reward.push_back(reward_table[static_cast<size_t>(q) * num_actions + a]);
    q = plant.step(q, a);
  }
  const int cycle_start = first_visit[q];
  const int cycle_len = static_cast<int>(path.size()) - cycle_start;

  double prefix = 0.0;
  double weight = 1.0;
  for (int i = 0; i < cycle_start; ++i) {
    prefix += weight * step_reward[i];
    weight *= gamma;
  }
  double cycle = 0.0;
  double cw = 1.0;
  for (int i = cycle_start; i < cycle_start + cycle_len; ++i) {
    cycle += cw * step_reward[i];
    cw *= gamma;
  }
  // cw is now gamma^cycle_len; weight is gamma^cycle_start.
  return prefix + weight * cycle / (1.0 - cw);
}

double stationary_policy_value(const Plant& plant, const StationaryPolicy& policy,
                               const RewardStructure& rs) {
  return stationary_policy_value(plant, policy, rs.r, rs.gamma);
}

template <class TransitionProb>
static double cylinder_probability_impl(int initial, const HistoryPolicy& policy,
                                        int num_actions, const FiniteRun& tau,
                                        TransitionProb transition_prob) {
  if (tau.states.empty() || tau.states.front() != initial) {
    throw PreconditionError("cylinder_probability: run must start at the initial state");
  }
  if (tau.states.size() != tau.actions.size() + 1) {
    throw PreconditionError("cylinder_probability: malformed run");
  }
  double prob = 1.0;
  FiniteRun prefix;
  prefix.states.push_back(tau.states.front());
  for (int i = 0; i < tau.length(); ++i) {
    std::vector<double> dist = policy.act(prefix);
    if (static_cast<int>(dist.size()) != num_actions) {
      throw PreconditionError("policy distribution arity mismatch");
    }
    check_distribution(dist);
    prob *= dist[tau.actions[i]];
    prob *= transition_prob(tau.states[i], tau.actions[i], tau.states[i + 1]);
    if (prob == 0.0) return 0.0;
    prefix.actions.push_back(tau.actions[i]);
    prefix.states.push_back(tau.states[i + 1]);
  }
  return prob;
}

double cylinder_probability(const Plant& plant, const HistoryPolicy& policy,
                            const FiniteRun& tau) {
  return cylinder_probability_impl(
      plant.initial, policy, plant.num_actions(), tau,
      [&](int q, int a, int q2) { return plant.step(q, a) == q2 ? 1.0 : 0.0; });
}

double cylinder_probability(const Mdp& mdp, const HistoryPolicy& policy,
                            const FiniteRun& tau) {
  return cylinder_probability_impl(mdp.initial, policy, mdp.num_actions(), tau,
                                   [&](int q, int a, int q2) {
                                     for (const auto& t : mdp.distribution(q, a)) {
                                       if (t.next == q2) return t.prob;
                                     }
                                     return 0.0;
                                   });
}

bool is_safe_policy(const Plant& plant, const StationaryPolicy& policy,
                    const UnsafeSet& unsafe) {
  int q = plant.initial;
  for (int i = 0; i <= plant.num_states(); ++i) {
    if (unsafe.contains(q)) return false;
    q = plant.step(q, policy.at(q));
  }
  return true;
}

bool is_safe_policy(const Mdp& mdp, const StationaryPolicy& policy,
                    const UnsafeSet& unsafe) {
  std::vector<bool> seen(mdp.num_states(), false);
  std::deque<int> frontier{mdp.initial};
  seen[mdp.initial] = true;
  while (!frontier.empty()) {
    int q = frontier.front();
    frontier.pop_front();
    if (unsafe.contains(q)) return false;
    for (const auto& t : mdp.distribution(q, policy.at(q))) {
      if (t.prob > 0.0 && !seen[t.next]) {
        seen[t.next] = true;
        frontier.push_back(t.next);
      }
    }
  }
  return true;
}

}  // namespace rta
