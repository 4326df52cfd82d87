#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rta/dynamics.hpp"
#include "rta/plant.hpp"
#include "rta/scenario.hpp"

namespace rta {

struct Hyperparams {
  double alpha0 = 0.2;
  double alpha_visit_scale = 1000.0;  // alpha = alpha0 / (1 + visits/scale)
  double eps_start = 0.3;
  double eps_end = 0.02;
  double eps_decay_fraction = 0.8;  // linear decay over this share of episodes
};

// Tabular Q function over quantized observations. Ties in the greedy action
// go to the untrusted action, so untouched (all-zero) cells default to U.
struct QTable {
  std::string scenario_tag;
  Quantizer quantizer;
  int num_actions = 2;
  int u_action = kActionU;
  double gamma = 0.995;
  uint64_t seed = 0;
  Hyperparams hp;
  std::vector<double> q;          // [cell * num_actions + action]
  std::vector<long long> visits;  // same layout
  // Training curve: per-episode discounted return and violation flag.
  std::vector<double> episode_returns;
  std::vector<uint8_t> episode_violations;

  int decide_cell(long long cell) const;
  int decide(std::span<const double> obs) const;
  double max_q(long long cell) const;
};

// Episodic training on a scenario with the shaped violation penalty:
// epsilon-greedy over env_step, one-step Q updates, randomized starts. A
// violation terminates the episode and its penalty is not bootstrapped;
// hitting the step cap simply ends the episode (finite-horizon semantics, as
// in the training protocol the penalty was derived for).
//
// The table is checkpointed every 10% of episodes and the returned table is
// the checkpoint with the best greedy mean return among those with zero
// violations over a fixed evaluation batch (the final table if none
// qualifies). The full training curve is attached either way.
QTable train_scenario(const ScenarioConfig& cfg, const Hyperparams& hp, int episodes,
                      uint64_t seed);

// Training over a discrete plant with an identity quantizer on the state
// index. Episodes restart from q0 every `episode_len` steps and the final
// transition bootstraps, so the table converges to the infinite-horizon
// discounted fixed point of the given reward table.
QTable train_plant(const Plant& plant, std::span<const double> reward_table,
                   double gamma, const Hyperparams& hp, int episodes, int episode_len,
                   uint64_t seed);

std::string qtable_json(const QTable& qt);
QTable parse_qtable_json(const std::string& text);
void save_qtable(const QTable& qt, const std::string& path);
QTable load_qtable(const std::string& path);

}  // namespace rta
