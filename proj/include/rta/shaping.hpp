#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rta/plant.hpp"

namespace rta {

enum class SafetyVerdict { kSafeExists, kNoSafePolicy };

// Reward transformation r' = r[B -> p] with p = -r_max / (gamma^n (1-gamma)).
// Any run that enters B within n steps then has strictly negative reward,
// while safe runs keep their original reward, so an optimal policy for r' is
// an optimal safe policy for r whenever the shaped value is non-negative.
struct ShapedReward {
  RewardStructure base;
  UnsafeSet unsafe;
  double penalty = 0.0;
  int horizon_n = 1;
  std::optional<double> min_path_prob;  // set by the MDP variant
  bool clamped = false;                 // penalty magnitude hit the 1e300 cap
  std::vector<std::string> warnings;

  double at(int s, int a) const {
    return unsafe.contains(s) ? penalty : base.at(s, a);
  }
  double gamma() const { return base.gamma; }
  // Dense [state * num_actions + action] table for solvers.
  std::vector<double> table(int num_states) const;
};

// Deterministic-plant shaping. Preconditions: r >= 0 everywhere (violations
// are reported with the offending state/action names) and n >= 1. When the
// base reward is identically zero a surrogate r_max = 1 keeps the penalty
// strictly negative.
ShapedReward shape(const RewardStructure& rs, const UnsafeSet& unsafe, int n,
                   const std::vector<std::string>* state_names = nullptr,
                   const std::vector<std::string>* action_names = nullptr);

// MDP variant: p = -r_max / (min_path_prob * gamma^n * (1-gamma)) where
// min_path_prob lower-bounds the probability of any length-n path.
ShapedReward shape_mdp(const RewardStructure& rs, const UnsafeSet& unsafe, int n,
                       double min_path_prob);

// Conservative default bound b^n with b the smallest nonzero transition
// probability of the MDP.
double least_path_prob_bound(const Mdp& mdp, int n);

// Safe policies exist iff the optimal shaped value is non-negative. The value
// must come from exact arithmetic (cycle detection) for the sign to be crisp.
SafetyVerdict certify(double optimal_shaped_value);

const char* to_string(SafetyVerdict v);

}  // namespace rta
