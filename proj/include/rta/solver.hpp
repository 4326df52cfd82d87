#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rta/plant.hpp"
#include "rta/rng.hpp"
#include "rta/shaping.hpp"

namespace rta {

struct ValueFunction {
  std::vector<double> v;  // per state, v(s) = max_a q(s,a)
  std::vector<double> q;  // [state * num_actions + action]
  double residual = 0.0;  // final sup-norm sweep change
  long long sweeps = 0;
};

// Bellman iteration until the sup-norm change drops below
// tol * (1-gamma) / (2*gamma), which puts the greedy policy within tol of
// optimal. Convergence is guaranteed by contraction; a 1e7 sweep cap guards
// against misuse and trips an internal error.
ValueFunction value_iteration(const Plant& plant, std::span<const double> reward_table,
                              double gamma, double tol);
ValueFunction value_iteration(const Mdp& mdp, std::span<const double> reward_table,
                              double gamma, double tol);
ValueFunction value_iteration(const Plant& plant, const RewardStructure& rs, double tol);
ValueFunction value_iteration(const Plant& plant, const ShapedReward& shaped, double tol);
ValueFunction value_iteration(const Mdp& mdp, const ShapedReward& shaped, double tol);

// Greedy policy; exact-value ties go to the untrusted action when the model
// has one, then to the lowest action index.
StationaryPolicy extract_policy(const ValueFunction& vf, const Plant& plant);
StationaryPolicy extract_policy(const ValueFunction& vf, const Mdp& mdp);

struct BestSafePolicy {
  StationaryPolicy policy;
  double value = 0.0;
};

// Enumeration oracle over all |A|^|Q| stationary policies (guarded at 1e6):
// the exact best value among safe policies, or nullopt when none is safe.
std::optional<BestSafePolicy> brute_force_best_safe(const Plant& plant,
                                                    const RewardStructure& rs,
                                                    const UnsafeSet& unsafe);

struct SynthesisResult {
  StationaryPolicy policy;
  double shaped_value = 0.0;    // exact cycle-detected value at q0 under r'
  SafetyVerdict verdict = SafetyVerdict::kNoSafePolicy;
  double unshaped_value = 0.0;  // exact value at q0 under the base reward
  double penalty = 0.0;
  double residual = 0.0;        // value-iteration residual, reported for MDPs
};

// Full pipeline: shape with n = |Q|, solve, extract, certify on the exact
// shaped value of the extracted policy.
SynthesisResult synthesize_safe_optimal(const Plant& plant, const RewardStructure& rs,
                                        const UnsafeSet& unsafe);

// MDP variant; the certificate value comes from exact policy evaluation
// (direct linear solve) and the iteration residual is reported alongside.
SynthesisResult synthesize_safe_optimal(const Mdp& mdp, const RewardStructure& rs,
                                        const UnsafeSet& unsafe,
                                        std::optional<double> min_path_prob = {});

// Exact discounted value of a stationary policy on an MDP at the initial
// state, via Gaussian elimination on (I - gamma P_pi) v = r_pi.
double mdp_policy_value(const Mdp& mdp, const StationaryPolicy& policy,
                        std::span<const double> reward_table, double gamma);

struct RandomPlant {
  Plant plant;
  UnsafeSet unsafe;
  RewardStructure rewards;
};

// Random two-action plant with 2..max_states states, uniform transitions,
// rewards in {0,1} and each state unsafe with probability 1/4. Drives the
// property harnesses for the shaping theorem.
RandomPlant random_plant(SplitMix64& rng, int max_states, double gamma);

}  // namespace rta
