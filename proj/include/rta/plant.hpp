#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rta {

// Finite plants and MDPs with dense integer state/action indices and side
// tables of names. RTA models conventionally use the two actions "S" (safety
// controller) and "U" (untrusted controller).

class UnsafeSet {
 public:
  UnsafeSet() = default;
  explicit UnsafeSet(int num_states) : member_(num_states, false) {}

  void add(int s) { member_.at(s) = true; }
  bool contains(int s) const {
    return s >= 0 && s < static_cast<int>(member_.size()) && member_[s];
  }
  int universe_size() const { return static_cast<int>(member_.size()); }
  int count() const;

 private:
  std::vector<bool> member_;
};

struct Plant {
  std::vector<std::string> state_names;
  std::vector<std::string> action_names;
  int initial = 0;
  std::vector<int> next;  // row-major [state * num_actions + action]

  int num_states() const { return static_cast<int>(state_names.size()); }
  int num_actions() const { return static_cast<int>(action_names.size()); }

  int step(int q, int a) const;  // total transition function, bounds-checked

  std::optional<int> action_index(std::string_view name) const;
  std::optional<int> state_index(std::string_view name) const;
  // Index of the designated safety/untrusted action ("S"/"U"); throws
  // PreconditionError when the plant has no such action.
  int safe_action() const;
  int untrusted_action() const;

  void validate() const;  // throws ConfigError on malformed tables
};

struct Mdp {
  struct Transition {
    int next = 0;
    double prob = 0.0;
  };

  std::vector<std::string> state_names;
  std::vector<std::string> action_names;
  int initial = 0;
  std::vector<std::vector<Transition>> rows;  // [state * num_actions + action]

  int num_states() const { return static_cast<int>(state_names.size()); }
  int num_actions() const { return static_cast<int>(action_names.size()); }

  const std::vector<Transition>& distribution(int q, int a) const;
  // Smallest nonzero transition probability over the whole model (1 if the
  // model is effectively deterministic).
  double min_positive_prob() const;

  void validate() const;  // distributions sum to 1 within 1e-12
};

// Probability-1 lift of a deterministic plant.
Mdp to_mdp(const Plant& plant);

struct RewardStructure {
  std::vector<double> r;  // [state * num_actions + action]
  int num_actions = 0;
  double gamma = 0.9;  // in (0, 1)

  double at(int s, int a) const { return r[static_cast<size_t>(s) * num_actions + a]; }
  double max_reward() const;
  double max_abs_reward() const;
  void validate(int num_states) const;
};

struct FiniteRun {
  std::vector<int> states;   // k + 1 entries, states[0] = initial
  std::vector<int> actions;  // k entries

  int length() const { return static_cast<int>(actions.size()); }
  int last_state() const { return states.back(); }
};

struct StationaryPolicy {
  std::vector<int> action;  // state -> action

  int at(int s) const { return action.at(s); }
};

// General switching policy: maps the run so far to a distribution over
// actions. Implementations are free to look only at the last state.
class HistoryPolicy {
 public:
  virtual ~HistoryPolicy() = default;
  // Must return a distribution over all actions summing to 1 within 1e-12.
  virtual std::vector<double> act(const FiniteRun& run) const = 0;
};

class StationaryDecider : public HistoryPolicy {
 public:
  StationaryDecider(StationaryPolicy policy, int num_actions)
      : policy_(std::move(policy)), num_actions_(num_actions) {}
  std::vector<double> act(const FiniteRun& run) const override;

 private:
  StationaryPolicy policy_;
  int num_actions_;
};

class UniformDecider : public HistoryPolicy {
 public:
  explicit UniformDecider(int num_actions) : num_actions_(num_actions) {}
  std::vector<double> act(const FiniteRun&) const override;

 private:
  int num_actions_;
};

// Deterministic decider driven by an arbitrary function of the run; handy for
// history-dependent policies such as the alternate-k construction.
class FunctionalDecider : public HistoryPolicy {
 public:
  FunctionalDecider(std::function<int(const FiniteRun&)> choose, int num_actions)
      : choose_(std::move(choose)), num_actions_(num_actions) {}
  std::vector<double> act(const FiniteRun& run) const override;

 private:
  std::function<int(const FiniteRun&)> choose_;
  int num_actions_;
};

// --- Operations on runs and policies (the formal-model layer) ---

// Run of exactly `horizon` transitions; actions drawn from the policy (and
// successors from the MDP distribution) deterministically for a fixed seed.
FiniteRun generate_run(const Plant& plant, const HistoryPolicy& policy, int horizon,
                       uint64_t seed);
FiniteRun generate_run(const Mdp& mdp, const HistoryPolicy& policy, int horizon,
                       uint64_t seed);

// Discounted reward of a finite run: sum_i gamma^i r(p_i, a_i).
double run_reward(const FiniteRun& run, const RewardStructure& rs);
double run_reward(const FiniteRun& run, std::span<const double> reward_table,
                  int num_actions, double gamma);

// Exact infinite-horizon value of a stationary policy on a deterministic
// plant. The unique run enters a cycle within |Q| steps; the value is the
// discounted prefix plus the geometric cycle sum.
double stationary_policy_value(const Plant& plant, const StationaryPolicy& policy,
                               const RewardStructure& rs);
double stationary_policy_value(const Plant& plant, const StationaryPolicy& policy,
                               std::span<const double> reward_table, double gamma);

// Probability of the cylinder set of `tau` under `policy`: the product of the
// policy probabilities (and transition probabilities for MDPs) along tau.
// A prefix inconsistent with the model support has probability 0.
double cylinder_probability(const Plant& plant, const HistoryPolicy& policy,
                            const FiniteRun& tau);
double cylinder_probability(const Mdp& mdp, const HistoryPolicy& policy,
                            const FiniteRun& tau);

// A stationary policy is safe iff its unique run never enters B. The run
// cycles within |Q| steps, so checking the first |Q| transitions suffices.
// For MDPs this is graph reachability of B restricted to the policy support.
bool is_safe_policy(const Plant& plant, const StationaryPolicy& policy,
                    const UnsafeSet& unsafe);
bool is_safe_policy(const Mdp& mdp, const StationaryPolicy& policy,
                    const UnsafeSet& unsafe);

}  // namespace rta
