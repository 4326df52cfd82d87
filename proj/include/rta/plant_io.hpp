#pragma once

#include <string>
#include <variant>

#include "rta/plant.hpp"
#include "rta/shaping.hpp"
#include "rta/solver.hpp"

namespace rta {

// A parsed plant description: the model (deterministic or probabilistic), its
// unsafe set, and its reward structure.
struct PlantFile {
  std::variant<Plant, Mdp> model;
  UnsafeSet unsafe;
  RewardStructure rewards;

  bool is_mdp() const { return std::holds_alternative<Mdp>(model); }
  const Plant& plant() const { return std::get<Plant>(model); }
  const Mdp& mdp() const { return std::get<Mdp>(model); }
  int num_states() const;
  const std::vector<std::string>& state_names() const;
  const std::vector<std::string>& action_names() const;
};

// Built-in fixtures: "fig2-left", "fig2-right", "sec6-goal".
PlantFile builtin_plant(const std::string& name);
bool is_builtin_plant(const std::string& name);

// Loads a plant description from JSON text. Keys: states, initial, actions,
// transitions ([state, action, next] or [state, action, {next: prob}]),
// unsafe, reward ([state, action, value]), gamma. Any probabilistic row makes
// the whole model an MDP.
PlantFile parse_plant_json(const std::string& text);

// Resolves a builtin fixture name or reads the file at `path_or_name`.
PlantFile load_plant(const std::string& path_or_name);

// Policy file: state name -> action name plus verdict/value/gamma/penalty.
std::string policy_file_json(const PlantFile& pf, const SynthesisResult& result);

// Shaped rewards serialize to the reward-table format with a penalty key.
std::string shaped_reward_json(const ShapedReward& shaped,
                               const std::vector<std::string>& state_names,
                               const std::vector<std::string>& action_names);

// The history-dependent policy from the no-optimal-policy example: U for the
// first 2k steps, then S once, then U forever.
FunctionalDecider alternate_k_policy(int k, int s_action, int u_action, int num_actions);

}  // namespace rta
