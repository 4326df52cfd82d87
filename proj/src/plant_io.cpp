#include "rta/plant_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "rta/errors.hpp"

namespace rta {

using nlohmann::json;

int PlantFile::num_states() const {
  return is_mdp() ? mdp().num_states() : plant().num_states();
}

const std::vector<std::string>& PlantFile::state_names() const {
  return is_mdp() ? mdp().state_names : plant().state_names;
}

const std::vector<std::string>& PlantFile::action_names() const {
  return is_mdp() ? mdp().action_names : plant().action_names;
}

namespace {

// Three-state plants from the lookahead counterexamples. In both, S keeps the
// system at q0 from q0 and otherwise leads to the unsafe state qB; U moves
// q0 -> q1. They differ in U from q1: doom (left) versus return to q0 (right).
PlantFile fig2_plant(bool u_returns_from_q1) {
  Plant plant;
  plant.state_names = {"q0", "q1", "qB"};
  plant.action_names = {"S", "U"};
  plant.initial = 0;
  auto set = [&](int q, int a, int next) { plant.next[static_cast<size_t>(q) * 2 + a] = next; };
  plant.next.resize(6);
  set(0, 0, 0);
  set(0, 1, 1);
  set(1, 0, 2);
  set(1, 1, u_returns_from_q1 ? 0 : 2);
  set(2, 0, 2);
  set(2, 1, 2);

  PlantFile pf;
  pf.unsafe = UnsafeSet(3);
  pf.unsafe.add(2);
  pf.rewards.num_actions = 2;
  pf.rewards.gamma = 0.9;
  pf.rewards.r = {0, 1, 0, 1, 0, 1};  // reward 1 for every use of U
  pf.model = std::move(plant);
  return pf;
}

// Goal/reward plant from the discussion of hard reachability constraints:
// S: q0 -> qg, and back to q0 from qr and qg; U: q0 -> qr, and back to q0
// from qr and qg. No unsafe states. Reward 1 for every use of U, so the
// alternate-k policies earn 1/(1-gamma) - gamma^{2k}.
PlantFile sec6_plant() {
  Plant plant;
  plant.state_names = {"q0", "qg", "qr"};
  plant.action_names = {"S", "U"};
  plant.initial = 0;
  plant.next.resize(6);
  auto set = [&](int q, int a, int next) { plant.next[static_cast<size_t>(q) * 2 + a] = next; };
  set(0, 0, 1);
  set(0, 1, 2);
  set(1, 0, 0);
  set(1, 1, 0);
  set(2, 0, 0);
  set(2, 1, 0);

  PlantFile pf;
  pf.unsafe = UnsafeSet(3);
  pf.rewards.num_actions = 2;
  pf.rewards.gamma = 0.9;
  pf.rewards.r = {0, 1, 0, 1, 0, 1};
  pf.model = std::move(plant);
  return pf;
}

int lookup(const std::vector<std::string>& names, const std::string& name,
           const char* what) {
  for (size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  throw ConfigError(std::string("unknown ") + what + " name: " + name);
}

}  // namespace

bool is_builtin_plant(const std::string& name) {
  return name == "fig2-left" || name == "fig2-right" || name == "sec6-goal";
}

PlantFile builtin_plant(const std::string& name) {
  if (name == "fig2-left") return fig2_plant(false);
  if (name == "fig2-right") return fig2_plant(true);
  if (name == "sec6-goal") return sec6_plant();
  throw ConfigError("unknown builtin plant: " + name);
}

PlantFile parse_plant_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("plant file is not valid JSON: ") + e.what());
  }
  try {
    std::vector<std::string> states = doc.at("states").get<std::vector<std::string>>();
    std::vector<std::string> actions = doc.at("actions").get<std::vector<std::string>>();
    int initial = lookup(states, doc.at("initial").get<std::string>(), "state");
    const int num_actions = static_cast<int>(actions.size());

    bool probabilistic = false;
    for (const auto& row : doc.at("transitions")) {
      if (row.size() != 3) throw ConfigError("transition rows need 3 entries");
      if (row[2].is_object()) probabilistic = true;
    }

    UnsafeSet unsafe(static_cast<int>(states.size()));
    if (doc.contains("unsafe")) {
      for (const auto& name : doc["unsafe"]) {
        unsafe.add(lookup(states, name.get<std::string>(), "state"));
      }
    }

    RewardStructure rewards;
    rewards.num_actions = num_actions;
    rewards.gamma = doc.value("gamma", 0.9);
    rewards.r.assign(states.size() * num_actions, 0.0);
    if (doc.contains("reward")) {
      for (const auto& row : doc["reward"]) {
        if (row.size() != 3) throw ConfigError("reward rows need 3 entries");
        int s = lookup(states, row[0].get<std::string>(), "state");
        int a = lookup(actions, row[1].get<std::string>(), "action");
        rewards.r[static_cast<size_t>(s) * num_actions + a] = row[2].get<double>();
      }
    }

    PlantFile pf;
    pf.unsafe = unsafe;
    pf.rewards = rewards;

    if (!probabilistic) {
      Plant plant;
      plant.state_names = states;
      plant.action_names = actions;
      plant.initial = initial;
      plant.next.assign(states.size() * num_actions, -1);
      for (const auto& row : doc["transitions"]) {
        int s = lookup(states, row[0].get<std::string>(), "state");
        int a = lookup(actions, row[1].get<std::string>(), "action");
        plant.next[static_cast<size_t>(s) * num_actions + a] =
            lookup(states, row[2].get<std::string>(), "state");
      }
      plant.validate();
      pf.rewards.validate(plant.num_states());
      pf.model = std::move(plant);
    } else {
      Mdp mdp;
      mdp.state_names = states;
      mdp.action_names = actions;
      mdp.initial = initial;
      mdp.rows.assign(states.size() * num_actions, {});
      for (const auto& row : doc["transitions"]) {
        int s = lookup(states, row[0].get<std::string>(), "state");
        int a = lookup(actions, row[1].get<std::string>(), "action");
        auto& dist = mdp.rows[static_cast<size_t>(s) * num_actions + a];
        if (row[2].is_object()) {
          for (auto it = row[2].begin(); it != row[2].end(); ++it) {
            dist.push_back({lookup(states, it.key(), "state"), it.value().get<double>()});
          }
        } else {
          dist.push_back({lookup(states, row[2].get<std::string>(), "state"), 1.0});
        }
      }
      mdp.validate();
      pf.rewards.validate(mdp.num_states());
      pf.model = std::move(mdp);
    }
    return pf;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed plant file: ") + e.what());
  }
}

PlantFile load_plant(const std::string& path_or_name) {
  if (is_builtin_plant(path_or_name)) return builtin_plant(path_or_name);
  std::ifstream in(path_or_name);
  if (!in) throw ConfigError("cannot open plant file: " + path_or_name);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_plant_json(buffer.str());
}

std::string policy_file_json(const PlantFile& pf, const SynthesisResult& result) {
  json doc;
  json policy = json::object();
  const auto& states = pf.state_names();
  const auto& actions = pf.action_names();
  for (size_t s = 0; s < states.size(); ++s) {
    policy[states[s]] = actions[result.policy.action[s]];
  }
  doc["policy"] = policy;
  doc["verdict"] = to_string(result.verdict);
  doc["value"] = result.unshaped_value;
  doc["shaped_value"] = result.shaped_value;
  doc["gamma"] = pf.rewards.gamma;
  doc["penalty"] = result.penalty;
  doc["residual"] = result.residual;
  return doc.dump(2) + "\n";
}

std::string shaped_reward_json(const ShapedReward& shaped,
                               const std::vector<std::string>& state_names,
                               const std::vector<std::string>& action_names) {
  json doc;
  doc["gamma"] = shaped.gamma();
  doc["penalty"] = shaped.penalty;
  json rows = json::array();
  for (size_t s = 0; s < state_names.size(); ++s) {
    for (size_t a = 0; a < action_names.size(); ++a) {
      rows.push_back(json::array({state_names[s], action_names[a],
                                  shaped.at(static_cast<int>(s), static_cast<int>(a))}));
    }
  }
  doc["reward"] = rows;
  return doc.dump(2) + "\n";
}

FunctionalDecider alternate_k_policy(int k, int s_action, int u_action, int num_actions) {
  return FunctionalDecider(
      [k, s_action, u_action](const FiniteRun& run) {
        return run.length() == 2 * k ? s_action : u_action;
      },
      num_actions);
}

}  // namespace rta
