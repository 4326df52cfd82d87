#include "rta/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rta/errors.hpp"

namespace rta {

namespace {

constexpr long long kSweepCap = 10'000'000;

// Shared Bellman loop; `backup` computes r(s,a) + gamma * E[v(next)].
template <class Backup>
ValueFunction iterate(int num_states, int num_actions, double gamma, double tol,
                      Backup backup) {
  if (!(tol > 0.0)) throw PreconditionError("value_iteration: tol must be > 0");
  const double stop = tol * (1.0 - gamma) / (2.0 * gamma);
  ValueFunction vf;
  vf.v.assign(num_states, 0.0);
  vf.q.assign(static_cast<size_t>(num_states) * num_actions, 0.0);
  std::vector<double> next(num_states, 0.0);
  while (true) {
    ++vf.sweeps;
    double diff = 0.0;
    for (int s = 0; s < num_states; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < num_actions; ++a) {
        best = std::max(best, backup(s, a, vf.v));
      }
      next[s] = best;
      diff = std::max(diff, std::abs(next[s] - vf.v[s]));
    }
    vf.v.swap(next);
    vf.residual = diff;
    if (diff <= stop) break;
    if (vf.sweeps >= kSweepCap) {
      throw InternalError("value_iteration: sweep cap reached");
    }
  }
  for (int s = 0; s < num_states; ++s) {
    for (int a = 0; a < num_actions; ++a) {
      vf.q[static_cast<size_t>(s) * num_actions + a] = backup(s, a, vf.v);
    }
  }
  return vf;
}

// Greedy argmax with exact-tie preference for the untrusted action.
StationaryPolicy greedy(const ValueFunction& vf, int num_states, int num_actions,
                        std::optional<int> u_action) {
  StationaryPolicy policy;
  policy.action.resize(num_states);
  for (int s = 0; s < num_states; ++s) {
    int best = -1;
    double best_q = -std::numeric_limits<double>::infinity();
    auto consider = [&](int a) {
      double qa = vf.q[static_cast<size_t>(s) * num_actions + a];
      if (qa > best_q) {
        best_q = qa;
        best = a;
      }
    };
    if (u_action) consider(*u_action);
    for (int a = 0; a < num_actions; ++a) {
      if (u_action && a == *u_action) continue;
      consider(a);
    }
    policy.action[s] = best;
  }
  return policy;
}

std::optional<int> untrusted_index(const std::vector<std::string>& action_names) {
  for (size_t a = 0; a < action_names.size(); ++a) {
    if (action_names[a] == "U") return static_cast<int>(a);
  }
  return std::nullopt;
}

}  // namespace

ValueFunction value_iteration(const Plant& plant, std::span<const double> reward_table,
                              double gamma, double tol) {
  const int num_actions = plant.num_actions();
  return iterate(plant.num_states(), num_actions, gamma, tol,
                 [&](int s, int a, const std::vector<double>& v) {
                   return reward_table[static_cast<size_t>(s) * num_actions + a] +
                          gamma * v[plant.next[static_cast<size_t>(s) * num_actions + a]];
                 });
}

ValueFunction value_iteration(const Mdp& mdp, std::span<const double> reward_table,
                              double gamma, double tol) {
  const int num_actions = mdp.num_actions();
  return iterate(mdp.num_states(), num_actions, gamma, tol,
                 [&](int s, int a, const std::vector<double>& v) {
                   double exp_v = 0.0;
                   for (const auto& t : mdp.rows[static_cast<size_t>(s) * num_actions + a]) {
                     exp_v += t.prob * v[t.next];
                   }
                   return reward_table[static_cast<size_t>(s) * num_actions + a] +
                          gamma * exp_v;
                 });
}

ValueFunction value_iteration(const Plant& plant, const RewardStructure& rs, double tol) {
  return value_iteration(plant, rs.r, rs.gamma, tol);
}

ValueFunction value_iteration(const Plant& plant, const ShapedReward& shaped, double tol) {
  return value_iteration(plant, shaped.table(plant.num_states()), shaped.gamma(), tol);
}

ValueFunction value_iteration(const Mdp& mdp, const ShapedReward& shaped, double tol) {
  return value_iteration(mdp, shaped.table(mdp.num_states()), shaped.gamma(), tol);
}

StationaryPolicy extract_policy(const ValueFunction& vf, const Plant& plant) {
  return greedy(vf, plant.num_states(), plant.num_actions(),
                untrusted_index(plant.action_names));
}

StationaryPolicy extract_policy(const ValueFunction& vf, const Mdp& mdp) {
  return greedy(vf, mdp.num_states(), mdp.num_actions(),
                untrusted_index(mdp.action_names));
}

std::optional<BestSafePolicy> brute_force_best_safe(const Plant& plant,
                                                    const RewardStructure& rs,
                                                    const UnsafeSet& unsafe) {
  const int n = plant.num_states();
  const int num_actions = plant.num_actions();
  double count = std::pow(static_cast<double>(num_actions), n);
  if (count > 1e6) {
    throw PreconditionError("brute_force_best_safe: |A|^|Q| exceeds the 1e6 guard");
  }
  std::optional<BestSafePolicy> best;
  StationaryPolicy policy;
  policy.action.assign(n, 0);
  const long long total = static_cast<long long>(count);
  for (long long i = 0; i < total; ++i) {
    if (is_safe_policy(plant, policy, unsafe)) {
      double value = stationary_policy_value(plant, policy, rs);
      if (!best || value > best->value) best = BestSafePolicy{policy, value};
    }
    // next policy in mixed-radix order
    for (int s = 0; s < n; ++s) {
      if (++policy.action[s] < num_actions) break;
      policy.action[s] = 0;
    }
  }
  return best;
}

SynthesisResult synthesize_safe_optimal(const Plant& plant, const RewardStructure& rs,
                                        const UnsafeSet& unsafe) {
  rs.validate(plant.num_states());
  ShapedReward shaped =
      shape(rs, unsafe, plant.num_states(), &plant.state_names, &plant.action_names);
  std::vector<double> shaped_table = shaped.table(plant.num_states());
  ValueFunction vf = value_iteration(plant, shaped_table, rs.gamma, 1e-10);
  SynthesisResult result;
  result.policy = extract_policy(vf, plant);
  result.shaped_value = stationary_policy_value(plant, result.policy, shaped_table, rs.gamma);
  result.verdict = certify(result.shaped_value);
  result.unshaped_value = stationary_policy_value(plant, result.policy, rs);
  result.penalty = shaped.penalty;
  result.residual = vf.residual;
  return result;
}

double mdp_policy_value(const Mdp& mdp, const StationaryPolicy& policy,
                        std::span<const double> reward_table, double gamma) {
  const int n = mdp.num_states();
  const int num_actions = mdp.num_actions();
  // Dense (I - gamma P_pi) v = r_pi with partial pivoting; model sizes here
  // are tiny.
  std::vector<double> m(static_cast<size_t>(n) * (n + 1), 0.0);
  auto at = [&](int row, int col) -> double& { return m[static_cast<size_t>(row) * (n + 1) + col]; };
  for (int s = 0; s < n; ++s) {
    at(s, s) = 1.0;
    int a = policy.at(s);
    for (const auto& t : mdp.rows[static_cast<size_t>(s) * num_actions + a]) {
      at(s, t.next) -= gamma * t.prob;
    }
    at(s, n) = reward_table[static_cast<size_t>(s) * num_actions + a];
  }
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int row = col + 1; row < n; ++row) {
      if (std::abs(at(row, col)) > std::abs(at(pivot, col))) pivot = row;
    }
    if (std::abs(at(pivot, col)) < 1e-300) {
      throw InternalError("mdp_policy_value: singular system");
    }
    if (pivot != col) {
      for (int k = col; k <= n; ++k) std::swap(at(pivot, k), at(col, k));
    }
    for (int row = col + 1; row < n; ++row) {
      double factor = at(row, col) / at(col, col);
      if (factor == 0.0) continue;
      for (int k = col; k <= n; ++k) at(row, k) -= factor * at(col, k);
    }
  }
  std::vector<double> v(n, 0.0);
  for (int row = n - 1; row >= 0; --row) {
    double sum = at(row, n);
    for (int k = row + 1; k < n; ++k) sum -= at(row, k) * v[k];
    v[row] = sum / at(row, row);
  }
  return v[mdp.initial];
}

SynthesisResult synthesize_safe_optimal(const Mdp& mdp, const RewardStructure& rs,
                                        const UnsafeSet& unsafe,
                                        std::optional<double> min_path_prob) {
  rs.validate(mdp.num_states());
  double path_prob =
      min_path_prob.value_or(least_path_prob_bound(mdp, mdp.num_states()));
  ShapedReward shaped = shape_mdp(rs, unsafe, mdp.num_states(), path_prob);
  std::vector<double> shaped_table = shaped.table(mdp.num_states());
  ValueFunction vf = value_iteration(mdp, shaped_table, rs.gamma, 1e-10);
  SynthesisResult result;
  result.policy = extract_policy(vf, mdp);
  result.shaped_value = mdp_policy_value(mdp, result.policy, shaped_table, rs.gamma);
  result.verdict = certify(result.shaped_value);
  result.unshaped_value = mdp_policy_value(mdp, result.policy, rs.r, rs.gamma);
  result.penalty = shaped.penalty;
  result.residual = vf.residual;
  return result;
}

RandomPlant random_plant(SplitMix64& rng, int max_states, double gamma) {
  RandomPlant out;
  int n = 2 + static_cast<int>(rng.below(std::max(1, max_states - 1)));
  out.plant.action_names = {"S", "U"};
  out.plant.state_names.reserve(n);
  for (int s = 0; s < n; ++s) out.plant.state_names.push_back("q" + std::to_string(s));
  out.plant.initial = 0;
  out.plant.next.resize(static_cast<size_t>(n) * 2);
  out.rewards.num_actions = 2;
  out.rewards.gamma = gamma;
  out.rewards.r.resize(static_cast<size_t>(n) * 2);
  out.unsafe = UnsafeSet(n);
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < 2; ++a) {
      out.plant.next[static_cast<size_t>(s) * 2 + a] = static_cast<int>(rng.below(n));
      out.rewards.r[static_cast<size_t>(s) * 2 + a] = rng.below(2) ? 1.0 : 0.0;
    }
    if (rng.uniform01() < 0.25) out.unsafe.add(s);
  }
  return out;
}

}  // namespace rta
