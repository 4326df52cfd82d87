#include "rta/lookahead.hpp"

#include <algorithm>

namespace rta {

int RecoverableSet::count() const {
  return static_cast<int>(std::count(member.begin(), member.end(), true));
}

RecoverableSet recoverable_set(const Plant& plant, const UnsafeSet& unsafe) {
  const int n = plant.num_states();
  const int s_action = plant.safe_action();
  RecoverableSet result;
  result.member.resize(n);
  for (int q = 0; q < n; ++q) result.member[q] = !unsafe.contains(q);

  std::vector<bool> next(n);
  while (true) {
    ++result.iterations_to_fixpoint;
    bool changed = false;
    for (int q = 0; q < n; ++q) {
      next[q] = result.member[q] && result.member[plant.step(q, s_action)];
      changed = changed || (next[q] != result.member[q]);
    }
    result.member.swap(next);
    if (!changed) break;
  }
  return result;
}

StationaryPolicy lookahead_policy(const Plant& plant, const std::vector<bool>& check_set) {
  const int s_action = plant.safe_action();
  const int u_action = plant.untrusted_action();
  StationaryPolicy policy;
  policy.action.resize(plant.num_states());
  for (int q = 0; q < plant.num_states(); ++q) {
    int u_next = plant.step(q, u_action);
    policy.action[q] = check_set[u_next] ? u_action : s_action;
  }
  return policy;
}

StationaryPolicy safe_set_lookahead_policy(const Plant& plant, const UnsafeSet& unsafe) {
  std::vector<bool> safe(plant.num_states());
  for (int q = 0; q < plant.num_states(); ++q) safe[q] = !unsafe.contains(q);
  return lookahead_policy(plant, safe);
}

Proposition1Check verify_proposition1(const Plant& plant, const UnsafeSet& unsafe) {
  RecoverableSet r = recoverable_set(plant, unsafe);
  Proposition1Check check;
  if (!r.contains(plant.initial)) {
    check.safe = true;
    check.vacuous = true;
    return check;
  }
  StationaryPolicy pi_r = lookahead_policy(plant, r.member);
  check.safe = is_safe_policy(plant, pi_r, unsafe);
  return check;
}

double acc_recoverable_margin(double x, double v, double x_l, double v_l, double c,
                              double a_max) {
  double gap = x_l - x;
  double closing = std::max(0.0, v - v_l);
  return gap - c - closing * closing / (2.0 * a_max);
}

}  // namespace rta
