#pragma once

#include <vector>

#include "rta/plant.hpp"

namespace rta {

// Largest safe inductive invariant for the safety controller: disjoint from
// the unsafe set and closed under delta(., S).
struct RecoverableSet {
  std::vector<bool> member;
  int iterations_to_fixpoint = 0;

  bool contains(int s) const {
    return s >= 0 && s < static_cast<int>(member.size()) && member[s];
  }
  int count() const;
};

// Greatest fixpoint R0 = Q \ B, R_{k+1} = { q in R_k : delta(q,S) in R_k }.
// Stabilises within |Q| sweeps.
RecoverableSet recoverable_set(const Plant& plant, const UnsafeSet& unsafe);

// P-lookahead policy: pi_P(q) = U iff delta(q, U) lies in P. The safe-set
// lookahead is the special case P = Q \ B.
StationaryPolicy lookahead_policy(const Plant& plant, const std::vector<bool>& check_set);

StationaryPolicy safe_set_lookahead_policy(const Plant& plant, const UnsafeSet& unsafe);

struct Proposition1Check {
  bool safe = false;     // is_safe_policy(pi_R)
  bool vacuous = false;  // q0 outside the largest recoverable set
};

// Self-test of the recoverable-set construction: builds the largest
// recoverable set R and checks that pi_R is safe whenever q0 is in R.
Proposition1Check verify_proposition1(const Plant& plant, const UnsafeSet& unsafe);

// Analytic recoverable-set reconstruction for the cruise-control scenario:
// positive iff a full-braking maneuver can match the leader speed before the
// gap shrinks to the collision radius. Positions/velocities are follower (x,
// v) versus leader (x_l, v_l).
double acc_recoverable_margin(double x, double v, double x_l, double v_l, double c,
                              double a_max);

}  // namespace rta
