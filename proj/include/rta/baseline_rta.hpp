#pragma once

#include <vector>

#include "rta/interval.hpp"
#include "rta/scenario.hpp"

namespace rta {

// Lookahead switching baselines. Both roll the untrusted controller forward
// from an estimate set around the measured state and fall back to S unless
// the whole lookahead stays inside the check set (the safe set, or the
// analytic recoverable set for Acc). Decisions are centralized: one action is
// applied to every agent.

// Samples initial states uniformly from the estimate box and simulates each
// forward `lookahead.horizon` control steps under U; returns U iff every
// sampled trajectory stays inside the check set at every sub-step.
int sim_rta_decide(const ScenarioConfig& cfg, const ScenarioState& state, uint64_t seed);

struct ReachResult {
  // Boxes at control-step boundaries, [period][agent]; entry 0 is the
  // initial estimate box.
  std::vector<std::vector<ReachBox>> period_boxes;
  // Boxes at every integrator sub-step, [substep][agent]; entry 0 initial.
  std::vector<std::vector<ReachBox>> substep_boxes;
  // Exact leader state aligned with substep_boxes.
  std::vector<StateVec> leader;
  bool exploded = false;  // width bound exceeded; callers must decide S
};

// Guaranteed over-approximation of all closed-loop trajectories under U from
// the initial boxes: natural interval extension of Euler sub-steps (dt/4 for
// tightness) plus a second-order remainder bound per step, so the boxes
// contain the true flow and in particular every RK4 rollout of the simulator.
ReachResult interval_reach(const ScenarioConfig& cfg, int start_step,
                           const std::vector<ReachBox>& initial, int periods);

// Runs interval_reach from the estimate box; returns U iff no box can touch
// an unsafe component (conservative: possible overlap counts as intersection)
// and, with the recoverable check set, every box satisfies the recoverable
// inequality at its worst corner.
int reach_rta_decide(const ScenarioConfig& cfg, const ScenarioState& state);

// Check-set membership of a rollout snapshot (used by SimRTA and tests).
bool snapshot_in_check_set(const ScenarioConfig& cfg, const Snapshot& snap);

// Conservative unsafe test for one agent's box against the unsafe components
// at the given leader state; `others` are the other agents' boxes.
bool box_possibly_unsafe(const ScenarioConfig& cfg, const StateVec& leader,
                         const std::vector<ReachBox>& boxes, int agent);

}  // namespace rta
