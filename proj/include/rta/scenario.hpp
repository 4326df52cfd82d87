#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rta/controllers.hpp"
#include "rta/dynamics.hpp"
#include "rta/rng.hpp"

namespace rta {

enum class ScenarioKind { kAcc, kDubins, kDubinsO, kAir, kFleet };

// RTA switching actions for continuous scenarios.
inline constexpr int kActionS = 0;
inline constexpr int kActionU = 1;

struct LeaderParams {
  double speed = 10.0;
  double radius = 100.0;    // orbit semi-axis along x
  double radius_y = 0.0;    // second semi-axis; 0 means circular orbit
  double altitude = 300.0;  // Air only
  double x0 = 50.0;         // Acc line start
};

struct RewardSpec {
  enum Kind { kUntrusted, kZone };
  Kind kind = kUntrusted;
  double zone_radius = 5.0;  // kZone: ball radius around the U-mode reference
};

struct ObstacleBox {
  std::vector<double> mins;  // 2 entries (x,y) or 3 (x,y,z)
  std::vector<double> maxs;
};

enum class CheckSet { kSafeSet, kAccRecoverable };

struct LookaheadConfig {
  int horizon = 20;                 // control steps
  int samples = 10;                 // SimRTA sample count
  std::vector<double> half_widths;  // estimate-box half-widths per state dim
  CheckSet check_set = CheckSet::kSafeSet;
  double width_bound = 1e4;  // reach boxes wider than this decide S
};

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::kAcc;
  int variation = 1;
  Gains gains;
  LeaderParams leader;
  int episode_len = 150;  // T_max, decision steps
  double dt = 0.05;       // integrator sub-step (s)
  int control_period = 10;  // sub-steps per decision
  std::vector<ObstacleBox> obstacles;
  double inter_agent_radius = 6.0;  // Fleet pairwise clearance
  double avoid_offset = -12.0;      // Dubins+O safety-mode lateral offset (m)
  double fleet_s_scale = 1.5;       // Fleet safety references sit farther out
  // Per-agent initial offsets from the agent's U-mode reference, in the
  // reference frame (Acc: dx,dv; Dubins: along,lat,dpsi,dv; Air adds dz and
  // dgamma before dpsi... see offset_dim()).
  std::vector<std::vector<double>> follower_offsets;
  std::vector<double> init_half_widths;  // randomization range per offset dim
  double v_min = 0.0;
  double v_max = 30.0;
  RewardSpec reward;
  double gamma = 0.995;
  uint64_t seed = 1;
  std::vector<Quantizer::Dim> obs_dims;  // observation quantizer for training
  LookaheadConfig lookahead;

  Model follower_model() const;
  int num_agents() const { return kind == ScenarioKind::kFleet ? 4 : 1; }
  int offset_dim() const { return state_dim(follower_model()); }
  int obs_dim() const;
  double period_seconds() const { return dt * control_period; }
  // Shaped violation penalty with n = episode_len and unit max reward.
  double penalty() const;
  void validate() const;  // throws ConfigError naming the offending field
};

struct ScenarioState {
  int t = 0;
  StateVec leader{};
  std::vector<StateVec> followers;
  bool done = false;
  bool violation = false;
};

// Closed-form leader state at time t (exactly reproducible, no integration).
StateVec leader_state(const ScenarioConfig& cfg, double t);
double leader_omega(const ScenarioConfig& cfg, double t);

// Reference state tracked by an agent's controller in the given mode.
StateVec reference_point(const ScenarioConfig& cfg, const StateVec& leader, int mode,
                         int agent);

// Episode initialization at the configured offsets; throws ConfigError if an
// agent starts in violation.
ScenarioState reset(const ScenarioConfig& cfg);
// Adds uniform(-hw, hw) perturbations per offset dimension.
ScenarioState reset_randomized(const ScenarioConfig& cfg, SplitMix64& rng);

struct StepResult {
  double reward = 0.0;
  bool done = false;
};

// Advances one decision step: the leader moves along its path, every follower
// integrates one control period under the controller its action selects, and
// violations are checked at each integrator sub-step. Entering the unsafe set
// ends the episode with the shaped penalty as reward.
StepResult env_step(const ScenarioConfig& cfg, ScenarioState& state,
                    std::span<const int> actions);

// Signed distance from one agent to the nearest unsafe component (leader
// ball, obstacle boxes, ground plane for Air, other agents for Fleet).
// Negative iff in violation; the boundary counts as safe.
double agent_unsafe_distance(const ScenarioConfig& cfg, const StateVec& leader,
                             const std::vector<StateVec>& followers, int agent);
// Minimum over all agents.
double min_unsafe_distance(const ScenarioConfig& cfg, const ScenarioState& state);

// Distance to the leader (or to the closest other aircraft in Fleet).
double proximity_distance(const ScenarioConfig& cfg, const StateVec& leader,
                          const std::vector<StateVec>& followers, int agent);

// Scenario-relative observation for the tabular policy: position relative to
// the U-mode reference in its frame, relative speed, heading/pitch errors
// where the model has them, and the signed unsafe distance.
std::vector<double> observation(const ScenarioConfig& cfg, const StateVec& leader,
                                const std::vector<StateVec>& followers, int agent);

// Signed Euclidean distance from a point to an axis-aligned box: positive
// outside, negative penetration depth inside.
double box_signed_distance(std::span<const double> p, const ObstacleBox& box);

struct Snapshot {
  double time = 0.0;
  StateVec leader{};
  std::vector<StateVec> followers;
};

// Rolls every follower forward under the untrusted controller for the given
// number of control steps (leader propagated exactly), returning the state
// after every integrator sub-step; entry 0 is the initial state. Used by the
// lookahead deciders and the reach soundness oracle.
std::vector<Snapshot> rollout_under_u(const ScenarioConfig& cfg, int start_step,
                                      const std::vector<StateVec>& followers,
                                      int periods);

// Shipped fixtures: acc-var{1,2,3}, dubins-var{1,2,3}, dubins_o-var{1,2,3},
// air-var{1,2,3}, fleet-var1.
ScenarioConfig scenario_fixture(const std::string& name);
bool is_scenario_fixture(const std::string& name);
std::vector<std::string> scenario_fixture_names();

// JSON round-trip; load resolves fixture names first, then file paths.
ScenarioConfig parse_scenario_json(const std::string& text);
ScenarioConfig load_scenario(const std::string& path_or_name);
std::string scenario_json(const ScenarioConfig& cfg);

const char* to_string(ScenarioKind k);

}  // namespace rta
