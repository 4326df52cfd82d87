#include "rta/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "rta/errors.hpp"
#include "rta/shaping.hpp"

namespace rta {

using nlohmann::json;

namespace {

int position_dim(Model m) {
  switch (m) {
    case Model::kAcc: return 1;
    case Model::kDubins: return 2;
    case Model::kAir: return 3;
  }
  return 0;
}

int speed_index(Model m) {
  switch (m) {
    case Model::kAcc: return 1;
    case Model::kDubins: return 3;
    case Model::kAir: return 5;
  }
  return 0;
}

double planar_distance(const StateVec& a, const StateVec& b, int dims) {
  double sum = 0.0;
  for (int i = 0; i < dims; ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sum);
}

// Orbit parameterization shared by the Dubins/Air leaders: the path starts at
// the origin heading +x and turns counterclockwise. radius_y = 0 gives the
// circular orbit of the configured radius.
struct OrbitState {
  double x, y, psi, v, omega;
};

OrbitState orbit_at(const LeaderParams& p, double t) {
  double a = p.radius;
  double b = p.radius_y > 0.0 ? p.radius_y : p.radius;
  double w0 = p.speed / std::sqrt(a * b);
  double theta = w0 * t;
  double vx = a * w0 * std::cos(theta);
  double vy = b * w0 * std::sin(theta);
  double ax = -a * w0 * w0 * std::sin(theta);
  double ay = b * w0 * w0 * std::cos(theta);
  double speed = std::hypot(vx, vy);
  OrbitState s;
  s.x = a * std::sin(theta);
  s.y = b * (1.0 - std::cos(theta));
  s.psi = std::atan2(vy, vx);
  s.v = speed;
  s.omega = (vx * ay - vy * ax) / (speed * speed);
  return s;
}

// Fleet V-pattern offsets in the leader frame: two wingmen 2d behind at
// +-30 degrees, two more 4d behind at the same angles. The safety points
// widen the V laterally (the no-acceleration safety controller cannot drop
// back along-track, and scaling the whole ray makes inner agents cross the
// outer lanes).
void fleet_local_offset(const ScenarioConfig& cfg, int agent, double lateral_scale,
                        double& along, double& lateral) {
  double len = (agent < 2 ? 2.0 : 4.0) * cfg.gains.d;
  double side = (agent % 2 == 0) ? 1.0 : -1.0;
  along = -len * std::cos(M_PI / 6.0);
  lateral = side * len * std::sin(M_PI / 6.0) * lateral_scale;
}

StateVec with_frame_offset(Model model, const StateVec& ref, std::span<const double> off) {
  StateVec out = ref;
  switch (model) {
    case Model::kAcc:
      out[0] += off[0];
      out[1] += off[1];
      break;
    case Model::kDubins: {
      double c = std::cos(ref[2]), s = std::sin(ref[2]);
      out[0] += c * off[0] - s * off[1];
      out[1] += s * off[0] + c * off[1];
      out[2] = wrap_angle(ref[2] + off[2]);
      out[3] += off[3];
      break;
    }
    case Model::kAir: {
      double c = std::cos(ref[3]), s = std::sin(ref[3]);
      out[0] += c * off[0] - s * off[1];
      out[1] += s * off[0] + c * off[1];
      out[2] += off[2];
      out[3] = wrap_angle(ref[3] + off[3]);
      out[4] = wrap_angle(ref[4] + off[4]);
      out[5] += off[5];
      break;
    }
  }
  return out;
}

ControlInput control_for(const ScenarioConfig& cfg, const StateVec& leader,
                         const StateVec& follower, int agent, int action, double t) {
  StateVec ref = reference_point(cfg, leader, action, agent);
  switch (cfg.follower_model()) {
    case Model::kAcc:
      return action == kActionU ? acc_untrusted(to_acc(follower), to_acc(leader), cfg.gains)
                                : acc_safety(to_acc(follower), to_acc(leader), cfg.gains);
    case Model::kDubins:
      return dubins_tracking(to_dubins(follower), to_dubins(ref), leader_omega(cfg, t),
                             cfg.gains, action == kActionU);
    case Model::kAir:
      return air_tracking(to_air(follower), to_air(ref), leader_omega(cfg, t), cfg.gains,
                          action == kActionS);
  }
  return {};
}

void clamp_speed(const ScenarioConfig& cfg, StateVec& s) {
  int vi = speed_index(cfg.follower_model());
  s[vi] = std::clamp(s[vi], cfg.v_min, cfg.v_max);
}

}  // namespace

Model ScenarioConfig::follower_model() const {
  switch (kind) {
    case ScenarioKind::kAcc: return Model::kAcc;
    case ScenarioKind::kAir: return Model::kAir;
    default: return Model::kDubins;
  }
}

int ScenarioConfig::obs_dim() const {
  switch (follower_model()) {
    case Model::kAcc: return 3;
    case Model::kDubins: return 5;
    case Model::kAir: return 7;
  }
  return 0;
}

double ScenarioConfig::penalty() const {
  RewardStructure unit;
  unit.num_actions = 1;
  unit.gamma = gamma;
  unit.r = {1.0};
  return shape(unit, UnsafeSet(1), episode_len).penalty;
}

StateVec leader_state(const ScenarioConfig& cfg, double t) {
  StateVec out{};
  switch (cfg.kind) {
    case ScenarioKind::kAcc:
      out[0] = cfg.leader.x0 + cfg.leader.speed * t;
      out[1] = cfg.leader.speed;
      break;
    case ScenarioKind::kAir: {
      OrbitState s = orbit_at(cfg.leader, t);
      out = {s.x, s.y, cfg.leader.altitude, s.psi, 0.0, s.v};
      break;
    }
    default: {
      OrbitState s = orbit_at(cfg.leader, t);
      out = {s.x, s.y, s.psi, s.v, 0, 0};
      break;
    }
  }
  return out;
}

double leader_omega(const ScenarioConfig& cfg, double t) {
  if (cfg.kind == ScenarioKind::kAcc) return 0.0;
  return orbit_at(cfg.leader, t).omega;
}

StateVec reference_point(const ScenarioConfig& cfg, const StateVec& leader, int mode,
                         int agent) {
  const Gains& g = cfg.gains;
  switch (cfg.kind) {
    case ScenarioKind::kAcc: {
      StateVec ref{};
      ref[0] = leader[0] - g.d;
      ref[1] = leader[1];
      return ref;
    }
    case ScenarioKind::kAir: {
      StateVec ref = leader;
      ref[0] -= g.d * std::cos(leader[3]);
      ref[1] -= g.d * std::sin(leader[3]);
      if (mode == kActionU) ref[2] -= g.delta_z;
      return ref;
    }
    case ScenarioKind::kFleet: {
      double along, lateral;
      double scale = mode == kActionS ? cfg.fleet_s_scale : 1.0;
      fleet_local_offset(cfg, agent, scale, along, lateral);
      double c = std::cos(leader[2]), s = std::sin(leader[2]);
      StateVec ref = leader;
      ref[0] += c * along - s * lateral;
      ref[1] += s * along + c * lateral;
      return ref;
    }
    default: {  // Dubins and Dubins+O
      StateVec ref = leader;
      ref[0] -= g.d * std::cos(leader[2]);
      ref[1] -= g.d * std::sin(leader[2]);
      if (cfg.kind == ScenarioKind::kDubinsO && mode == kActionS) {
        // The avoidance reference sits laterally offset from the nominal one.
        ref[0] += cfg.avoid_offset * -std::sin(leader[2]);
        ref[1] += cfg.avoid_offset * std::cos(leader[2]);
      }
      return ref;
    }
  }
}

double box_signed_distance(std::span<const double> p, const ObstacleBox& box) {
  double outside_sq = 0.0;
  double inside = std::numeric_limits<double>::infinity();
  bool is_inside = true;
  for (size_t i = 0; i < box.mins.size(); ++i) {
    if (p[i] < box.mins[i]) {
      outside_sq += (box.mins[i] - p[i]) * (box.mins[i] - p[i]);
      is_inside = false;
    } else if (p[i] > box.maxs[i]) {
      outside_sq += (p[i] - box.maxs[i]) * (p[i] - box.maxs[i]);
      is_inside = false;
    } else {
      inside = std::min(inside, std::min(p[i] - box.mins[i], box.maxs[i] - p[i]));
    }
  }
  return is_inside ? -inside : std::sqrt(outside_sq);
}

double agent_unsafe_distance(const ScenarioConfig& cfg, const StateVec& leader,
                             const std::vector<StateVec>& followers, int agent) {
  const Model model = cfg.follower_model();
  const int pos_dims = position_dim(model);
  const StateVec& q = followers[agent];

  double min_dist = planar_distance(q, leader, pos_dims) - cfg.gains.c;
  for (const auto& box : cfg.obstacles) {
    min_dist = std::min(min_dist, box_signed_distance(std::span(q.data(), box.mins.size()), box));
  }
  if (model == Model::kAir) {
    min_dist = std::min(min_dist, q[2]);  // ground plane z < 0 is unsafe
  }
  if (cfg.kind == ScenarioKind::kFleet) {
    for (size_t other = 0; other < followers.size(); ++other) {
      if (static_cast<int>(other) == agent) continue;
      min_dist = std::min(min_dist, planar_distance(q, followers[other], pos_dims) -
                                        cfg.inter_agent_radius);
    }
  }
  return min_dist;
}

double min_unsafe_distance(const ScenarioConfig& cfg, const ScenarioState& state) {
  double m = std::numeric_limits<double>::infinity();
  for (int agent = 0; agent < cfg.num_agents(); ++agent) {
    m = std::min(m, agent_unsafe_distance(cfg, state.leader, state.followers, agent));
  }
  return m;
}

double proximity_distance(const ScenarioConfig& cfg, const StateVec& leader,
                          const std::vector<StateVec>& followers, int agent) {
  const int pos_dims = position_dim(cfg.follower_model());
  double dist = planar_distance(followers[agent], leader, pos_dims);
  if (cfg.kind == ScenarioKind::kFleet) {
    for (size_t other = 0; other < followers.size(); ++other) {
      if (static_cast<int>(other) == agent) continue;
      dist = std::min(dist, planar_distance(followers[agent], followers[other], pos_dims));
    }
  }
  return dist;
}

std::vector<double> observation(const ScenarioConfig& cfg, const StateVec& leader,
                                const std::vector<StateVec>& followers, int agent) {
  StateVec ref = reference_point(cfg, leader, kActionU, agent);
  const StateVec& q = followers[agent];
  double sd = agent_unsafe_distance(cfg, leader, followers, agent);
  switch (cfg.follower_model()) {
    case Model::kAcc:
      return {q[0] - ref[0], q[1] - ref[1], sd};
    case Model::kDubins: {
      double c = std::cos(ref[2]), s = std::sin(ref[2]);
      double dx = q[0] - ref[0], dy = q[1] - ref[1];
      return {c * dx + s * dy, -s * dx + c * dy, wrap_angle(q[2] - ref[2]), q[3] - ref[3],
              sd};
    }
    case Model::kAir: {
      double c = std::cos(ref[3]), s = std::sin(ref[3]);
      double dx = q[0] - ref[0], dy = q[1] - ref[1];
      return {c * dx + s * dy,          -s * dx + c * dy, q[2] - ref[2],
              wrap_angle(q[3] - ref[3]), wrap_angle(q[4] - ref[4]), q[5] - ref[5],
              sd};
    }
  }
  return {};
}

namespace {

ScenarioState reset_with_offsets(const ScenarioConfig& cfg,
                                 const std::vector<std::vector<double>>& offsets) {
  ScenarioState state;
  state.leader = leader_state(cfg, 0.0);
  state.followers.resize(cfg.num_agents());
  for (int agent = 0; agent < cfg.num_agents(); ++agent) {
    StateVec ref = reference_point(cfg, state.leader, kActionU, agent);
    state.followers[agent] = with_frame_offset(cfg.follower_model(), ref, offsets[agent]);
    clamp_speed(cfg, state.followers[agent]);
  }
  for (int agent = 0; agent < cfg.num_agents(); ++agent) {
    if (agent_unsafe_distance(cfg, state.leader, state.followers, agent) < 0.0) {
      throw ConfigError("followers: agent " + std::to_string(agent) +
                        " starts inside the unsafe set");
    }
  }
  return state;
}

}  // namespace

ScenarioState reset(const ScenarioConfig& cfg) {
  return reset_with_offsets(cfg, cfg.follower_offsets);
}

ScenarioState reset_randomized(const ScenarioConfig& cfg, SplitMix64& rng) {
  std::vector<std::vector<double>> offsets = cfg.follower_offsets;
  for (auto& agent_off : offsets) {
    for (size_t i = 0; i < agent_off.size(); ++i) {
      double hw = i < cfg.init_half_widths.size() ? cfg.init_half_widths[i] : 0.0;
      agent_off[i] += rng.uniform(-hw, hw);
    }
  }
  return reset_with_offsets(cfg, offsets);
}

StepResult env_step(const ScenarioConfig& cfg, ScenarioState& state,
                    std::span<const int> actions) {
  if (state.done) throw PreconditionError("env_step: episode already done");
  if (static_cast<int>(actions.size()) != cfg.num_agents()) {
    throw PreconditionError("env_step: one action per agent required");
  }
  const Model model = cfg.follower_model();
  const double t0 = state.t * cfg.period_seconds();

  std::vector<ControlInput> controls(cfg.num_agents());
  for (int agent = 0; agent < cfg.num_agents(); ++agent) {
    controls[agent] =
        control_for(cfg, state.leader, state.followers[agent], agent, actions[agent], t0);
  }

  bool violated = false;
  for (int k = 0; k < cfg.control_period && !violated; ++k) {
    double tk = t0 + (k + 1) * cfg.dt;
    for (int agent = 0; agent < cfg.num_agents(); ++agent) {
      state.followers[agent] = integrate(model, state.followers[agent], controls[agent],
                                         cfg.dt, 1);
      clamp_speed(cfg, state.followers[agent]);
    }
    state.leader = leader_state(cfg, tk);
    for (int agent = 0; agent < cfg.num_agents() && !violated; ++agent) {
      violated = agent_unsafe_distance(cfg, state.leader, state.followers, agent) < 0.0;
    }
  }

  state.t += 1;
  StepResult result;
  if (violated) {
    state.violation = true;
    state.done = true;
    result.reward = cfg.penalty();
    result.done = true;
    return result;
  }

  double reward = 0.0;
  for (int agent = 0; agent < cfg.num_agents(); ++agent) {
    if (cfg.reward.kind == RewardSpec::kUntrusted) {
      reward += actions[agent] == kActionU ? 1.0 : 0.0;
    } else {
      StateVec ref = reference_point(cfg, state.leader, kActionU, agent);
      double dist = planar_distance(state.followers[agent], ref, position_dim(model));
      reward += dist <= cfg.reward.zone_radius ? 1.0 : 0.0;
    }
  }
  result.reward = reward / cfg.num_agents();
  state.done = state.t >= cfg.episode_len;
  result.done = state.done;
  return result;
}

std::vector<Snapshot> rollout_under_u(const ScenarioConfig& cfg, int start_step,
                                      const std::vector<StateVec>& followers,
                                      int periods) {
  const Model model = cfg.follower_model();
  std::vector<Snapshot> out;
  out.reserve(static_cast<size_t>(periods) * cfg.control_period + 1);
  double t = start_step * cfg.period_seconds();
  Snapshot snap{t, leader_state(cfg, t), followers};
  out.push_back(snap);
  for (int p = 0; p < periods; ++p) {
    std::vector<ControlInput> controls(cfg.num_agents());
    for (int agent = 0; agent < cfg.num_agents(); ++agent) {
      controls[agent] = control_for(cfg, snap.leader, snap.followers[agent], agent,
                                    kActionU, snap.time);
    }
    for (int k = 0; k < cfg.control_period; ++k) {
      snap.time += cfg.dt;
      for (int agent = 0; agent < cfg.num_agents(); ++agent) {
        snap.followers[agent] =
            integrate(model, snap.followers[agent], controls[agent], cfg.dt, 1);
        clamp_speed(cfg, snap.followers[agent]);
      }
      snap.leader = leader_state(cfg, snap.time);
      out.push_back(snap);
    }
  }
  return out;
}

void ScenarioConfig::validate() const {
  gains.validate();
  if (episode_len < 1) throw ConfigError("episode_len: must be >= 1");
  if (!(dt > 0.0)) throw ConfigError("dt: must be > 0");
  if (control_period < 1) throw ConfigError("control_period: must be >= 1");
  if (!(v_min < v_max)) throw ConfigError("v_min/v_max: must satisfy v_min < v_max");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma: must lie in (0,1)");
  if (!(leader.speed > 0.0)) throw ConfigError("leader.speed: must be > 0");
  if (kind != ScenarioKind::kAcc && !(leader.radius > 0.0)) {
    throw ConfigError("leader.radius: must be > 0");
  }
  if (static_cast<int>(follower_offsets.size()) != num_agents()) {
    throw ConfigError("followers: expected " + std::to_string(num_agents()) +
                      " offset entries");
  }
  for (const auto& off : follower_offsets) {
    if (static_cast<int>(off.size()) != offset_dim()) {
      throw ConfigError("followers: offsets need " + std::to_string(offset_dim()) +
                        " entries");
    }
  }
  if (!init_half_widths.empty() &&
      static_cast<int>(init_half_widths.size()) != offset_dim()) {
    throw ConfigError("init_half_widths: dimension mismatch");
  }
  for (double hw : init_half_widths) {
    if (hw < 0.0) throw ConfigError("init_half_widths: entries must be >= 0");
  }
  if (reward.kind == RewardSpec::kZone && !(reward.zone_radius > 0.0)) {
    throw ConfigError("reward.zone_radius: must be > 0");
  }
  const int obs_box_dim = position_dim(follower_model()) > 1 ? position_dim(follower_model()) : 0;
  if (!obstacles.empty() && obs_box_dim == 0) {
    throw ConfigError("obstacles: not supported for this scenario");
  }
  for (const auto& box : obstacles) {
    if (static_cast<int>(box.mins.size()) != obs_box_dim ||
        static_cast<int>(box.maxs.size()) != obs_box_dim) {
      throw ConfigError("obstacles: boxes need " + std::to_string(obs_box_dim) +
                        " coordinates");
    }
    for (size_t i = 0; i < box.mins.size(); ++i) {
      if (!(box.mins[i] <= box.maxs[i])) {
        throw ConfigError("obstacles: min must not exceed max");
      }
    }
    for (int step = 0; step <= episode_len; ++step) {
      StateVec lead = leader_state(*this, step * period_seconds());
      if (box_signed_distance(std::span(lead.data(), box.mins.size()), box) <= 0.0) {
        throw ConfigError("obstacles: box intersects the leader path");
      }
    }
  }
  if (!obs_dims.empty()) {
    if (static_cast<int>(obs_dims.size()) != obs_dim()) {
      throw ConfigError("observation.dims: expected " + std::to_string(obs_dim()) +
                        " dimensions");
    }
    Quantizer q{obs_dims};
    q.validate();
  }
  if (lookahead.horizon < 1) throw ConfigError("lookahead.horizon: must be >= 1");
  if (lookahead.samples < 1) throw ConfigError("lookahead.samples: must be >= 1");
  if (!lookahead.half_widths.empty() &&
      static_cast<int>(lookahead.half_widths.size()) != state_dim(follower_model())) {
    throw ConfigError("lookahead.half_widths: dimension mismatch");
  }
  for (double hw : lookahead.half_widths) {
    if (hw < 0.0) throw ConfigError("lookahead.half_widths: entries must be >= 0");
  }
  if (lookahead.check_set == CheckSet::kAccRecoverable && kind != ScenarioKind::kAcc) {
    throw ConfigError("lookahead.check_set: recoverable check requires the acc scenario");
  }
}

// --- fixtures ---

namespace {

ScenarioConfig base_config(ScenarioKind kind) {
  ScenarioConfig cfg;
  cfg.kind = kind;
  switch (kind) {
    case ScenarioKind::kAcc:
      cfg.gains = Gains{1.0, 5.0, 0.5, 1.0, 3.0, 0.5, 0.3, 10.0, 0.0, 4.0};
      cfg.leader = {10.0, 0.0, 0.0, 0.0, 50.0};
      cfg.episode_len = 150;
      cfg.dt = 0.02;
      cfg.control_period = 10;
      cfg.v_min = -20.0;
      cfg.v_max = 40.0;
      cfg.follower_offsets = {{-60.0, 6.0}};
      cfg.init_half_widths = {10.0, 3.0};
      cfg.obs_dims = {{-85.0, 10.0, 40}, {-25.0, 25.0, 40}, {-5.0, 80.0, 1}};
      cfg.lookahead.horizon = 10;
      cfg.lookahead.half_widths = {0.5, 0.25};
      break;
    case ScenarioKind::kDubins:
    case ScenarioKind::kDubinsO:
      cfg.gains = Gains{0.05, 1.0, 0.5, 1.0, 2.0, 0.5, 0.3, 10.0, 0.0, 4.0};
      cfg.leader = {10.0, 100.0, 0.0, 0.0, 0.0};
      cfg.episode_len = 400;
      cfg.dt = 0.02;
      cfg.control_period = 10;
      cfg.v_min = 0.1;
      cfg.v_max = 20.0;
      cfg.follower_offsets = {{-15.0, -3.0, 0.1, -2.0}};
      cfg.init_half_widths = {3.0, 3.0, 0.1, 1.0};
      cfg.obs_dims = {{-40.0, 20.0, 11},
                      {-30.0, 30.0, 11},
                      {-M_PI, M_PI, 9},
                      {-8.0, 8.0, 7},
                      {-5.0, 60.0, 3}};
      cfg.lookahead.half_widths = {0.5, 0.5, 0.02, 0.25};
      if (kind == ScenarioKind::kDubinsO) {
        // Box poking ~3 m into the follower's tracking ring (radius
        // sqrt(R^2 + d^2) ~ 103.1) while clearing the leader circle.
        cfg.gains.d = 25.0;
        cfg.obstacles = {{{100.1, 93.0}, {106.0, 107.0}}};
        cfg.avoid_offset = -12.0;
      }
      break;
    case ScenarioKind::kAir:
      cfg.gains = Gains{0.05, 1.0, 0.5, 1.0, 2.0, 0.5, 0.3, 15.0, 10.0, 5.0};
      cfg.leader = {15.0, 200.0, 0.0, 300.0, 0.0};
      cfg.episode_len = 400;
      cfg.dt = 0.02;
      cfg.control_period = 10;
      cfg.v_min = 1.0;
      cfg.v_max = 30.0;
      cfg.follower_offsets = {{-20.0, -5.0, -15.0, 0.05, 0.02, -2.0}};
      cfg.init_half_widths = {5.0, 5.0, 5.0, 0.1, 0.05, 1.0};
      cfg.obs_dims = {{-50.0, 20.0, 7}, {-40.0, 40.0, 7},  {-40.0, 40.0, 5},
                      {-M_PI, M_PI, 7}, {-0.8, 0.8, 3},    {-8.0, 8.0, 5},
                      {-5.0, 100.0, 3}};
      cfg.obstacles = {{{150.0, -40.0, 0.0}, {190.0, 10.0, 350.0}}};
      cfg.lookahead.half_widths = {1.0, 1.0, 1.0, 0.05, 0.02, 0.5};
      break;
    case ScenarioKind::kFleet:
      cfg.gains = Gains{0.05, 1.0, 0.5, 1.0, 2.0, 0.5, 0.3, 10.0, 0.0, 4.0};
      cfg.leader = {10.0, 150.0, 0.0, 0.0, 0.0};
      cfg.episode_len = 400;
      cfg.dt = 0.02;
      cfg.control_period = 10;
      cfg.v_min = 0.1;
      cfg.v_max = 20.0;
      cfg.inter_agent_radius = 6.0;
      cfg.follower_offsets = {{0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}};
      cfg.init_half_widths = {2.0, 2.0, 0.05, 0.5};
      cfg.obs_dims = {{-40.0, 20.0, 11},
                      {-30.0, 30.0, 11},
                      {-M_PI, M_PI, 9},
                      {-8.0, 8.0, 7},
                      {-5.0, 60.0, 3}};
      cfg.obstacles = {{{250.0, 140.0}, {260.0, 160.0}}};
      cfg.lookahead.half_widths = {0.5, 0.5, 0.02, 0.25};
      break;
  }
  return cfg;
}

void apply_variation(ScenarioConfig& cfg, int variation) {
  cfg.variation = variation;
  if (variation == 1) return;
  switch (cfg.kind) {
    case ScenarioKind::kAcc:
      cfg.follower_offsets = variation == 2 ? std::vector<std::vector<double>>{{-35.0, 10.0}}
                                            : std::vector<std::vector<double>>{{-15.0, -5.0}};
      break;
    case ScenarioKind::kDubins:
    case ScenarioKind::kDubinsO:
      cfg.follower_offsets = variation == 2
                                 ? std::vector<std::vector<double>>{{-25.0, 5.0, -0.2, 3.0}}
                                 : std::vector<std::vector<double>>{{-8.0, 8.0, 0.3, 0.0}};
      break;
    case ScenarioKind::kAir:
      cfg.follower_offsets =
          variation == 2
              ? std::vector<std::vector<double>>{{-30.0, 10.0, 10.0, -0.1, 0.0, 3.0}}
              : std::vector<std::vector<double>>{{-12.0, -10.0, -25.0, 0.15, -0.05, 0.0}};
      break;
    case ScenarioKind::kFleet:
      throw ConfigError("fleet: only variation 1 is shipped");
  }
}

}  // namespace

std::vector<std::string> scenario_fixture_names() {
  return {"acc-var1",      "acc-var2",      "acc-var3",    "dubins-var1",
          "dubins-var2",   "dubins-var3",   "dubins_o-var1", "dubins_o-var2",
          "dubins_o-var3", "air-var1",      "air-var2",    "air-var3",
          "fleet-var1"};
}

bool is_scenario_fixture(const std::string& name) {
  auto names = scenario_fixture_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

ScenarioConfig scenario_fixture(const std::string& name) {
  auto pos = name.rfind("-var");
  if (pos == std::string::npos) throw ConfigError("unknown scenario fixture: " + name);
  std::string base = name.substr(0, pos);
  int variation = 0;
  try {
    variation = std::stoi(name.substr(pos + 4));
  } catch (const std::exception&) {
    throw ConfigError("unknown scenario fixture: " + name);
  }
  ScenarioKind kind;
  if (base == "acc") kind = ScenarioKind::kAcc;
  else if (base == "dubins") kind = ScenarioKind::kDubins;
  else if (base == "dubins_o") kind = ScenarioKind::kDubinsO;
  else if (base == "air") kind = ScenarioKind::kAir;
  else if (base == "fleet") kind = ScenarioKind::kFleet;
  else throw ConfigError("unknown scenario fixture: " + name);
  if (variation < 1 || variation > 3 || (kind == ScenarioKind::kFleet && variation != 1)) {
    throw ConfigError("unknown scenario fixture: " + name);
  }
  ScenarioConfig cfg = base_config(kind);
  apply_variation(cfg, variation);
  cfg.validate();
  return cfg;
}

// --- JSON ---

namespace {

ScenarioKind kind_from_string(const std::string& s) {
  if (s == "acc") return ScenarioKind::kAcc;
  if (s == "dubins") return ScenarioKind::kDubins;
  if (s == "dubins_o") return ScenarioKind::kDubinsO;
  if (s == "air") return ScenarioKind::kAir;
  if (s == "fleet") return ScenarioKind::kFleet;
  throw ConfigError("scenario: unknown kind " + s);
}

}  // namespace

const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::kAcc: return "acc";
    case ScenarioKind::kDubins: return "dubins";
    case ScenarioKind::kDubinsO: return "dubins_o";
    case ScenarioKind::kAir: return "air";
    case ScenarioKind::kFleet: return "fleet";
  }
  return "?";
}

ScenarioConfig parse_scenario_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario config is not valid JSON: ") + e.what());
  }
  try {
    ScenarioKind kind = kind_from_string(doc.at("scenario").get<std::string>());
    ScenarioConfig cfg = base_config(kind);
    if (doc.contains("variation")) apply_variation(cfg, doc["variation"].get<int>());

    if (doc.contains("gains")) {
      const auto& g = doc["gains"];
      cfg.gains.k1 = g.value("k1", cfg.gains.k1);
      cfg.gains.k2 = g.value("k2", cfg.gains.k2);
      cfg.gains.k3 = g.value("k3", cfg.gains.k3);
      cfg.gains.k4 = g.value("k4", cfg.gains.k4);
      cfg.gains.a_max = g.value("a_max", cfg.gains.a_max);
      cfg.gains.omega_max = g.value("omega_max", cfg.gains.omega_max);
      cfg.gains.gamma_rate_max = g.value("gamma_rate_max", cfg.gains.gamma_rate_max);
      cfg.gains.d = g.value("d", cfg.gains.d);
      cfg.gains.delta_z = g.value("delta_z", cfg.gains.delta_z);
      cfg.gains.c = g.value("c", cfg.gains.c);
    }
    if (doc.contains("leader")) {
      const auto& l = doc["leader"];
      cfg.leader.speed = l.value("speed", cfg.leader.speed);
      cfg.leader.radius = l.value("radius", cfg.leader.radius);
      cfg.leader.radius_y = l.value("radius_y", cfg.leader.radius_y);
      cfg.leader.altitude = l.value("altitude", cfg.leader.altitude);
      cfg.leader.x0 = l.value("x0", cfg.leader.x0);
    }
    cfg.episode_len = doc.value("episode_len", cfg.episode_len);
    cfg.dt = doc.value("dt", cfg.dt);
    cfg.control_period = doc.value("control_period", cfg.control_period);
    cfg.inter_agent_radius = doc.value("inter_agent_radius", cfg.inter_agent_radius);
    cfg.avoid_offset = doc.value("avoid_offset", cfg.avoid_offset);
    cfg.fleet_s_scale = doc.value("fleet_s_scale", cfg.fleet_s_scale);
    cfg.v_min = doc.value("v_min", cfg.v_min);
    cfg.v_max = doc.value("v_max", cfg.v_max);
    cfg.gamma = doc.value("gamma", cfg.gamma);
    cfg.seed = doc.value("seed", cfg.seed);
    if (doc.contains("obstacles")) {
      cfg.obstacles.clear();
      for (const auto& b : doc["obstacles"]) {
        if (b.is_array()) {  // [[min...], [max...]] shorthand
          if (b.size() != 2) throw ConfigError("obstacles: expected [min, max] pairs");
          cfg.obstacles.push_back(
              {b[0].get<std::vector<double>>(), b[1].get<std::vector<double>>()});
        } else {
          cfg.obstacles.push_back({b.at("min").get<std::vector<double>>(),
                                   b.at("max").get<std::vector<double>>()});
        }
      }
    }
    if (doc.contains("followers")) {
      cfg.follower_offsets = doc["followers"].get<std::vector<std::vector<double>>>();
    }
    if (doc.contains("init_half_widths")) {
      cfg.init_half_widths = doc["init_half_widths"].get<std::vector<double>>();
    }
    if (doc.contains("reward")) {
      const auto& r = doc["reward"];
      std::string kind_str = r.value("kind", "r_u");
      if (kind_str == "r_u") cfg.reward.kind = RewardSpec::kUntrusted;
      else if (kind_str == "r_zone") cfg.reward.kind = RewardSpec::kZone;
      else throw ConfigError("reward.kind: must be r_u or r_zone");
      cfg.reward.zone_radius = r.value("zone_radius", cfg.gains.d / 2.0);
    }
    if (doc.contains("observation")) {
      cfg.obs_dims.clear();
      for (const auto& d : doc["observation"].at("dims")) {
        cfg.obs_dims.push_back(
            {d.at("lo").get<double>(), d.at("hi").get<double>(), d.at("cells").get<int>()});
      }
    }
    if (doc.contains("lookahead")) {
      const auto& l = doc["lookahead"];
      cfg.lookahead.horizon = l.value("horizon", cfg.lookahead.horizon);
      cfg.lookahead.samples = l.value("samples", cfg.lookahead.samples);
      if (l.contains("half_widths")) {
        cfg.lookahead.half_widths = l["half_widths"].get<std::vector<double>>();
      }
      std::string cs = l.value("check_set", "safe");
      if (cs == "safe") cfg.lookahead.check_set = CheckSet::kSafeSet;
      else if (cs == "recoverable") cfg.lookahead.check_set = CheckSet::kAccRecoverable;
      else throw ConfigError("lookahead.check_set: must be safe or recoverable");
      cfg.lookahead.width_bound = l.value("width_bound", cfg.lookahead.width_bound);
    }
    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed scenario config: ") + e.what());
  }
}

ScenarioConfig load_scenario(const std::string& path_or_name) {
  if (is_scenario_fixture(path_or_name)) return scenario_fixture(path_or_name);
  std::ifstream in(path_or_name);
  if (!in) throw ConfigError("cannot open scenario config: " + path_or_name);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_json(buffer.str());
}

std::string scenario_json(const ScenarioConfig& cfg) {
  json doc;
  doc["scenario"] = to_string(cfg.kind);
  doc["variation"] = cfg.variation;
  doc["gains"] = {{"k1", cfg.gains.k1},
                  {"k2", cfg.gains.k2},
                  {"k3", cfg.gains.k3},
                  {"k4", cfg.gains.k4},
                  {"a_max", cfg.gains.a_max},
                  {"omega_max", cfg.gains.omega_max},
                  {"gamma_rate_max", cfg.gains.gamma_rate_max},
                  {"d", cfg.gains.d},
                  {"delta_z", cfg.gains.delta_z},
                  {"c", cfg.gains.c}};
  doc["leader"] = {{"speed", cfg.leader.speed},
                   {"radius", cfg.leader.radius},
                   {"radius_y", cfg.leader.radius_y},
                   {"altitude", cfg.leader.altitude},
                   {"x0", cfg.leader.x0}};
  doc["episode_len"] = cfg.episode_len;
  doc["dt"] = cfg.dt;
  doc["control_period"] = cfg.control_period;
  doc["inter_agent_radius"] = cfg.inter_agent_radius;
  doc["avoid_offset"] = cfg.avoid_offset;
  doc["fleet_s_scale"] = cfg.fleet_s_scale;
  doc["v_min"] = cfg.v_min;
  doc["v_max"] = cfg.v_max;
  doc["gamma"] = cfg.gamma;
  doc["seed"] = cfg.seed;
  json obstacles = json::array();
  for (const auto& b : cfg.obstacles) {
    obstacles.push_back({{"min", b.mins}, {"max", b.maxs}});
  }
  doc["obstacles"] = obstacles;
  doc["followers"] = cfg.follower_offsets;
  doc["init_half_widths"] = cfg.init_half_widths;
  doc["reward"] = {
      {"kind", cfg.reward.kind == RewardSpec::kUntrusted ? "r_u" : "r_zone"},
      {"zone_radius", cfg.reward.zone_radius}};
  json dims = json::array();
  for (const auto& d : cfg.obs_dims) {
    dims.push_back({{"lo", d.lo}, {"hi", d.hi}, {"cells", d.cells}});
  }
  doc["observation"] = {{"dims", dims}};
  doc["lookahead"] = {
      {"horizon", cfg.lookahead.horizon},
      {"samples", cfg.lookahead.samples},
      {"half_widths", cfg.lookahead.half_widths},
      {"check_set", cfg.lookahead.check_set == CheckSet::kSafeSet ? "safe" : "recoverable"},
      {"width_bound", cfg.lookahead.width_bound}};
  return doc.dump(2) + "\n";
}

}  // namespace rta
