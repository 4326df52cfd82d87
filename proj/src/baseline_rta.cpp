#include "rta/baseline_rta.hpp"

#include <algorithm>
#include <cmath>

#include "rta/errors.hpp"
#include "rta/lookahead.hpp"
#include "rta/rng.hpp"

namespace rta {

namespace {

double magnitude(Interval a) { return std::max(std::abs(a.lo), std::abs(a.hi)); }

struct IntervalControl {
  Interval omega{0, 0};
  Interval pitch_rate{0, 0};
  Interval accel{0, 0};
};

// Natural interval extension of the untrusted-controller laws over a state
// box, with the leader known exactly.
IntervalControl control_interval_u(const ScenarioConfig& cfg, const StateVec& leader,
                                   const ReachBox& box, int agent, double t) {
  const Gains& g = cfg.gains;
  IntervalControl u;
  switch (cfg.follower_model()) {
    case Model::kAcc: {
      double threshold = leader[0] - g.d;
      if (box.iv[0].hi <= threshold) {
        u.accel = Interval::point(g.a_max);
      } else if (box.iv[0].lo > threshold) {
        u.accel = Interval::point(-g.a_max);
      } else {
        u.accel = {-g.a_max, g.a_max};  // box straddles the switch boundary
      }
      break;
    }
    case Model::kDubins: {
      StateVec ref = reference_point(cfg, leader, kActionU, agent);
      double omega_ref = leader_omega(cfg, t);
      Interval dx = ref[0] - box.iv[0];
      Interval dy = ref[1] - box.iv[1];
      Interval psi = box.iv[2];
      Interval ey = -sin(psi) * dx + cos(psi) * dy;
      Interval heading_err = sin(Interval::point(ref[2]) - psi);
      u.omega = clamp(omega_ref + box.iv[3] * (g.k1 * ey + g.k2 * heading_err),
                      g.omega_max);
      u.accel = clamp(g.k3 * (ref[3] - box.iv[3]), g.a_max);
      break;
    }
    case Model::kAir: {
      StateVec ref = reference_point(cfg, leader, kActionU, agent);
      double omega_ref = leader_omega(cfg, t);
      Interval dx = ref[0] - box.iv[0];
      Interval dy = ref[1] - box.iv[1];
      Interval psi = box.iv[3];
      Interval ey = -sin(psi) * dx + cos(psi) * dy;
      Interval heading_err = sin(Interval::point(ref[3]) - psi);
      u.omega = clamp(omega_ref + ref[5] * (g.k1 * ey + g.k2 * heading_err),
                      g.omega_max);
      Interval horiz = sqrt(dx * dx + dy * dy);
      Interval gamma_ref = atan2(ref[2] - box.iv[2], horiz);
      u.pitch_rate = clamp(g.k4 * (gamma_ref - box.iv[4]), g.gamma_rate_max);
      u.accel = clamp(g.k3 * (ref[5] - box.iv[5]), g.a_max);
      break;
    }
  }
  return u;
}

void interval_derivative(Model model, const ReachBox& box, const IntervalControl& u,
                         ReachBox& d) {
  switch (model) {
    case Model::kAcc:
      d.iv[0] = box.iv[1];
      d.iv[1] = u.accel;
      break;
    case Model::kDubins:
      d.iv[0] = box.iv[3] * cos(box.iv[2]);
      d.iv[1] = box.iv[3] * sin(box.iv[2]);
      d.iv[2] = u.omega;
      d.iv[3] = u.accel;
      break;
    case Model::kAir: {
      Interval cos_gamma = cos(box.iv[4]);
      d.iv[0] = box.iv[5] * cos(box.iv[3]) * cos_gamma;
      d.iv[1] = box.iv[5] * sin(box.iv[3]) * cos_gamma;
      d.iv[2] = box.iv[5] * sin(box.iv[4]);
      d.iv[3] = u.omega;
      d.iv[4] = u.pitch_rate;
      d.iv[5] = u.accel;
      break;
    }
  }
}

void inflate(Interval& iv, double amount) {
  iv.lo -= amount;
  iv.hi += amount;
}

// One interval Euler step of size h with a second-order remainder: the local
// error of Euler against the true flow is bounded by h^2/2 * max |d/dt f|,
// evaluated from the step enclosure. A small absolute pad covers rounding and
// the (far smaller) deviation of the RK4 simulator from the flow.
ReachBox interval_euler_step(Model model, const ReachBox& box, const IntervalControl& u,
                             double h) {
  const int dim = state_dim(model);
  ReachBox d;
  interval_derivative(model, box, u, d);
  ReachBox out = box;
  for (int i = 0; i < dim; ++i) out.iv[i] = box.iv[i] + h * d.iv[i];

  double a_mx = magnitude(u.accel);
  double w_mx = magnitude(u.omega);
  double g_mx = magnitude(u.pitch_rate);
  switch (model) {
    case Model::kAcc:
      inflate(out.iv[0], 0.5 * h * h * a_mx);
      break;
    case Model::kDubins: {
      double v_mx = std::max(magnitude(box.iv[3]), magnitude(out.iv[3]));
      double exy = 0.5 * h * h * (a_mx + v_mx * w_mx);
      inflate(out.iv[0], exy);
      inflate(out.iv[1], exy);
      break;
    }
    case Model::kAir: {
      double v_mx = std::max(magnitude(box.iv[5]), magnitude(out.iv[5]));
      double exy = 0.5 * h * h * (a_mx + v_mx * (w_mx + g_mx));
      double ez = 0.5 * h * h * (a_mx + v_mx * g_mx);
      inflate(out.iv[0], exy);
      inflate(out.iv[1], exy);
      inflate(out.iv[2], ez);
      break;
    }
  }
  for (int i = 0; i < dim; ++i) {
    inflate(out.iv[i], 1e-9 + 1e-12 * magnitude(out.iv[i]));
  }
  return out;
}

double point_to_box_distance(const StateVec& p, const ReachBox& box, int dims) {
  double sum = 0.0;
  for (int i = 0; i < dims; ++i) {
    double gap = std::max({0.0, box.iv[i].lo - p[i], p[i] - box.iv[i].hi});
    sum += gap * gap;
  }
  return std::sqrt(sum);
}

double box_to_box_distance(const ReachBox& a, const ReachBox& b, int dims) {
  double sum = 0.0;
  for (int i = 0; i < dims; ++i) {
    double gap = std::max({0.0, a.iv[i].lo - b.iv[i].hi, b.iv[i].lo - a.iv[i].hi});
    sum += gap * gap;
  }
  return std::sqrt(sum);
}

int pos_dims(const ScenarioConfig& cfg) {
  switch (cfg.follower_model()) {
    case Model::kAcc: return 1;
    case Model::kDubins: return 2;
    case Model::kAir: return 3;
  }
  return 0;
}

}  // namespace

bool box_possibly_unsafe(const ScenarioConfig& cfg, const StateVec& leader,
                         const std::vector<ReachBox>& boxes, int agent) {
  const int dims = pos_dims(cfg);
  const ReachBox& box = boxes[agent];
  if (point_to_box_distance(leader, box, dims) < cfg.gains.c) return true;
  for (const auto& obstacle : cfg.obstacles) {
    bool overlap = true;
    for (size_t i = 0; i < obstacle.mins.size() && overlap; ++i) {
      overlap = box.iv[i].hi >= obstacle.mins[i] && box.iv[i].lo <= obstacle.maxs[i];
    }
    if (overlap) return true;
  }
  if (cfg.follower_model() == Model::kAir && box.iv[2].lo < 0.0) return true;
  if (cfg.kind == ScenarioKind::kFleet) {
    for (size_t other = 0; other < boxes.size(); ++other) {
      if (static_cast<int>(other) == agent) continue;
      if (box_to_box_distance(box, boxes[other], dims) < cfg.inter_agent_radius) {
        return true;
      }
    }
  }
  if (cfg.lookahead.check_set == CheckSet::kAccRecoverable) {
    // Worst corner: margin decreases with follower position and speed.
    double margin = acc_recoverable_margin(box.iv[0].hi, box.iv[1].hi, leader[0],
                                           leader[1], cfg.gains.c, cfg.gains.a_max);
    if (margin < 0.0) return true;
  }
  return false;
}

bool snapshot_in_check_set(const ScenarioConfig& cfg, const Snapshot& snap) {
  for (int agent = 0; agent < cfg.num_agents(); ++agent) {
    if (agent_unsafe_distance(cfg, snap.leader, snap.followers, agent) < 0.0) {
      return false;
    }
    if (cfg.lookahead.check_set == CheckSet::kAccRecoverable) {
      const StateVec& q = snap.followers[agent];
      if (acc_recoverable_margin(q[0], q[1], snap.leader[0], snap.leader[1], cfg.gains.c,
                                 cfg.gains.a_max) < 0.0) {
        return false;
      }
    }
  }
  return true;
}

int sim_rta_decide(const ScenarioConfig& cfg, const ScenarioState& state, uint64_t seed) {
  if (state.done) throw PreconditionError("sim_rta_decide: episode already done");
  const int dim = state_dim(cfg.follower_model());
  const auto& hw = cfg.lookahead.half_widths;
  SplitMix64 rng(seed);
  for (int sample = 0; sample < cfg.lookahead.samples; ++sample) {
    std::vector<StateVec> followers = state.followers;
    for (auto& f : followers) {
      for (int i = 0; i < dim; ++i) {
        double w = i < static_cast<int>(hw.size()) ? hw[i] : 0.0;
        f[i] += rng.uniform(-w, w);
      }
    }
    auto rollout = rollout_under_u(cfg, state.t, followers, cfg.lookahead.horizon);
    for (const auto& snap : rollout) {
      if (!snapshot_in_check_set(cfg, snap)) return kActionS;
    }
  }
  return kActionU;
}

ReachResult interval_reach(const ScenarioConfig& cfg, int start_step,
                           const std::vector<ReachBox>& initial, int periods) {
  const Model model = cfg.follower_model();
  const int dim = state_dim(model);
  const int vi = model == Model::kAcc ? 1 : (model == Model::kDubins ? 3 : 5);
  const double h = cfg.dt / 4.0;  // Euler sub-steps inside one integrator step

  ReachResult result;
  double t = start_step * cfg.period_seconds();
  std::vector<ReachBox> boxes = initial;
  result.period_boxes.push_back(boxes);
  result.substep_boxes.push_back(boxes);
  result.leader.push_back(leader_state(cfg, t));

  for (int p = 0; p < periods && !result.exploded; ++p) {
    StateVec leader = leader_state(cfg, t);
    std::vector<IntervalControl> controls(boxes.size());
    for (size_t agent = 0; agent < boxes.size(); ++agent) {
      controls[agent] =
          control_interval_u(cfg, leader, boxes[agent], static_cast<int>(agent), t);
    }
    for (int k = 0; k < cfg.control_period && !result.exploded; ++k) {
      for (size_t agent = 0; agent < boxes.size(); ++agent) {
        ReachBox next = boxes[agent];
        for (int sub = 0; sub < 4; ++sub) {
          next = interval_euler_step(model, next, controls[agent], h);
        }
        // Mirror the simulator's speed clamp (monotone, preserves containment).
        next.iv[vi] = {std::clamp(next.iv[vi].lo, cfg.v_min, cfg.v_max),
                       std::clamp(next.iv[vi].hi, cfg.v_min, cfg.v_max)};
        next.time_index = boxes[agent].time_index + 1;
        boxes[agent] = next;
        if (next.max_width(dim) > cfg.lookahead.width_bound) result.exploded = true;
      }
      if (result.exploded) break;
      t += cfg.dt;
      result.substep_boxes.push_back(boxes);
      result.leader.push_back(leader_state(cfg, t));
    }
    if (!result.exploded) result.period_boxes.push_back(boxes);
  }
  return result;
}

int reach_rta_decide(const ScenarioConfig& cfg, const ScenarioState& state) {
  if (state.done) throw PreconditionError("reach_rta_decide: episode already done");
  const int dim = state_dim(cfg.follower_model());
  std::vector<ReachBox> initial;
  initial.reserve(state.followers.size());
  for (const auto& f : state.followers) {
    initial.push_back(ReachBox::from_center(f, cfg.lookahead.half_widths, dim));
  }
  ReachResult reach = interval_reach(cfg, state.t, initial, cfg.lookahead.horizon);
  if (reach.exploded) return kActionS;  // unknown: fail safe
  for (size_t step = 0; step < reach.substep_boxes.size(); ++step) {
    for (int agent = 0; agent < cfg.num_agents(); ++agent) {
      if (box_possibly_unsafe(cfg, reach.leader[step], reach.substep_boxes[step], agent)) {
        return kActionS;
      }
    }
  }
  return kActionU;
}

}  // namespace rta
