#include "rta/controllers.hpp"

#include <algorithm>
#include <cmath>

#include "rta/errors.hpp"

namespace rta {

namespace {

double clamp(double x, double bound) { return std::clamp(x, -bound, bound); }

// Lateral error of the reference point in the follower's body frame;
// positive when the reference lies to the follower's left.
double lateral_error(double dx, double dy, double psi) {
  return -std::sin(psi) * dx + std::cos(psi) * dy;
}

}  // namespace

void Gains::validate() const {
  auto positive = [](double v) { return v > 0.0; };
  if (!positive(k1) || !positive(k2) || !positive(k3) || !positive(k4) ||
      !positive(a_max) || !positive(omega_max) || !positive(gamma_rate_max) ||
      !positive(d) || !positive(c)) {
    throw ConfigError("gains: all gains and bounds must be positive");
  }
  if (!(c < d)) throw ConfigError("gains: collision radius c must be < offset d");
}

ControlInput acc_untrusted(const AccState& q, const AccState& leader, const Gains& g) {
  ControlInput u;
  u.accel = (q.x <= leader.x - g.d) ? g.a_max : -g.a_max;
  return u;
}

ControlInput acc_safety(const AccState& q, const AccState& leader, const Gains& g) {
  ControlInput u;
  double raw = g.k1 * ((leader.x - g.d) - q.x) + g.k2 * (leader.v - q.v);
  u.accel = clamp(raw, g.a_max);
  return u;
}

ControlInput dubins_tracking(const DubinsState& q, const DubinsState& ref,
                             double omega_ref, const Gains& g, bool allow_accel) {
  ControlInput u;
  double ey = lateral_error(ref.x - q.x, ref.y - q.y, q.psi);
  double heading_err = wrap_angle(ref.psi - q.psi);
  u.omega = clamp(omega_ref + q.v * (g.k1 * ey + g.k2 * std::sin(heading_err)),
                  g.omega_max);
  u.accel = allow_accel ? clamp(g.k3 * (ref.v - q.v), g.a_max) : 0.0;
  return u;
}

ControlInput air_tracking(const AirState& q, const AirState& ref, double omega_ref,
                          const Gains& g, bool safety_mode) {
  ControlInput u;
  double dx = ref.x - q.x;
  double dy = ref.y - q.y;
  double ey = lateral_error(dx, dy, q.psi);
  double heading_err = wrap_angle(ref.psi - q.psi);
  u.omega = clamp(omega_ref + ref.v * (g.k1 * ey + g.k2 * std::sin(heading_err)),
                  g.omega_max);
  // Pitch steers toward the line of sight from the follower to the reference.
  double gamma_ref = std::atan2(ref.z - q.z, std::hypot(dx, dy));
  u.pitch_rate = clamp(g.k4 * (gamma_ref - q.gamma), g.gamma_rate_max);
  u.accel = safety_mode ? 0.0 : clamp(g.k3 * (ref.v - q.v), g.a_max);
  return u;
}

}  // namespace rta
