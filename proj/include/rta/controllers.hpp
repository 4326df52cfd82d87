#pragma once

#include "rta/dynamics.hpp"

namespace rta {

// Feedback gains and geometry shared by the scenario controllers. Defaults
// are tuned so the Dubins follower tracks the default orbit without RTA
// intervention; scenario configs override per fixture.
struct Gains {
  double k1 = 0.05;  // lateral error gain (1/m)
  double k2 = 1.0;   // heading error gain
  double k3 = 0.5;   // speed error gain (1/s)
  double k4 = 1.0;   // pitch error gain (1/s)
  double a_max = 3.0;           // acceleration clamp (m/s^2)
  double omega_max = 0.5;       // heading-rate clamp (rad/s)
  double gamma_rate_max = 0.3;  // pitch-rate clamp (rad/s)
  double d = 10.0;       // tracking offset behind the leader (m)
  double delta_z = 0.0;  // below-leader offset, Air only (m)
  double c = 4.0;        // collision radius (m), c < d

  void validate() const;
};

// Bang-bang cruise controller: full acceleration up to the tracking point
// x_l - d, full deceleration past it (the boundary takes +a_max).
ControlInput acc_untrusted(const AccState& q, const AccState& leader, const Gains& g);

// PD cruise controller on position and velocity error, clamped to a_max.
ControlInput acc_safety(const AccState& q, const AccState& leader, const Gains& g);

// Tracking controller for Dubins followers. `ref` is the tracked state (see
// scenario reference points) and `omega_ref` its nominal heading rate. The
// safety variant passes allow_accel = false and never accelerates to catch
// up.
ControlInput dubins_tracking(const DubinsState& q, const DubinsState& ref,
                             double omega_ref, const Gains& g, bool allow_accel);

// Tracking controller for Air followers with a pitch channel steering toward
// the line of sight to the reference point. safety_mode forces zero
// acceleration (the caller also supplies the at-altitude reference).
ControlInput air_tracking(const AirState& q, const AirState& ref, double omega_ref,
                          const Gains& g, bool safety_mode);

}  // namespace rta
