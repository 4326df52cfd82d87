#pragma once

#include <array>
#include <span>
#include <vector>

namespace rta {

// Continuous agent models. State vectors use the first state_dim(model)
// entries of a StateVec:
//   Acc    [x v]
//   Dubins [x y psi v]
//   Air    [x y z psi gamma v]   (gamma is the flight-path/pitch angle)
enum class Model { kAcc, kDubins, kAir };

constexpr int state_dim(Model m) {
  switch (m) {
    case Model::kAcc: return 2;
    case Model::kDubins: return 4;
    case Model::kAir: return 6;
  }
  return 0;
}

using StateVec = std::array<double, 6>;

struct AccState {
  double x = 0.0;
  double v = 0.0;
};

struct DubinsState {
  double x = 0.0;
  double y = 0.0;
  double psi = 0.0;  // heading, wrapped to (-pi, pi]
  double v = 0.0;
};

struct AirState {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double psi = 0.0;    // heading
  double gamma = 0.0;  // pitch / flight-path angle
  double v = 0.0;
};

// Control channels by model: Acc uses accel only; Dubins adds the heading
// rate; Air adds the pitch rate.
struct ControlInput {
  double omega = 0.0;       // heading rate (rad/s)
  double pitch_rate = 0.0;  // pitch rate (rad/s)
  double accel = 0.0;       // acceleration (m/s^2)
};

StateVec to_vec(const AccState& s);
StateVec to_vec(const DubinsState& s);
StateVec to_vec(const AirState& s);
AccState to_acc(const StateVec& v);
DubinsState to_dubins(const StateVec& v);
AirState to_air(const StateVec& v);

// Wrap an angle to (-pi, pi].
double wrap_angle(double a);

// Right-hand side of the model ODE.
void derivative(Model model, std::span<const double> state, const ControlInput& input,
                std::span<double> out);

// Classical fixed-step RK4 with the input held constant (zero-order hold);
// angle components are wrapped after every step. Throws InternalError naming
// the step if an intermediate value becomes non-finite.
StateVec integrate(Model model, const StateVec& state, const ControlInput& input,
                   double dt, int steps);

// Uniform grid over a box with an out-of-bounds clamp to the edge cells.
struct Quantizer {
  struct Dim {
    double lo = 0.0;
    double hi = 1.0;
    int cells = 1;
  };
  std::vector<Dim> dims;

  void validate() const;
  long long num_cells() const;
  // Row-major cell index (first dimension most significant).
  long long index(std::span<const double> state) const;
  // Cell-center coordinates.
  std::vector<double> center(long long index) const;
};

}  // namespace rta
