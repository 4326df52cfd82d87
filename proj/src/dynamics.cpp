#include "rta/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rta/errors.hpp"

namespace rta {

StateVec to_vec(const AccState& s) { return {s.x, s.v, 0, 0, 0, 0}; }
StateVec to_vec(const DubinsState& s) { return {s.x, s.y, s.psi, s.v, 0, 0}; }
StateVec to_vec(const AirState& s) { return {s.x, s.y, s.z, s.psi, s.gamma, s.v}; }

AccState to_acc(const StateVec& v) { return {v[0], v[1]}; }
DubinsState to_dubins(const StateVec& v) { return {v[0], v[1], v[2], v[3]}; }
AirState to_air(const StateVec& v) { return {v[0], v[1], v[2], v[3], v[4], v[5]}; }

double wrap_angle(double a) {
  if (a > -M_PI && a <= M_PI) return a;  // already in range: keep bits intact
  double w = std::fmod(a + M_PI, 2.0 * M_PI);
  if (w <= 0.0) w += 2.0 * M_PI;
  return w - M_PI;
}

void derivative(Model model, std::span<const double> state, const ControlInput& input,
                std::span<double> out) {
  const int dim = state_dim(model);
  if (static_cast<int>(state.size()) < dim || static_cast<int>(out.size()) < dim) {
    throw PreconditionError("derivative: state/output dimension mismatch");
  }
  switch (model) {
    case Model::kAcc:
      out[0] = state[1];
      out[1] = input.accel;
      break;
    case Model::kDubins:
      out[0] = state[3] * std::cos(state[2]);
      out[1] = state[3] * std::sin(state[2]);
      out[2] = input.omega;
      out[3] = input.accel;
      break;
    case Model::kAir:
      out[0] = state[5] * std::cos(state[3]) * std::cos(state[4]);
      out[1] = state[5] * std::sin(state[3]) * std::cos(state[4]);
      out[2] = state[5] * std::sin(state[4]);
      out[3] = input.omega;
      out[4] = input.pitch_rate;
      out[5] = input.accel;
      break;
  }
}

namespace {

void wrap_state(Model model, StateVec& s) {
  if (model == Model::kDubins) {
    s[2] = wrap_angle(s[2]);
  } else if (model == Model::kAir) {
    s[3] = wrap_angle(s[3]);
    s[4] = wrap_angle(s[4]);
  }
}

}  // namespace

StateVec integrate(Model model, const StateVec& state, const ControlInput& input,
                   double dt, int steps) {
  if (!(dt > 0.0)) throw PreconditionError("integrate: dt must be > 0");
  if (steps < 0) throw PreconditionError("integrate: steps must be >= 0");
  const int dim = state_dim(model);
  StateVec q = state;
  StateVec k1{}, k2{}, k3{}, k4{}, tmp{};
  for (int step = 0; step < steps; ++step) {
    derivative(model, q, input, k1);
    for (int i = 0; i < dim; ++i) tmp[i] = q[i] + 0.5 * dt * k1[i];
    derivative(model, tmp, input, k2);
    for (int i = 0; i < dim; ++i) tmp[i] = q[i] + 0.5 * dt * k2[i];
    derivative(model, tmp, input, k3);
    for (int i = 0; i < dim; ++i) tmp[i] = q[i] + dt * k3[i];
    derivative(model, tmp, input, k4);
    for (int i = 0; i < dim; ++i) {
      q[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (!std::isfinite(q[i])) {
        throw InternalError("integrate: non-finite value at step " +
                            std::to_string(step));
      }
    }
    wrap_state(model, q);
  }
  return q;
}

void Quantizer::validate() const {
  if (dims.empty()) throw ConfigError("quantizer needs at least one dimension");
  for (const auto& d : dims) {
    if (d.cells < 1) throw ConfigError("quantizer cell count must be >= 1");
    if (!(d.lo < d.hi) || !std::isfinite(d.lo) || !std::isfinite(d.hi)) {
      throw ConfigError("quantizer bounds must be finite and ordered");
    }
  }
}

long long Quantizer::num_cells() const {
  long long total = 1;
  for (const auto& d : dims) total *= d.cells;
  return total;
}

long long Quantizer::index(std::span<const double> state) const {
  if (state.size() < dims.size()) {
    throw PreconditionError("quantize: state dimension mismatch");
  }
  long long idx = 0;
  for (size_t i = 0; i < dims.size(); ++i) {
    const auto& d = dims[i];
    double width = (d.hi - d.lo) / d.cells;
    long long cell = static_cast<long long>(std::floor((state[i] - d.lo) / width));
    cell = std::max<long long>(0, std::min<long long>(d.cells - 1, cell));
    idx = idx * d.cells + cell;
  }
  return idx;
}

std::vector<double> Quantizer::center(long long index) const {
  std::vector<double> out(dims.size());
  for (size_t i = dims.size(); i-- > 0;) {
    const auto& d = dims[i];
    long long cell = index % d.cells;
    index /= d.cells;
    double width = (d.hi - d.lo) / d.cells;
    out[i] = d.lo + (cell + 0.5) * width;
  }
  return out;
}

}  // namespace rta
