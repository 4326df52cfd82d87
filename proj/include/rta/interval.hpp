#pragma once

#include <array>
#include <cmath>

#include "rta/dynamics.hpp"

namespace rta {

// Closed interval [lo, hi] with outward-padded arithmetic. Every operation
// over-approximates the set image; a small relative pad absorbs libm and
// rounding slack so downstream containment arguments stay sound.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  Interval() = default;
  Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {}
  static Interval point(double v) { return {v, v}; }

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double v) const { return v >= lo && v <= hi; }
};

Interval operator+(Interval a, Interval b);
Interval operator-(Interval a, Interval b);
Interval operator*(Interval a, Interval b);
Interval operator+(Interval a, double b);
Interval operator+(double a, Interval b);
Interval operator-(Interval a, double b);
Interval operator-(double a, Interval b);
Interval operator*(double a, Interval b);
Interval operator-(Interval a);

Interval hull(Interval a, Interval b);
Interval clamp(Interval a, double bound);
Interval sin(Interval a);
Interval cos(Interval a);
Interval sqrt(Interval a);
// Sound for x.lo >= 0 (our only use); wider arguments fall back to [-pi, pi].
Interval atan2(Interval y, Interval x);

// Axis-aligned interval vector over a continuous model state. Angle
// dimensions are tracked unwrapped; containment tests compare angles modulo
// 2*pi.
struct ReachBox {
  std::array<Interval, 6> iv{};
  int time_index = 0;

  static ReachBox from_point(const StateVec& s, int dim);
  static ReachBox from_center(const StateVec& s, std::span<const double> half_widths,
                              int dim);
  double max_width(int dim) const;
  bool contains_state(Model model, const StateVec& s) const;
};

}  // namespace rta
