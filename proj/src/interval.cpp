#include "rta/interval.hpp"

#include <algorithm>

namespace rta {

namespace {

constexpr double kPad = 1e-14;

Interval padded(double lo, double hi) {
  double slack_lo = kPad * (1.0 + std::abs(lo));
  double slack_hi = kPad * (1.0 + std::abs(hi));
  return {lo - slack_lo, hi + slack_hi};
}

// Is there an x in [lo, hi] with x = target (mod 2*pi)?
bool contains_mod_2pi(double lo, double hi, double target) {
  double k = std::ceil((lo - target) / (2.0 * M_PI));
  return target + 2.0 * M_PI * k <= hi;
}

}  // namespace

Interval operator+(Interval a, Interval b) { return padded(a.lo + b.lo, a.hi + b.hi); }
Interval operator-(Interval a, Interval b) { return padded(a.lo - b.hi, a.hi - b.lo); }

Interval operator*(Interval a, Interval b) {
  double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
  return padded(std::min(std::min(p1, p2), std::min(p3, p4)),
                std::max(std::max(p1, p2), std::max(p3, p4)));
}

Interval operator+(Interval a, double b) { return padded(a.lo + b, a.hi + b); }
Interval operator+(double a, Interval b) { return padded(a + b.lo, a + b.hi); }
Interval operator-(Interval a, double b) { return padded(a.lo - b, a.hi - b); }
Interval operator-(double a, Interval b) { return padded(a - b.hi, a - b.lo); }
Interval operator*(double a, Interval b) {
  return a >= 0.0 ? padded(a * b.lo, a * b.hi) : padded(a * b.hi, a * b.lo);
}
Interval operator-(Interval a) { return {-a.hi, -a.lo}; }

Interval hull(Interval a, Interval b) {
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

Interval clamp(Interval a, double bound) {
  return {std::clamp(a.lo, -bound, bound), std::clamp(a.hi, -bound, bound)};
}

Interval sin(Interval a) {
  if (a.width() >= 2.0 * M_PI) return {-1.0, 1.0};
  double lo = std::min(std::sin(a.lo), std::sin(a.hi));
  double hi = std::max(std::sin(a.lo), std::sin(a.hi));
  if (contains_mod_2pi(a.lo, a.hi, M_PI / 2.0)) hi = 1.0;
  if (contains_mod_2pi(a.lo, a.hi, -M_PI / 2.0)) lo = -1.0;
  return padded(lo, hi);
}

Interval cos(Interval a) { return sin(a + M_PI / 2.0); }

Interval sqrt(Interval a) {
  return padded(std::sqrt(std::max(0.0, a.lo)), std::sqrt(std::max(0.0, a.hi)));
}

Interval atan2(Interval y, Interval x) {
  if (x.lo < 0.0) return {-M_PI, M_PI};
  // atan2 is monotone in each argument for x >= 0, so corner evaluation is
  // exact up to rounding.
  double c1 = std::atan2(y.lo, x.lo), c2 = std::atan2(y.lo, x.hi);
  double c3 = std::atan2(y.hi, x.lo), c4 = std::atan2(y.hi, x.hi);
  return padded(std::min(std::min(c1, c2), std::min(c3, c4)),
                std::max(std::max(c1, c2), std::max(c3, c4)));
}

ReachBox ReachBox::from_point(const StateVec& s, int dim) {
  ReachBox box;
  for (int i = 0; i < dim; ++i) box.iv[i] = Interval::point(s[i]);
  return box;
}

ReachBox ReachBox::from_center(const StateVec& s, std::span<const double> half_widths,
                               int dim) {
  ReachBox box;
  for (int i = 0; i < dim; ++i) {
    double hw = i < static_cast<int>(half_widths.size()) ? half_widths[i] : 0.0;
    box.iv[i] = {s[i] - hw, s[i] + hw};
  }
  return box;
}

double ReachBox::max_width(int dim) const {
  double w = 0.0;
  for (int i = 0; i < dim; ++i) w = std::max(w, iv[i].width());
  return w;
}

bool ReachBox::contains_state(Model model, const StateVec& s) const {
  const int dim = state_dim(model);
  for (int i = 0; i < dim; ++i) {
    bool is_angle = (model == Model::kDubins && i == 2) ||
                    (model == Model::kAir && (i == 3 || i == 4));
    if (is_angle) {
      if (!contains_mod_2pi(iv[i].lo, iv[i].hi, s[i])) return false;
    } else if (!iv[i].contains(s[i])) {
      return false;
    }
  }
  return true;
}

}  // namespace rta
