#include "rta/shaping.hpp"

#include <cmath>
#include <limits>

#include "rta/errors.hpp"

namespace rta {

namespace {

constexpr double kPenaltyClamp = -1e300;

ShapedReward make_shaped(const RewardStructure& rs, const UnsafeSet& unsafe, int n,
                         double r_max_effective, double path_prob) {
  ShapedReward shaped;
  shaped.base = rs;
  shaped.unsafe = unsafe;
  shaped.horizon_n = n;
  double denom = std::pow(rs.gamma, n) * (1.0 - rs.gamma) * path_prob;
  double raw = denom > 0.0 ? -r_max_effective / denom
                           : -std::numeric_limits<double>::infinity();
  if (!std::isfinite(raw) || raw < kPenaltyClamp) {
    shaped.penalty = kPenaltyClamp;
    shaped.clamped = true;
    shaped.warnings.push_back(
        "penalty magnitude exceeds 1e300 and was clamped; the sign argument "
        "only covers episodes the clamped penalty still dominates");
  } else {
    shaped.penalty = raw;
  }
  return shaped;
}

void check_preconditions(const RewardStructure& rs, int n,
                         const std::vector<std::string>* state_names,
                         const std::vector<std::string>* action_names) {
  if (n < 1) throw PreconditionError("shape: horizon n must be >= 1");
  if (!(rs.gamma > 0.0 && rs.gamma < 1.0)) {
    throw PreconditionError("shape: discount factor must lie in (0,1)");
  }
  const int num_actions = rs.num_actions;
  for (size_t i = 0; i < rs.r.size(); ++i) {
    if (rs.r[i] < 0.0) {
      int s = static_cast<int>(i) / num_actions;
      int a = static_cast<int>(i) % num_actions;
      std::string state = state_names && s < static_cast<int>(state_names->size())
                              ? (*state_names)[s]
                              : std::to_string(s);
      std::string action = action_names && a < static_cast<int>(action_names->size())
                               ? (*action_names)[a]
                               : std::to_string(a);
      throw PreconditionError("shape: negative base reward at (" + state + ", " +
                              action + ")");
    }
  }
}

}  // namespace

std::vector<double> ShapedReward::table(int num_states) const {
  std::vector<double> out(static_cast<size_t>(num_states) * base.num_actions);
  for (int s = 0; s < num_states; ++s) {
    for (int a = 0; a < base.num_actions; ++a) {
      out[static_cast<size_t>(s) * base.num_actions + a] = at(s, a);
    }
  }
  return out;
}

ShapedReward shape(const RewardStructure& rs, const UnsafeSet& unsafe, int n,
                   const std::vector<std::string>* state_names,
                   const std::vector<std::string>* action_names) {
  check_preconditions(rs, n, state_names, action_names);
  double r_max = rs.max_reward();
  double r_eff = r_max > 0.0 ? r_max : 1.0;  // zero-reward surrogate
  return make_shaped(rs, unsafe, n, r_eff, 1.0);
}

ShapedReward shape_mdp(const RewardStructure& rs, const UnsafeSet& unsafe, int n,
                       double min_path_prob) {
  check_preconditions(rs, n, nullptr, nullptr);
  if (!(min_path_prob > 0.0 && min_path_prob <= 1.0)) {
    throw PreconditionError("shape_mdp: min_path_prob must lie in (0,1]");
  }
  double r_max = rs.max_reward();
  double r_eff = r_max > 0.0 ? r_max : 1.0;
  ShapedReward shaped = make_shaped(rs, unsafe, n, r_eff, min_path_prob);
  shaped.min_path_prob = min_path_prob;
  return shaped;
}

double least_path_prob_bound(const Mdp& mdp, int n) {
  return std::pow(mdp.min_positive_prob(), n);
}

SafetyVerdict certify(double optimal_shaped_value) {
  return optimal_shaped_value >= 0.0 ? SafetyVerdict::kSafeExists
                                     : SafetyVerdict::kNoSafePolicy;
}

const char* to_string(SafetyVerdict v) {
  return v == SafetyVerdict::kSafeExists ? "SafeExists" : "NoSafePolicy";
}

}  // namespace rta
