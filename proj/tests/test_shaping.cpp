#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rta/errors.hpp"
#include "rta/plant_io.hpp"
#include "rta/shaping.hpp"
#include "rta/solver.hpp"

using namespace rta;

namespace {

RewardStructure reward_table(std::vector<double> r, int num_actions, double gamma) {
  RewardStructure rs;
  rs.r = std::move(r);
  rs.num_actions = num_actions;
  rs.gamma = gamma;
  return rs;
}

}  // namespace

TEST_CASE("penalty formula matches hand evaluation") {
  UnsafeSet unsafe(2);
  unsafe.add(1);

  ShapedReward a = shape(reward_table({0, 1, 0, 1}, 2, 0.9), unsafe, 3);
  CHECK(a.penalty == doctest::Approx(-13.71742112482853).epsilon(1e-12));
  CHECK_FALSE(a.clamped);

  ShapedReward b = shape(reward_table({0, 1, 0, 1}, 2, 0.5), unsafe, 1);
  CHECK(b.penalty == doctest::Approx(-4.0).epsilon(1e-12));

  // identically zero rewards fall back to the surrogate r_max = 1
  ShapedReward c = shape(reward_table({0, 0, 0, 0}, 2, 0.9), unsafe, 3);
  CHECK(c.penalty == doctest::Approx(-13.71742112482853).epsilon(1e-12));
  CHECK(c.penalty < 0.0);
}

TEST_CASE("shaped table replaces rewards only inside the unsafe set") {
  UnsafeSet unsafe(3);
  unsafe.add(2);
  RewardStructure rs = reward_table({0, 1, 2, 3, 4, 5}, 2, 0.9);
  ShapedReward shaped = shape(rs, unsafe, 3);
  for (int s = 0; s < 3; ++s) {
    for (int a = 0; a < 2; ++a) {
      if (s == 2) {
        CHECK(shaped.at(s, a) == shaped.penalty);
      } else {
        CHECK(shaped.at(s, a) == rs.at(s, a));
      }
    }
  }
}

TEST_CASE("negative rewards are rejected with the offending pair named") {
  UnsafeSet unsafe(2);
  RewardStructure rs = reward_table({0, 1, -0.5, 1}, 2, 0.9);
  std::vector<std::string> states{"ok", "bad"};
  std::vector<std::string> actions{"S", "U"};
  try {
    shape(rs, unsafe, 2, &states, &actions);
    FAIL("expected PreconditionError");
  } catch (const PreconditionError& e) {
    std::string msg = e.what();
    CHECK(msg.find("bad") != std::string::npos);
    CHECK(msg.find("S") != std::string::npos);
  }
}

TEST_CASE("mdp variant divides by the least path probability") {
  UnsafeSet unsafe(2);
  unsafe.add(1);
  RewardStructure rs = reward_table({0, 1, 0, 1}, 2, 0.9);

  ShapedReward det = shape_mdp(rs, unsafe, 3, 1.0);
  CHECK(det.penalty == doctest::Approx(-13.71742112482853).epsilon(1e-12));

  ShapedReward half = shape_mdp(rs, unsafe, 3, 0.125);  // b = 0.5, n = 3
  CHECK(half.penalty == doctest::Approx(-109.73936899862823).epsilon(1e-12));

  RewardStructure rs2 = reward_table({0, 2, 0, 2}, 2, 0.5);
  ShapedReward q = shape_mdp(rs2, unsafe, 2, 0.25);
  CHECK(q.penalty == doctest::Approx(-64.0).epsilon(1e-12));

  CHECK_THROWS_AS(shape_mdp(rs, unsafe, 3, 0.0), PreconditionError);
  CHECK_THROWS_AS(shape_mdp(rs, unsafe, 3, -1.0), PreconditionError);
}

TEST_CASE("least path probability bound is b^n") {
  Mdp mdp;
  mdp.state_names = {"a", "b"};
  mdp.action_names = {"S"};
  mdp.initial = 0;
  mdp.rows = {{{0, 0.25}, {1, 0.75}}, {{1, 1.0}}};
  mdp.validate();
  CHECK(least_path_prob_bound(mdp, 2) == doctest::Approx(0.0625));
}

TEST_CASE("penalty clamps instead of overflowing") {
  UnsafeSet unsafe(1);
  unsafe.add(0);
  RewardStructure rs = reward_table({1, 1}, 2, 0.5);
  ShapedReward shaped = shape(rs, unsafe, 1100);  // 0.5^1100 underflows
  CHECK(shaped.penalty == -1e300);
  CHECK(shaped.clamped);
  CHECK_FALSE(shaped.warnings.empty());
}

TEST_CASE("safe runs keep their reward under the shaped table") {
  SplitMix64 rng(77);
  for (int trial = 0; trial < 25; ++trial) {
    RandomPlant rp = random_plant(rng, 6, 0.9);
    ShapedReward shaped = shape(rp.rewards, rp.unsafe, rp.plant.num_states());
    std::vector<double> shaped_table = shaped.table(rp.plant.num_states());
    StationaryPolicy policy;
    for (int s = 0; s < rp.plant.num_states(); ++s) {
      policy.action.push_back(static_cast<int>(rng.below(2)));
    }
    FiniteRun run = generate_run(rp.plant, StationaryDecider(policy, 2), 40, 0);
    bool safe = true;
    for (int s : run.states) safe = safe && !rp.unsafe.contains(s);
    if (safe) {
      CHECK(run_reward(run, rp.rewards) ==
            doctest::Approx(run_reward(run, shaped_table, 2, 0.9)).epsilon(1e-14));
    }
  }
}

TEST_CASE("policies that enter the unsafe set have negative shaped value") {
  SplitMix64 rng(123);
  int unsafe_policies = 0;
  for (int trial = 0; trial < 40; ++trial) {
    RandomPlant rp = random_plant(rng, 5, 0.9);
    const int n = rp.plant.num_states();
    ShapedReward shaped = shape(rp.rewards, rp.unsafe, n);
    std::vector<double> table = shaped.table(n);
    StationaryPolicy policy;
    policy.action.assign(n, 0);
    for (int bits = 0; bits < (1 << n); ++bits) {
      for (int s = 0; s < n; ++s) policy.action[s] = (bits >> s) & 1;
      if (!is_safe_policy(rp.plant, policy, rp.unsafe)) {
        CHECK(stationary_policy_value(rp.plant, policy, table, 0.9) < 0.0);
        ++unsafe_policies;
      }
    }
  }
  CHECK(unsafe_policies > 100);  // the sweep actually exercised the claim
}

TEST_CASE("certificate sign matches brute-force existence") {
  PlantFile right = builtin_plant("fig2-right");
  SynthesisResult synth = synthesize_safe_optimal(right.plant(), right.rewards, right.unsafe);
  CHECK(synth.verdict == SafetyVerdict::kSafeExists);
  CHECK(synth.shaped_value == doctest::Approx(10.0).epsilon(1e-13));

  PlantFile left = builtin_plant("fig2-left");
  SynthesisResult left_synth = synthesize_safe_optimal(left.plant(), left.rewards, left.unsafe);
  CHECK(left_synth.verdict == SafetyVerdict::kSafeExists);
  CHECK(left_synth.shaped_value == 0.0);

  // every action from q0 leads into the unsafe set
  Plant doomed;
  doomed.state_names = {"q0", "qB"};
  doomed.action_names = {"S", "U"};
  doomed.initial = 0;
  doomed.next = {1, 1, 1, 1};
  UnsafeSet unsafe(2);
  unsafe.add(1);
  RewardStructure rs = reward_table({0, 1, 0, 1}, 2, 0.9);
  SynthesisResult no_safe = synthesize_safe_optimal(doomed, rs, unsafe);
  CHECK(no_safe.verdict == SafetyVerdict::kNoSafePolicy);
  CHECK(no_safe.shaped_value < 0.0);
  CHECK_FALSE(brute_force_best_safe(doomed, rs, unsafe).has_value());
}

TEST_CASE("theorem equivalence and optimality on random plants") {
  SplitMix64 rng(2024);
  int safe_exists_count = 0;
  for (int trial = 0; trial < 100; ++trial) {
    RandomPlant rp = random_plant(rng, 6, 0.9);
    SynthesisResult synth = synthesize_safe_optimal(rp.plant, rp.rewards, rp.unsafe);
    auto oracle = brute_force_best_safe(rp.plant, rp.rewards, rp.unsafe);
    CHECK((synth.verdict == SafetyVerdict::kSafeExists) == oracle.has_value());
    if (oracle) {
      ++safe_exists_count;
      CHECK(is_safe_policy(rp.plant, synth.policy, rp.unsafe));
      CHECK(synth.unshaped_value == doctest::Approx(oracle->value).epsilon(1e-9));
    }
  }
  CHECK(safe_exists_count > 10);
}
