#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rta/errors.hpp"
#include "rta/lookahead.hpp"
#include "rta/plant.hpp"
#include "rta/plant_io.hpp"
#include "rta/solver.hpp"

using namespace rta;

TEST_CASE("step follows the counterexample transition tables") {
  PlantFile left = builtin_plant("fig2-left");
  CHECK(left.plant().step(0, 1) == 1);  // (q0, U) -> q1
  CHECK(left.plant().step(0, 0) == 0);  // (q0, S) -> q0
  PlantFile right = builtin_plant("fig2-right");
  CHECK(right.plant().step(1, 1) == 0);  // (q1, U) -> q0
  CHECK_THROWS_AS(right.plant().step(5, 0), PreconditionError);
  CHECK_THROWS_AS(right.plant().step(0, 7), PreconditionError);
}

TEST_CASE("generate_run traces the unique runs") {
  PlantFile right = builtin_plant("fig2-right");
  StationaryDecider always_u(StationaryPolicy{{1, 1, 1}}, 2);
  FiniteRun run = generate_run(right.plant(), always_u, 4, 7);
  CHECK(run.states == std::vector<int>{0, 1, 0, 1, 0});
  CHECK(run.actions == std::vector<int>{1, 1, 1, 1});

  FiniteRun empty = generate_run(right.plant(), always_u, 0, 7);
  CHECK(empty.states == std::vector<int>{0});
  CHECK(empty.actions.empty());

  PlantFile left = builtin_plant("fig2-left");
  StationaryPolicy lookahead = safe_set_lookahead_policy(left.plant(), left.unsafe);
  FiniteRun doomed = generate_run(left.plant(), StationaryDecider(lookahead, 2), 2, 0);
  CHECK(doomed.states == std::vector<int>{0, 1, 2});  // q0, q1, qB
  CHECK(doomed.actions == std::vector<int>{1, 0});    // U then S
  CHECK(left.unsafe.contains(doomed.states[2]));
}

TEST_CASE("generate_run is deterministic per seed and follows mdp support") {
  PlantFile right = builtin_plant("fig2-right");
  Mdp mdp = to_mdp(right.plant());
  UniformDecider uniform(2);
  FiniteRun a = generate_run(mdp, uniform, 20, 42);
  FiniteRun b = generate_run(mdp, uniform, 20, 42);
  CHECK(a.states == b.states);
  CHECK(a.actions == b.actions);
  FiniteRun c = generate_run(mdp, uniform, 20, 43);
  CHECK(a.actions != c.actions);  // overwhelmingly likely for 20 coin flips
}

TEST_CASE("run_reward sums discounted transition rewards") {
  PlantFile right = builtin_plant("fig2-right");
  FiniteRun run{{0, 1, 0}, {1, 1}};
  CHECK(run_reward(run, right.rewards) == doctest::Approx(1.9).epsilon(1e-14));
  FiniteRun empty{{0}, {}};
  CHECK(run_reward(empty, right.rewards) == 0.0);
  FiniteRun all_s{{0, 0, 0}, {0, 0}};
  CHECK(run_reward(all_s, right.rewards) == 0.0);
}

TEST_CASE("stationary_policy_value is exact via cycle detection") {
  PlantFile right = builtin_plant("fig2-right");
  StationaryPolicy always_u{{1, 1, 1}};
  CHECK(stationary_policy_value(right.plant(), always_u, right.rewards) ==
        doctest::Approx(10.0).epsilon(1e-13));

  RecoverableSet r = recoverable_set(right.plant(), right.unsafe);
  StationaryPolicy pi_r = lookahead_policy(right.plant(), r.member);
  CHECK(stationary_policy_value(right.plant(), pi_r, right.rewards) == 0.0);
}

TEST_CASE("alternate-k policies on the goal plant hit the closed form") {
  PlantFile goal = builtin_plant("sec6-goal");
  const double gamma = goal.rewards.gamma;
  // gamma^600 / (1-gamma) is far below 1e-12, so a 600-step truncation
  // matches the infinite sum at the tested tolerance.
  for (int k = 1; k <= 3; ++k) {
    FunctionalDecider policy = alternate_k_policy(k, 0, 1, 2);
    FiniteRun run = generate_run(goal.plant(), policy, 600, 0);
    double expected = 1.0 / (1.0 - gamma) - std::pow(gamma, 2 * k);
    CHECK(run_reward(run, goal.rewards) == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("policy value agrees with truncated run rewards") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    RandomPlant rp = random_plant(rng, 6, 0.9);
    StationaryPolicy policy;
    for (int s = 0; s < rp.plant.num_states(); ++s) {
      policy.action.push_back(static_cast<int>(rng.below(2)));
    }
    double exact = stationary_policy_value(rp.plant, policy, rp.rewards);
    for (int horizon : {50, 200}) {
      FiniteRun run = generate_run(rp.plant, StationaryDecider(policy, 2), horizon, 0);
      double truncated = run_reward(run, rp.rewards);
      double bound = std::pow(0.9, horizon) * rp.rewards.max_abs_reward() / 0.1;
      CHECK(std::abs(exact - truncated) <= bound + 1e-12);
    }
  }
}

TEST_CASE("cylinder probabilities multiply along the prefix") {
  PlantFile right = builtin_plant("fig2-right");
  const Plant& plant = right.plant();
  StationaryPolicy always_u{{1, 1, 1}};
  StationaryDecider decider(always_u, 2);

  FiniteRun agreeing{{0, 1, 0}, {1, 1}};
  CHECK(cylinder_probability(plant, decider, agreeing) == 1.0);

  FiniteRun disagreeing{{0, 0}, {0}};  // policy would play U, run says S
  CHECK(cylinder_probability(plant, decider, disagreeing) == 0.0);

  UniformDecider uniform(2);
  FiniteRun three{{0, 1, 0, 1}, {1, 1, 1}};
  CHECK(cylinder_probability(plant, uniform, three) == doctest::Approx(0.125));

  // inconsistent transition: probability 0, not an error
  FiniteRun wrong{{0, 2}, {1}};
  CHECK(cylinder_probability(plant, uniform, wrong) == 0.0);

  CHECK_THROWS_AS(cylinder_probability(plant, uniform, FiniteRun{{1, 0}, {1}}),
                  PreconditionError);
}

TEST_CASE("cylinder probability is non-increasing in prefix length") {
  PlantFile right = builtin_plant("fig2-right");
  Mdp mdp = to_mdp(right.plant());
  UniformDecider uniform(2);
  FiniteRun run = generate_run(mdp, uniform, 12, 5);
  double previous = 1.0;
  for (int len = 0; len <= run.length(); ++len) {
    FiniteRun prefix{{run.states.begin(), run.states.begin() + len + 1},
                     {run.actions.begin(), run.actions.begin() + len}};
    double p = cylinder_probability(mdp, uniform, prefix);
    CHECK(p <= previous + 1e-15);
    previous = p;
  }
}

TEST_CASE("unique run of a stationary policy has probability 1") {
  SplitMix64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    RandomPlant rp = random_plant(rng, 6, 0.9);
    StationaryPolicy policy;
    for (int s = 0; s < rp.plant.num_states(); ++s) {
      policy.action.push_back(static_cast<int>(rng.below(2)));
    }
    StationaryDecider decider(policy, 2);
    FiniteRun run = generate_run(rp.plant, decider, rp.plant.num_states(), 0);
    CHECK(cylinder_probability(rp.plant, decider, run) == 1.0);
  }
}

TEST_CASE("is_safe_policy matches the lookahead counterexamples") {
  PlantFile left = builtin_plant("fig2-left");
  StationaryPolicy always_s{{0, 0, 0}};
  CHECK(is_safe_policy(left.plant(), always_s, left.unsafe));
  StationaryPolicy lookahead = safe_set_lookahead_policy(left.plant(), left.unsafe);
  CHECK_FALSE(is_safe_policy(left.plant(), lookahead, left.unsafe));

  PlantFile right = builtin_plant("fig2-right");
  StationaryPolicy always_u{{1, 1, 1}};
  CHECK(is_safe_policy(right.plant(), always_u, right.unsafe));
}

TEST_CASE("is_safe_policy equals brute-force simulation on random plants") {
  SplitMix64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    RandomPlant rp = random_plant(rng, 6, 0.9);
    const int n = rp.plant.num_states();
    StationaryPolicy policy;
    policy.action.assign(n, 0);
    int total = 1 << n;
    for (int bits = 0; bits < total; ++bits) {
      for (int s = 0; s < n; ++s) policy.action[s] = (bits >> s) & 1;
      bool expected = true;
      int q = rp.plant.initial;
      for (int i = 0; i <= n; ++i) {
        if (rp.unsafe.contains(q)) expected = false;
        q = rp.plant.step(q, policy.at(q));
      }
      CHECK(is_safe_policy(rp.plant, policy, rp.unsafe) == expected);
    }
  }
}

TEST_CASE("mdp safety is support reachability") {
  // From q0, action 0 reaches q1 with probability 0.5; q1 is unsafe.
  Mdp mdp;
  mdp.state_names = {"q0", "q1"};
  mdp.action_names = {"S", "U"};
  mdp.initial = 0;
  mdp.rows = {{{0, 0.5}, {1, 0.5}}, {{0, 1.0}}, {{1, 1.0}}, {{1, 1.0}}};
  mdp.validate();
  UnsafeSet unsafe(2);
  unsafe.add(1);
  CHECK_FALSE(is_safe_policy(mdp, StationaryPolicy{{0, 0}}, unsafe));
  CHECK(is_safe_policy(mdp, StationaryPolicy{{1, 1}}, unsafe));
}

TEST_CASE("plant json round trip and validation") {
  const char* text = R"({
    "states": ["a", "b"],
    "initial": "a",
    "actions": ["S", "U"],
    "transitions": [["a","S","a"],["a","U","b"],["b","S","a"],["b","U","b"]],
    "unsafe": ["b"],
    "reward": [["a","U",1.0]],
    "gamma": 0.8
  })";
  PlantFile pf = parse_plant_json(text);
  CHECK_FALSE(pf.is_mdp());
  CHECK(pf.plant().num_states() == 2);
  CHECK(pf.plant().step(0, 1) == 1);
  CHECK(pf.unsafe.contains(1));
  CHECK(pf.rewards.at(0, 1) == 1.0);
  CHECK(pf.rewards.gamma == 0.8);

  const char* missing = R"({
    "states": ["a", "b"],
    "initial": "a",
    "actions": ["S", "U"],
    "transitions": [["a","S","a"]]
  })";
  CHECK_THROWS_AS(parse_plant_json(missing), ConfigError);

  const char* probabilistic = R"({
    "states": ["a", "b"],
    "initial": "a",
    "actions": ["S", "U"],
    "transitions": [["a","S",{"a":0.5,"b":0.5}],["a","U","b"],
                    ["b","S","a"],["b","U","b"]],
    "gamma": 0.9
  })";
  PlantFile mdp_file = parse_plant_json(probabilistic);
  CHECK(mdp_file.is_mdp());
  CHECK(mdp_file.mdp().min_positive_prob() == 0.5);

  const char* bad_dist = R"({
    "states": ["a"],
    "initial": "a",
    "actions": ["S"],
    "transitions": [["a","S",{"a":0.7}]]
  })";
  CHECK_THROWS_AS(parse_plant_json(bad_dist), ConfigError);
}
