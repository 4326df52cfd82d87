#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "rta/plant_io.hpp"
#include "rta/solver.hpp"
#include "rta/tabular_q.hpp"

using namespace rta;

namespace {

QTable train_fixture_plant(const PlantFile& pf, int episodes) {
  ShapedReward shaped = shape(pf.rewards, pf.unsafe, pf.plant().num_states());
  std::vector<double> table = shaped.table(pf.plant().num_states());
  Hyperparams hp;
  return train_plant(pf.plant(), table, pf.rewards.gamma, hp, episodes, 40, 17);
}

}  // namespace

TEST_CASE("plant-mode training recovers the exact solver on fig2-right") {
  PlantFile pf = builtin_plant("fig2-right");
  QTable qt = train_fixture_plant(pf, 10000);
  CHECK(qt.decide_cell(0) == 1);  // always-U
  CHECK(qt.decide_cell(1) == 1);
  CHECK(std::abs(qt.q[0 * 2 + 1] - 10.0) < 0.1);  // q(q0, U) -> 10
}

TEST_CASE("plant-mode training learns to avoid the doomed branch on fig2-left") {
  PlantFile pf = builtin_plant("fig2-left");
  QTable qt = train_fixture_plant(pf, 10000);
  CHECK(qt.decide_cell(0) == 0);  // S at q0
}

TEST_CASE("training matches solver policy and values on all fixture plants") {
  for (const char* name : {"fig2-left", "fig2-right", "sec6-goal"}) {
    CAPTURE(name);
    PlantFile pf = builtin_plant(name);
    const int n = pf.plant().num_states();
    SynthesisResult exact = synthesize_safe_optimal(pf.plant(), pf.rewards, pf.unsafe);
    ShapedReward shaped = shape(pf.rewards, pf.unsafe, n);
    std::vector<double> table = shaped.table(n);
    ValueFunction vf = value_iteration(pf.plant(), table, pf.rewards.gamma, 1e-10);

    QTable qt = train_fixture_plant(pf, 10000);
    for (int s = 0; s < n; ++s) {
      // the trained greedy action must be exactly optimal (ties allowed)
      int chosen = qt.decide_cell(s);
      CHECK(vf.q[s * 2 + chosen] == doctest::Approx(vf.v[s]).epsilon(1e-9));
      CHECK(std::abs(qt.max_q(s) - vf.v[s]) < 0.1);
    }
    // and where the optimum is unique, it matches the extracted policy
    for (int s = 0; s < n; ++s) {
      if (std::abs(vf.q[s * 2] - vf.q[s * 2 + 1]) > 1e-6) {
        CHECK(qt.decide_cell(s) == exact.policy.at(s));
      }
    }
  }
}

TEST_CASE("greedy decisions prefer U on ties and unvisited cells") {
  QTable qt;
  qt.quantizer = Quantizer{{{0.0, 1.0, 2}}};
  qt.num_actions = 2;
  qt.u_action = 1;
  qt.q = {0.5, 0.2, 0.0, 0.0};
  qt.visits = {1, 1, 0, 0};
  CHECK(qt.decide_cell(0) == 0);  // strictly better S
  CHECK(qt.decide_cell(1) == 1);  // untouched row: tie goes to U
  qt.q[0] = 0.2;                  // exact tie
  CHECK(qt.decide_cell(0) == 1);
}

TEST_CASE("identical seed and config give bitwise-identical tables") {
  ScenarioConfig cfg = scenario_fixture("acc-var1");
  Hyperparams hp;
  QTable a = train_scenario(cfg, hp, 300, 99);
  QTable b = train_scenario(cfg, hp, 300, 99);
  CHECK(a.q == b.q);
  CHECK(a.visits == b.visits);
  CHECK(a.episode_returns == b.episode_returns);
  QTable c = train_scenario(cfg, hp, 300, 100);
  CHECK(a.q != c.q);
}

TEST_CASE("scenario training reduces violations over time") {
  ScenarioConfig cfg = scenario_fixture("acc-var1");
  Hyperparams hp;
  QTable qt = train_scenario(cfg, hp, 3000, 7);
  REQUIRE(qt.episode_violations.size() == 3000);
  int early = 0, late = 0;
  for (int i = 0; i < 500; ++i) early += qt.episode_violations[i];
  for (int i = 2500; i < 3000; ++i) late += qt.episode_violations[i];
  CHECK(late <= early);
  // the greedy policy off a short training run should already avoid most
  // violations; the acceptance suite tests the full-budget claim
}

TEST_CASE("q-table files round trip bitwise") {
  ScenarioConfig cfg = scenario_fixture("acc-var1");
  QTable qt = train_scenario(cfg, Hyperparams{}, 100, 5);
  std::string path = "qtable_roundtrip_test.json";
  save_qtable(qt, path);
  QTable back = load_qtable(path);
  CHECK(back.q == qt.q);
  CHECK(back.visits == qt.visits);
  CHECK(back.gamma == qt.gamma);
  CHECK(back.seed == qt.seed);
  CHECK(back.quantizer.dims.size() == qt.quantizer.dims.size());
  CHECK(back.u_action == qt.u_action);
  std::remove(path.c_str());
}

TEST_CASE("safety transfer across variations is reported, not asserted") {
  ScenarioConfig train_cfg = scenario_fixture("acc-var1");
  QTable qt = train_scenario(train_cfg, Hyperparams{}, 2000, 11);
  for (const char* name : {"acc-var2", "acc-var3"}) {
    ScenarioConfig eval_cfg = scenario_fixture(name);
    SplitMix64 rng(31);
    int violations = 0;
    for (int ep = 0; ep < 20; ++ep) {
      ScenarioState state = reset_randomized(eval_cfg, rng);
      while (!state.done) {
        std::vector<int> actions{
            qt.decide(observation(eval_cfg, state.leader, state.followers, 0))};
        env_step(eval_cfg, state, actions);
      }
      violations += state.violation ? 1 : 0;
    }
    // qualitative target from the study this mirrors; logged for inspection
    MESSAGE(name << ": " << violations << "/20 transfer violations");
  }
}
