// Command-line surface for the runtime-assurance toolkit: Theorem-style
// synthesis on discrete plants, recoverable sets, tabular training, episode
// evaluation under the different switching deciders, and the built-in
// counterexample demos.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "rta/errors.hpp"
#include "rta/eval.hpp"
#include "rta/lookahead.hpp"
#include "rta/plant_io.hpp"
#include "rta/solver.hpp"
#include "rta/tabular_q.hpp"

namespace {

using namespace rta;

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << text;
}

int run_synthesize(const std::string& plant_path, double gamma_override,
                   const std::string& out_path) {
  PlantFile pf = load_plant(plant_path);
  if (gamma_override > 0.0) pf.rewards.gamma = gamma_override;
  SynthesisResult result;
  if (pf.is_mdp()) {
    result = synthesize_safe_optimal(pf.mdp(), pf.rewards, pf.unsafe);
  } else {
    result = synthesize_safe_optimal(pf.plant(), pf.rewards, pf.unsafe);
  }
  std::string payload = policy_file_json(pf, result);
  if (out_path.empty()) {
    std::cout << payload;
  } else {
    write_text(out_path, payload);
  }
  std::cout << "verdict: " << to_string(result.verdict)
            << "  value: " << result.unshaped_value << "  penalty: " << result.penalty
            << "\n";
  return 0;
}

int run_recoverable(const std::string& plant_path) {
  PlantFile pf = load_plant(plant_path);
  if (pf.is_mdp()) {
    throw ConfigError("recoverable sets are defined for deterministic plants");
  }
  RecoverableSet r = recoverable_set(pf.plant(), pf.unsafe);
  std::cout << "largest recoverable set ({";
  bool first = true;
  for (int s = 0; s < pf.plant().num_states(); ++s) {
    if (!r.contains(s)) continue;
    std::cout << (first ? "" : ", ") << pf.plant().state_names[s];
    first = false;
  }
  std::cout << "}), " << r.count() << " of " << pf.plant().num_states()
            << " states, fixpoint after " << r.iterations_to_fixpoint << " sweeps\n";
  std::cout << "initial state " << (r.contains(pf.plant().initial) ? "inside" : "outside")
            << "\n";
  return 0;
}

int run_train(const std::string& config_path, int episodes, uint64_t seed,
              const std::string& out_path) {
  ScenarioConfig cfg = load_scenario(config_path);
  QTable qt = train_scenario(cfg, Hyperparams{}, episodes, seed);
  save_qtable(qt, out_path);
  long long violations = 0;
  for (uint8_t v : qt.episode_violations) violations += v;
  std::cout << "trained " << episodes << " episodes on " << to_string(cfg.kind)
            << " (training violations: " << violations << ")\n";
  std::cout << "table written to " << out_path << "\n";
  return 0;
}

int run_evaluate(const std::string& config_path, const std::string& rta_name,
                 const std::string& table_path, const std::string& check_set,
                 int episodes, uint64_t seed, const std::string& report_path,
                 const std::string& export_dir) {
  ScenarioConfig cfg = load_scenario(config_path);
  auto rta = rta_kind_from_string(rta_name);
  if (!rta) throw ConfigError("unknown rta tag: " + rta_name);
  if (!check_set.empty()) {
    if (check_set == "safe") {
      cfg.lookahead.check_set = CheckSet::kSafeSet;
    } else if (check_set == "recoverable") {
      cfg.lookahead.check_set = CheckSet::kAccRecoverable;
    } else {
      throw ConfigError("unknown check set: " + check_set);
    }
    cfg.validate();
  }
  QTable table;
  const QTable* table_ptr = nullptr;
  if (*rta == RtaKind::kQTable) {
    if (table_path.empty()) throw ConfigError("--table is required for the qtable rta");
    table = load_qtable(table_path);
    table_ptr = &table;
  }
  std::vector<EpisodeRecord> records;
  std::vector<EpisodeRecord>* records_ptr = export_dir.empty() ? nullptr : &records;
  Report report = evaluate(cfg, *rta, episodes, seed, table_ptr, records_ptr);
  if (!report_path.empty()) write_text(report_path, report_json(report));
  if (!export_dir.empty()) {
    std::filesystem::create_directories(export_dir);
    for (size_t i = 0; i < records.size(); ++i) {
      char name[64];
      std::snprintf(name, sizeof(name), "episode_%04zu.csv", i);
      export_trajectory(records[i], cfg, export_dir + "/" + name);
    }
  }
  std::printf("%s on %s: U%%=%.2f  mean_dist=%.2f  mean_ttc=%.3fs  rt=%.4fms  Fail%%=%.1f\n",
              to_string(*rta), to_string(cfg.kind), report.mean_u_pct, report.mean_dist,
              report.mean_ttc_s, report.mean_rt_ms, report.fail_pct);
  return 0;
}

void demo_fig2_left() {
  PlantFile pf = builtin_plant("fig2-left");
  const Plant& plant = pf.plant();
  std::cout << "fig2-left: the safe-set lookahead policy is not safe.\n";
  StationaryPolicy lookahead = safe_set_lookahead_policy(plant, pf.unsafe);
  FiniteRun run = generate_run(plant, StationaryDecider(lookahead, 2), 2, 0);
  std::cout << "  lookahead run: ";
  for (int i = 0; i < run.length(); ++i) {
    std::cout << plant.state_names[run.states[i]] << " -"
              << plant.action_names[run.actions[i]] << "-> ";
  }
  std::cout << plant.state_names[run.last_state()] << "  (unsafe at step 2)\n";
  std::cout << "  is_safe_policy(lookahead) = "
            << (is_safe_policy(plant, lookahead, pf.unsafe) ? "true" : "false") << "\n";
  SynthesisResult synth = synthesize_safe_optimal(plant, pf.rewards, pf.unsafe);
  std::cout << "  shaped synthesis: verdict " << to_string(synth.verdict)
            << ", best safe value " << synth.unshaped_value
            << " (always-S at q0; U is never worth the doom)\n";
}

void demo_fig2_right() {
  PlantFile pf = builtin_plant("fig2-right");
  const Plant& plant = pf.plant();
  std::cout << "fig2-right: recoverable-set switching is safe but suboptimal.\n";
  RecoverableSet r = recoverable_set(plant, pf.unsafe);
  std::cout << "  largest recoverable set: {";
  for (int s = 0; s < plant.num_states(); ++s) {
    if (r.contains(s)) std::cout << plant.state_names[s];
  }
  std::cout << "}\n";
  StationaryPolicy pi_r = lookahead_policy(plant, r.member);
  std::cout << "  value(pi_R) = " << stationary_policy_value(plant, pi_r, pf.rewards)
            << " (safe, never uses U from q0)\n";
  StationaryPolicy always_u{{1, 1, 1}};
  std::cout << "  value(always-U) = "
            << stationary_policy_value(plant, always_u, pf.rewards)
            << " = 1/(1-gamma), also safe\n";
  SynthesisResult synth = synthesize_safe_optimal(plant, pf.rewards, pf.unsafe);
  std::cout << "  shaped synthesis: verdict " << to_string(synth.verdict) << ", value "
            << synth.unshaped_value << ", policy(q0) = "
            << plant.action_names[synth.policy.at(0)] << "\n";
}

void demo_sec6() {
  PlantFile pf = builtin_plant("sec6-goal");
  const Plant& plant = pf.plant();
  const double gamma = pf.rewards.gamma;
  std::cout << "sec6-goal: no optimal policy under a hard reachability constraint.\n";
  std::cout << "  reward 1 per U step; policies must reach qg.\n";
  for (int k = 1; k <= 5; ++k) {
    FunctionalDecider policy = alternate_k_policy(k, 0, 1, 2);
    FiniteRun run = generate_run(plant, policy, 600, 0);
    std::cout << "  alternate-" << k << " reward = " << run_reward(run, pf.rewards)
              << "  (formula " << 1.0 / (1.0 - gamma) - std::pow(gamma, 2 * k) << ")\n";
  }
  std::cout << "  supremum over goal-reaching policies = " << 1.0 / (1.0 - gamma)
            << ", approached but never attained.\n";
  // Under the visit-reward variant (reward only at qr), every stationary
  // policy that surely reaches qg earns exactly 0.
  RewardStructure visit;
  visit.num_actions = 2;
  visit.gamma = gamma;
  visit.r = {0, 0, 0, 0, 1, 1};
  int goal = *plant.state_index("qg");
  double best_goal_reaching = 0.0;
  StationaryPolicy policy{{0, 0, 0}};
  for (int bits = 0; bits < 8; ++bits) {
    policy.action = {bits & 1, (bits >> 1) & 1, (bits >> 2) & 1};
    FiniteRun run = generate_run(plant, StationaryDecider(policy, 2), 6, 0);
    bool reaches = false;
    for (int s : run.states) reaches = reaches || s == goal;
    if (reaches) {
      best_goal_reaching =
          std::max(best_goal_reaching, stationary_policy_value(plant, policy, visit));
    }
  }
  std::cout << "  best goal-reaching stationary policy under the visit reward: "
            << best_goal_reaching << "\n";
}

int run_demo(const std::string& fixture) {
  if (fixture == "fig2-left") {
    demo_fig2_left();
  } else if (fixture == "fig2-right") {
    demo_fig2_right();
  } else if (fixture == "sec6-goal") {
    demo_sec6();
  } else {
    throw ConfigError("unknown fixture: " + fixture);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"runtime assurance synthesis and evaluation toolkit"};
  app.require_subcommand(1);

  auto* synth = app.add_subcommand("synthesize", "safe-optimal policy for a plant file");
  std::string plant_path, out_path;
  double gamma_override = -1.0;
  synth->add_option("--plant", plant_path, "plant file or builtin fixture")->required();
  synth->add_option("--gamma", gamma_override, "override the discount factor");
  synth->add_option("--out", out_path, "policy output file (default: stdout)");

  auto* recov = app.add_subcommand("recoverable", "largest recoverable set of a plant");
  std::string recov_plant;
  recov->add_option("--plant", recov_plant, "plant file or builtin fixture")->required();

  auto* train = app.add_subcommand("train", "tabular Q-learning on a scenario");
  std::string train_config, train_out;
  int train_episodes = 20000;
  uint64_t train_seed = 1;
  train->add_option("--config", train_config, "scenario config or fixture")->required();
  train->add_option("--episodes", train_episodes, "training episodes");
  train->add_option("--seed", train_seed, "training seed");
  train->add_option("--out", train_out, "q-table output file")->required();

  auto* eval = app.add_subcommand("evaluate", "run episodes under a switching decider");
  std::string eval_config, eval_rta, eval_table, eval_check, eval_report, eval_export;
  int eval_episodes = 100;
  uint64_t eval_seed = 1;
  eval->add_option("--config", eval_config, "scenario config or fixture")->required();
  eval->add_option("--rta", eval_rta, "sim|reach|qtable|always_s|always_u")->required();
  eval->add_option("--table", eval_table, "q-table file (qtable rta)");
  eval->add_option("--check-set", eval_check, "safe|recoverable (lookahead deciders)");
  eval->add_option("--episodes", eval_episodes, "episode count");
  eval->add_option("--seed", eval_seed, "master seed");
  eval->add_option("--report", eval_report, "report JSON output path");
  eval->add_option("--export-dir", eval_export, "directory for trajectory CSVs");

  auto* demo = app.add_subcommand("demo", "counterexample walkthroughs");
  std::string demo_fixture;
  demo->add_option("--fixture", demo_fixture, "fig2-left|fig2-right|sec6-goal")
      ->required();

  try {
    app.parse(argc, argv);
    if (synth->parsed()) return run_synthesize(plant_path, gamma_override, out_path);
    if (recov->parsed()) return run_recoverable(recov_plant);
    if (train->parsed()) return run_train(train_config, train_episodes, train_seed, train_out);
    if (eval->parsed()) {
      return run_evaluate(eval_config, eval_rta, eval_table, eval_check, eval_episodes,
                          eval_seed, eval_report, eval_export);
    }
    if (demo->parsed()) return run_demo(demo_fixture);
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition error: " << e.what() << "\n";
    return 3;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
