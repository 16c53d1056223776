// Copyright 2026 The hasplan Authors
// SPDX-License-Identifier: Apache-2.0
//
// hasplan run            fly a scenario for one or more seeds and export records
// hasplan compare A B    tabulate aggregate metrics of two run directories
// hasplan show-scenario  print a built-in scenario file

#include <CLI11.hpp>

#include <iostream>

#include "hasplan/cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace hasplan;
  CLI::App app{"Angular-search local planner: simulation and batch experiments"};
  app.require_subcommand(1);

  cli::RunSpec spec;
  std::uint64_t seed = 0;
  auto* run = app.add_subcommand("run", "Fly a scenario and write per-run and aggregate records");
  run->add_option("--scenario", spec.scenario, "Built-in scenario name or scenario file path")->capture_default_str();
  run->add_option("--config", spec.config_path, "Planner config file (key = value)");
  auto* seed_opt = run->add_option("--seed", seed, "First seed (default: the scenario's seed)");
  run->add_option("--reps", spec.reps, "Repetitions with consecutive seeds")->capture_default_str();
  run->add_option("--out", spec.out_dir, "Output directory")->capture_default_str();
  run->add_flag("--no-heuristic", spec.no_heuristic, "Always seed the search with the goal direction");
  run->add_flag("--no-sparsify", spec.no_sparsify, "Collision-check against every map point");
  run->add_option("--param", spec.params, "Override a config field, key=value (repeatable)");
  run->add_flag("--dump-clouds", spec.dump_clouds, "Also write the final step's intermediate clouds");
  run->add_option("--jobs", spec.jobs, "Parallel flights (0: all cores)")->capture_default_str();

  std::string baseline, ablation;
  auto* compare = app.add_subcommand("compare", "Compare aggregate metrics of two run directories");
  compare->add_option("baseline", baseline, "Baseline run directory")->required();
  compare->add_option("ablation", ablation, "Ablation run directory")->required();

  std::string scenario_name;
  auto* show = app.add_subcommand("show-scenario", "Print a built-in scenario");
  show->add_option("name", scenario_name, "Scenario name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitBadInput;
  }

  if (*run) {
    if (*seed_opt) spec.seed = seed;
    return cli::cmd_run(spec);
  }
  if (*compare) return cli::cmd_compare(baseline, ablation);
  if (*show) return cli::cmd_show_scenario(scenario_name);
  return cli::kExitBadInput;
}
