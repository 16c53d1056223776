// Copyright 2026 The hasplan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Batch runner and the command implementations behind tools/hasplan.
// Exit codes: 0 success, 1 internal error, 2 bad input, 3 config rejected
// by the d_max safety gate.

#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "hasplan/planner/config.hpp"
#include "hasplan/sim/catalog.hpp"
#include "hasplan/sim/metrics.hpp"
#include "hasplan/sim/simulator.hpp"

namespace hasplan::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitBadInput = 2;
inline constexpr int kExitSafety = 3;

struct RunSpec {
  std::string scenario = "simple_forward";  // catalogue name or file path
  std::string config_path;                  // empty: defaults
  std::optional<std::uint64_t> seed;        // default: the scenario's seed
  int reps = 1;
  std::string out_dir = "runs";
  bool no_heuristic = false;
  bool no_sparsify = false;
  std::vector<std::string> params;  // key=value overrides
  bool dump_clouds = false;
  int jobs = 0;  // 0: hardware concurrency
};

/// Catalogue name first, then a scenario file.
inline sim::Scenario resolve_scenario(const std::string& name_or_path) {
  if (sim::catalog_text_for(name_or_path)) return sim::builtin_scenario(name_or_path);
  if (!std::filesystem::exists(name_or_path)) {
    throw InvalidInput("'" + name_or_path + "' is neither a built-in scenario nor a readable file");
  }
  return sim::load_scenario_file(name_or_path);
}

/// Config from file + overrides + ablation flags, then validated.
inline PlannerConfig resolve_config(const RunSpec& spec) {
  PlannerConfig c = spec.config_path.empty() ? PlannerConfig{} : load_config(spec.config_path);
  for (const auto& p : spec.params) apply_config_assignment(c, p);
  if (spec.no_heuristic) c.use_heuristic = false;
  if (spec.no_sparsify) c.use_sparsify = false;
  validate(c);
  return c;
}

struct BatchRun {
  sim::RunRecord record;
  sim::RunSummary summary;
};

/// Flies seeds seed0 .. seed0+reps-1 on up to `jobs` threads. Results are
/// returned in seed order regardless of scheduling.
inline std::vector<BatchRun> run_batch(const sim::Scenario& scene, const PlannerConfig& config,
                                       std::uint64_t seed0, int reps, int jobs = 0,
                                       const sim::FlightOptions& opts = {}) {
  if (reps < 1) throw InvalidInput("repetitions must be >= 1");
  std::vector<BatchRun> runs(static_cast<std::size_t>(reps));
  const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const int workers = std::clamp(jobs > 0 ? jobs : hw, 1, reps);
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (int k = next++; k < reps; k = next++) {
      try {
        auto& r = runs[static_cast<std::size_t>(k)];
        r.record = sim::run_flight(scene, config, seed0 + static_cast<std::uint64_t>(k), opts);
        r.summary = sim::compute_metrics(r.record, scene, config.m_max_iters + 1);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return runs;
}

struct Aggregate {
  std::size_t runs = 0;
  std::size_t goal_reached = 0, failed = 0, step_limit = 0;
  double success_rate = 0.0;
  double pl_factor_mean = 0.0, pl_factor_std = 0.0;  // over runs that reached the goal
  std::size_t total_steps = 0, searched_steps = 0;
  double mean_rings = 0.0;      // over all searched steps
  double frac_rings_le3 = 0.0;  // over all searched steps
  double mean_pcl3 = 0.0, mean_pcl5 = 0.0;  // over all steps
  long penetrations = 0;
  long speed_violations = 0;
  double min_clearance = kInf;
  std::size_t ld_shrink_runs = 0, backtrack_runs = 0;
  std::size_t ld_shrink_steps = 0, backtrack_steps = 0;
  // Timing, ms per step over all steps.
  double step_ms_mean = 0.0;
  std::array<double, 8> phase_ms_mean{};
};

inline Aggregate aggregate(const std::vector<BatchRun>& runs) {
  Aggregate a;
  a.runs = runs.size();
  std::vector<double> pls;
  double rings_sum = 0.0, le3 = 0.0, pcl3 = 0.0, pcl5 = 0.0;
  std::array<double, 8> phase_sum{};
  for (const auto& r : runs) {
    const sim::RunSummary& s = r.summary;
    switch (s.status) {
      case sim::FlightStatus::kGoalReached: ++a.goal_reached; pls.push_back(s.pl_factor); break;
      case sim::FlightStatus::kFailed: ++a.failed; break;
      case sim::FlightStatus::kStepLimit: ++a.step_limit; break;
    }
    a.total_steps += s.steps;
    a.searched_steps += s.searched_steps;
    rings_sum += s.mean_rings * static_cast<double>(s.searched_steps);
    le3 += s.frac_rings_le3 * static_cast<double>(s.searched_steps);
    pcl3 += s.mean_pcl3 * static_cast<double>(s.steps);
    pcl5 += s.mean_pcl5 * static_cast<double>(s.steps);
    a.penetrations += s.penetrations;
    a.speed_violations += s.speed_violations;
    a.min_clearance = std::min(a.min_clearance, s.min_clearance);
    a.ld_shrink_runs += s.ld_shrink_steps > 0;
    a.backtrack_runs += s.backtrack_steps > 0;
    a.ld_shrink_steps += s.ld_shrink_steps;
    a.backtrack_steps += s.backtrack_steps;
    for (std::size_t p = 0; p < phase_sum.size(); ++p) {
      phase_sum[p] += s.timing[p].mean * static_cast<double>(s.steps);
    }
  }
  if (a.runs) a.success_rate = static_cast<double>(a.goal_reached) / static_cast<double>(a.runs);
  if (!pls.empty()) {
    for (double v : pls) a.pl_factor_mean += v;
    a.pl_factor_mean /= static_cast<double>(pls.size());
    for (double v : pls) a.pl_factor_std += (v - a.pl_factor_mean) * (v - a.pl_factor_mean);
    a.pl_factor_std = std::sqrt(a.pl_factor_std / static_cast<double>(pls.size()));
  }
  if (a.searched_steps) {
    a.mean_rings = rings_sum / static_cast<double>(a.searched_steps);
    a.frac_rings_le3 = le3 / static_cast<double>(a.searched_steps);
  }
  if (a.total_steps) {
    const double n = static_cast<double>(a.total_steps);
    a.mean_pcl3 = pcl3 / n;
    a.mean_pcl5 = pcl5 / n;
    for (std::size_t p = 0; p < phase_sum.size(); ++p) a.phase_ms_mean[p] = phase_sum[p] / n;
    a.step_ms_mean = a.phase_ms_mean[7];
  }
  return a;
}

inline void write_aggregate(std::ostream& os, const std::string& scenario, const PlannerConfig& c,
                            const Aggregate& a) {
  using sim::fmt_num;
  os << "scenario=" << scenario << '\n';
  os << "heuristic=" << (c.use_heuristic ? "on" : "off") << '\n';
  os << "sparsify=" << (c.use_sparsify ? "on" : "off") << '\n';
  os << "runs=" << a.runs << '\n';
  os << "goal_reached=" << a.goal_reached << '\n';
  os << "failed=" << a.failed << '\n';
  os << "step_limit=" << a.step_limit << '\n';
  os << "success_rate=" << fmt_num(a.success_rate) << '\n';
  os << "pl_factor_mean=" << fmt_num(a.pl_factor_mean) << '\n';
  os << "pl_factor_std=" << fmt_num(a.pl_factor_std) << '\n';
  os << "total_steps=" << a.total_steps << '\n';
  os << "searched_steps=" << a.searched_steps << '\n';
  os << "mean_rings=" << fmt_num(a.mean_rings) << '\n';
  os << "frac_rings_le3=" << fmt_num(a.frac_rings_le3) << '\n';
  os << "mean_pcl3=" << fmt_num(a.mean_pcl3) << '\n';
  os << "mean_pcl5=" << fmt_num(a.mean_pcl5) << '\n';
  os << "penetrations=" << a.penetrations << '\n';
  os << "speed_violations=" << a.speed_violations << '\n';
  os << "min_clearance=" << fmt_num(a.min_clearance) << '\n';
  os << "ld_shrink_runs=" << a.ld_shrink_runs << '\n';
  os << "backtrack_runs=" << a.backtrack_runs << '\n';
  os << "ld_shrink_steps=" << a.ld_shrink_steps << '\n';
  os << "backtrack_steps=" << a.backtrack_steps << '\n';
}

inline void write_aggregate_timing(std::ostream& os, const Aggregate& a) {
  os << "mean_step_ms=" << sim::fmt_num(a.step_ms_mean) << '\n';
  for (std::size_t p = 0; p < sim::kPhaseNames.size(); ++p) {
    os << sim::kPhaseNames[p] << "_ms_mean=" << sim::fmt_num(a.phase_ms_mean[p]) << '\n';
  }
}

inline std::string run_dir_name(std::uint64_t seed) { return "seed_" + std::to_string(seed); }

inline int cmd_run(const RunSpec& spec, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  sim::Scenario scene;
  PlannerConfig config;
  try {
    if (spec.reps < 1) throw InvalidInput("--reps must be >= 1");
    scene = resolve_scenario(spec.scenario);
    config = resolve_config(spec);
  } catch (const SafetyRejection& e) {
    err << "error: " << e.what() << '\n';
    return kExitSafety;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  }

  const std::filesystem::path root(spec.out_dir);
  try {
    std::filesystem::create_directories(root);
    std::ofstream probe(root / "config_used.txt");
    if (!probe) throw std::runtime_error("output directory " + root.string() + " is not writable");
    probe << format_config(config);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  }

  try {
    const std::uint64_t seed0 = spec.seed.value_or(scene.seed);
    sim::FlightOptions opts;
    opts.capture_final_clouds = spec.dump_clouds;
    const auto runs = run_batch(scene, config, seed0, spec.reps, spec.jobs, opts);
    for (const auto& r : runs) sim::export_run(root / run_dir_name(r.record.seed), r.record, r.summary);

    const Aggregate agg = aggregate(runs);
    {
      std::ofstream f(root / "aggregate.txt");
      write_aggregate(f, scene.name, config, agg);
    }
    {
      std::ofstream f(root / "aggregate_timing.txt");
      write_aggregate_timing(f, agg);
    }
    for (const auto& r : runs) {
      const auto& s = r.summary;
      out << scene.name << " seed " << r.record.seed << ": " << sim::to_string(s.status) << ", steps "
          << s.steps << ", PL " << sim::fmt_num(s.pl_factor) << ", penetrations " << s.penetrations << '\n';
    }
    out << "success " << agg.goal_reached << "/" << agg.runs << ", mean rings " << sim::fmt_num(agg.mean_rings)
        << ", mean |Pcl5| " << sim::fmt_num(agg.mean_pcl5) << ", mean step " << sim::fmt_num(agg.step_ms_mean)
        << " ms\n";
    out << "wrote " << root.string() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}

/// key=value file; '#' comments and blank lines skipped.
inline std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot read " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(is, line)) {
    const std::string t = hasplan::detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw InvalidInput(path.string() + ": malformed line '" + t + "'");
    kv[hasplan::detail::trim(t.substr(0, eq))] = hasplan::detail::trim(t.substr(eq + 1));
  }
  return kv;
}

inline const std::vector<std::string>& compared_keys() {
  static const std::vector<std::string> keys = {"mean_step_ms", "search_ms_mean", "mean_rings",     "frac_rings_le3",
                                                "mean_pcl5",    "mean_pcl3",      "pl_factor_mean", "success_rate",
                                                "penetrations"};
  return keys;
}

inline int cmd_compare(const std::string& baseline_dir, const std::string& ablation_dir,
                       std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::map<std::string, std::string> base, abl;
  try {
    for (auto [dir, dst] : {std::pair{&baseline_dir, &base}, std::pair{&ablation_dir, &abl}}) {
      const std::filesystem::path d(*dir);
      *dst = read_key_values(d / "aggregate.txt");
      for (auto& [k, v] : read_key_values(d / "aggregate_timing.txt")) (*dst)[k] = v;
    }
    if (base.at("scenario") != abl.at("scenario")) {
      throw InvalidInput("scenario mismatch: " + base.at("scenario") + " vs " + abl.at("scenario"));
    }
  } catch (const std::out_of_range&) {
    err << "error: aggregate file lacks the scenario key\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  }

  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-16s %14s %14s %14s\n", "metric", "baseline", "ablation", "delta");
  out << "scenario " << base["scenario"] << ": heuristic " << base["heuristic"] << "/" << abl["heuristic"]
      << ", sparsify " << base["sparsify"] << "/" << abl["sparsify"] << '\n'
      << buf;
  for (const auto& key : compared_keys()) {
    const auto b = base.find(key), a = abl.find(key);
    if (b == base.end() || a == abl.end()) {
      err << "error: metric '" << key << "' missing from one side\n";
      return kExitBadInput;
    }
    double vb = 0, va = 0;
    try {
      vb = hasplan::detail::parse_double(key, b->second);
      va = hasplan::detail::parse_double(key, a->second);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitBadInput;
    }
    std::snprintf(buf, sizeof(buf), "%-16s %14.6g %14.6g %+14.6g\n", key.c_str(), vb, va, va - vb);
    out << buf;
  }
  return kExitOk;
}

inline int cmd_show_scenario(const std::string& name, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  const auto text = sim::catalog_text_for(name);
  if (!text) {
    err << "error: unknown scenario '" << name << "'; built-ins:";
    for (const auto& e : sim::kCatalog) err << ' ' << e.name;
    err << '\n';
    return kExitBadInput;
  }
  out << *text;
  return kExitOk;
}

}  // namespace hasplan::cli
