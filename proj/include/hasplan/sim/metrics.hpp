// Copyright 2026 The hasplan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Run summaries and the per-run export files:
//   trajectory.txt  positions, point-cloud text format
//   metrics.txt     key=value summary (deterministic)
//   steps.txt       one line per replanning step (deterministic)
//   timing.txt      wall-clock phase statistics, kept apart from the rest

#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "hasplan/point_cloud.hpp"
#include "hasplan/sim/simulator.hpp"

namespace hasplan::sim {

struct Stats {
  double mean = 0.0, median = 0.0, p95 = 0.0;
  std::size_t count = 0;
};

/// Mean, median and 95th percentile (nearest rank).
inline Stats compute_stats(std::vector<double> values) {
  Stats s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  const std::size_t n = values.size();
  s.median = n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  s.p95 = values[std::clamp<std::size_t>(rank, 1, n) - 1];
  return s;
}

inline constexpr std::array<const char*, 8> kPhaseNames = {"filter", "transform", "map", "sparsify",
                                                           "crop",   "search",    "motion", "total"};

inline std::array<double, 8> phase_values(const PhaseTimings& t) {
  return {t.filter_ms, t.transform_ms, t.map_ms, t.sparsify_ms, t.crop_ms, t.search_ms, t.motion_ms, t.total_ms};
}

struct RunSummary {
  FlightStatus status = FlightStatus::kStepLimit;
  std::size_t steps = 0;
  double path_length = 0.0;
  double pl_factor = 0.0;
  int penetrations = 0;
  double min_clearance = kInf;
  int speed_violations = 0;
  double final_goal_distance = 0.0;
  double flight_time = 0.0;

  // Ring histogram: bin 0 counts steps without a search.
  std::vector<std::size_t> rings_histogram;
  std::size_t searched_steps = 0;
  double mean_rings = 0.0;        // over searched steps
  double frac_rings_le3 = 0.0;    // over searched steps
  double mean_pcl3 = 0.0;
  double mean_pcl5 = 0.0;

  std::map<std::string, std::size_t> outcome_counts;
  std::size_t ld_shrink_steps = 0, vmax_cap_steps = 0, backtrack_steps = 0, infeasible_steps = 0, seeded_steps = 0;

  std::array<Stats, 8> timing;  // per phase, ms
};

inline RunSummary compute_metrics(const RunRecord& rec, const Scenario& scene, int max_rings = 10) {
  RunSummary s;
  s.status = rec.status;
  s.steps = rec.steps.size();
  s.path_length = rec.path_length;
  s.pl_factor = rec.pl_factor;
  s.penetrations = rec.penetrations;
  s.min_clearance = rec.min_clearance;
  s.speed_violations = rec.speed_violations;
  if (!rec.trajectory.empty()) {
    s.final_goal_distance = (rec.trajectory.back().position - scene.goal).norm();
    s.flight_time = rec.trajectory.back().time;
  }
  s.rings_histogram.assign(static_cast<std::size_t>(max_rings) + 1, 0);
  for (const char* k : {"advance", "retreat", "brake", "failed"}) s.outcome_counts[k] = 0;

  std::array<std::vector<double>, 8> phases;
  double rings_sum = 0.0, pcl3_sum = 0.0, pcl5_sum = 0.0;
  std::size_t le3 = 0;
  for (const StepRecord& st : rec.steps) {
    const StepDiagnostics& d = st.diag;
    const int bin = d.searched ? std::clamp(d.rings, 0, max_rings) : 0;
    ++s.rings_histogram[static_cast<std::size_t>(bin)];
    if (d.searched) {
      ++s.searched_steps;
      rings_sum += d.rings;
      if (d.rings <= 3) ++le3;
    }
    pcl3_sum += static_cast<double>(d.pcl3);
    pcl5_sum += static_cast<double>(d.pcl5);
    ++s.outcome_counts[to_string(st.kind)];
    s.ld_shrink_steps += d.ld_shrunk;
    s.vmax_cap_steps += d.vmax_capped;
    s.backtrack_steps += d.backtracked;
    s.infeasible_steps += d.motion_infeasible;
    s.seeded_steps += d.seeded_from_last;
    const auto v = phase_values(d.timings);
    for (std::size_t p = 0; p < v.size(); ++p) phases[p].push_back(v[p]);
  }
  if (s.searched_steps) {
    s.mean_rings = rings_sum / static_cast<double>(s.searched_steps);
    s.frac_rings_le3 = static_cast<double>(le3) / static_cast<double>(s.searched_steps);
  }
  if (s.steps) {
    s.mean_pcl3 = pcl3_sum / static_cast<double>(s.steps);
    s.mean_pcl5 = pcl5_sum / static_cast<double>(s.steps);
  }
  for (std::size_t p = 0; p < phases.size(); ++p) s.timing[p] = compute_stats(std::move(phases[p]));
  return s;
}

inline std::string fmt_num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

inline void write_metrics(std::ostream& os, const RunRecord& rec, const RunSummary& s) {
  os << "scenario=" << rec.scenario << '\n';
  os << "seed=" << rec.seed << '\n';
  os << "status=" << to_string(s.status) << '\n';
  os << "steps=" << s.steps << '\n';
  os << "flight_time=" << fmt_num(s.flight_time) << '\n';
  os << "path_length=" << fmt_num(s.path_length) << '\n';
  os << "pl_factor=" << fmt_num(s.pl_factor) << '\n';
  os << "final_goal_distance=" << fmt_num(s.final_goal_distance) << '\n';
  os << "penetrations=" << s.penetrations << '\n';
  os << "min_clearance=" << fmt_num(s.min_clearance) << '\n';
  os << "speed_violations=" << s.speed_violations << '\n';
  os << "searched_steps=" << s.searched_steps << '\n';
  os << "mean_rings=" << fmt_num(s.mean_rings) << '\n';
  os << "frac_rings_le3=" << fmt_num(s.frac_rings_le3) << '\n';
  os << "mean_pcl3=" << fmt_num(s.mean_pcl3) << '\n';
  os << "mean_pcl5=" << fmt_num(s.mean_pcl5) << '\n';
  for (const auto& [k, n] : s.outcome_counts) os << "outcome_" << k << '=' << n << '\n';
  os << "ld_shrink_steps=" << s.ld_shrink_steps << '\n';
  os << "vmax_shrink_steps=" << s.vmax_cap_steps << '\n';
  os << "backtrack_steps=" << s.backtrack_steps << '\n';
  os << "motion_infeasible_steps=" << s.infeasible_steps << '\n';
  os << "seeded_from_last_steps=" << s.seeded_steps << '\n';
  os << "rings_histogram=";
  for (std::size_t b = 0; b < s.rings_histogram.size(); ++b) os << (b ? "," : "") << s.rings_histogram[b];
  os << '\n';
}

inline void write_timing(std::ostream& os, const RunSummary& s) {
  for (std::size_t p = 0; p < kPhaseNames.size(); ++p) {
    os << kPhaseNames[p] << "_ms_mean=" << fmt_num(s.timing[p].mean) << '\n';
    os << kPhaseNames[p] << "_ms_median=" << fmt_num(s.timing[p].median) << '\n';
    os << kPhaseNames[p] << "_ms_p95=" << fmt_num(s.timing[p].p95) << '\n';
  }
}

inline void write_steps(std::ostream& os, const RunRecord& rec) {
  os << "# step time x y z vx vy vz outcome rings checked pcl1 pcl2 pcl3 pcl4 pcl5 d_min l_d v_max flags\n";
  char buf[512];
  for (std::size_t k = 0; k < rec.steps.size(); ++k) {
    const StepRecord& st = rec.steps[k];
    const StepDiagnostics& d = st.diag;
    std::string flags;
    if (d.ld_shrunk) flags += 'L';
    if (d.vmax_capped) flags += 'V';
    if (d.backtracked) flags += 'B';
    if (d.motion_infeasible) flags += 'I';
    if (d.seeded_from_last) flags += 'H';
    if (flags.empty()) flags = "-";
    std::snprintf(buf, sizeof(buf),
                  "%zu %.3f %.6f %.6f %.6f %.6f %.6f %.6f %s %d %d %zu %zu %zu %zu %zu %.6f %.3f %.3f %s\n",
                  k, st.time, st.position.x(), st.position.y(), st.position.z(), st.velocity.x(), st.velocity.y(),
                  st.velocity.z(), to_string(st.kind), d.rings, d.candidates_checked, d.pcl1, d.pcl2, d.pcl3, d.pcl4,
                  d.pcl5, std::isfinite(d.d_min) ? d.d_min : -1.0, d.active_l_d, d.active_v_max, flags.c_str());
    os << buf;
  }
}

inline std::vector<Point3> trajectory_points(const RunRecord& rec) {
  std::vector<Point3> pts;
  pts.reserve(rec.trajectory.size());
  for (const auto& s : rec.trajectory) pts.push_back(s.position);
  return pts;
}

/// Writes the four per-run files into `dir` (created if missing).
inline void export_run(const std::filesystem::path& dir, const RunRecord& rec, const RunSummary& s) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("trajectory.txt");
    const auto pts = trajectory_points(rec);
    write_cloud(f, pts, "trajectory " + rec.scenario + " seed " + std::to_string(rec.seed));
  }
  {
    auto f = open("metrics.txt");
    write_metrics(f, rec, s);
  }
  {
    auto f = open("steps.txt");
    write_steps(f, rec);
  }
  {
    auto f = open("timing.txt");
    write_timing(f, s);
  }
  if (rec.final_clouds) {
    const auto& c = *rec.final_clouds;
    write_cloud_file((dir / "final_pcl2.txt").string(), c.pcl2.points, "Pcl2 earth frame, final step");
    write_cloud_file((dir / "final_pcl3.txt").string(), c.pcl3.points, "Pcl3 map voxel centers, final step");
    write_cloud_file((dir / "final_pcl4.txt").string(), c.pcl4.points, "Pcl4 sparsified, final step");
    write_cloud_file((dir / "final_pcl5.txt").string(), c.pcl5.points, "Pcl5 local crop, final step");
  }
}

}  // namespace hasplan::sim
