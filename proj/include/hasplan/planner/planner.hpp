// Copyright 2026 The hasplan Authors
// SPDX-License-Identifier: Apache-2.0
//
// One replanning step: cloud chain, seed selection, angular search, motion
// primitive, and the backup plan when the search comes up empty.

#pragma once

#include <chrono>
#include <optional>
#include <vector>

#include "hasplan/cloudpipe.hpp"
#include "hasplan/geometry.hpp"
#include "hasplan/planner/config.hpp"
#include "hasplan/planner/motion.hpp"
#include "hasplan/planner/search.hpp"

namespace hasplan {

struct PathRecord {
  Point3 position = Point3::Zero();
  std::optional<SearchAngles> ray;  // ray chosen at this position, if any
};

struct PlannerState {
  Point3 position = Point3::Zero();
  Vector3 velocity = Vector3::Zero();
  std::optional<SearchAngles> last_ray;
  std::vector<PathRecord> path_record;
  double mean_obstacle_count = 0.0;
  std::size_t steps = 0;
  MatchHistory match_history;
  double active_l_d = 0.0;
  double active_v_max = 0.0;
  int consecutive_advances = 0;
  // Index into path_record of the current retreat target while backtracking.
  std::optional<std::size_t> backtrack_index;

  static PlannerState initial(const PlannerConfig& c, const Point3& position,
                              const Vector3& velocity = Vector3::Zero()) {
    PlannerState s;
    s.position = position;
    s.velocity = velocity;
    s.active_l_d = c.l_d;
    s.active_v_max = c.v_max;
    return s;
  }
};

enum class OutcomeKind { kAdvance, kBackupRetreat, kBrake, kFailed };

inline const char* to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::kAdvance: return "advance";
    case OutcomeKind::kBackupRetreat: return "retreat";
    case OutcomeKind::kBrake: return "brake";
    case OutcomeKind::kFailed: return "failed";
  }
  return "?";
}

struct PhaseTimings {
  double filter_ms = 0.0;
  double transform_ms = 0.0;
  double map_ms = 0.0;
  double sparsify_ms = 0.0;
  double crop_ms = 0.0;
  double search_ms = 0.0;
  double motion_ms = 0.0;
  double total_ms = 0.0;
};

struct StepDiagnostics {
  std::size_t pcl1 = 0, pcl2 = 0, pcl3 = 0, pcl4 = 0, pcl5 = 0;
  double d_min = kInf;
  bool searched = false;
  int rings = 0;               // ring count of the first search this step
  int candidates_checked = 0;  // across all searches this step
  bool seeded_from_last = false;
  bool ld_shrunk = false;
  bool vmax_capped = false;
  bool backtracked = false;
  bool motion_infeasible = false;
  double active_l_d = 0.0;
  double active_v_max = 0.0;
  PhaseTimings timings;
};

struct StepOutcome {
  OutcomeKind kind = OutcomeKind::kFailed;
  std::optional<MotionPrimitive> primitive;
  Point3 waypoint = Point3::Zero();  // waypoint for advance/brake, retreat target for retreat
  Point3 ray_end = Point3::Zero();   // endpoint of the chosen ray (advance/brake)
  SearchAngles ray;
  StepDiagnostics diag;
};

/// Intermediate clouds of one step, filled only when requested.
struct StepClouds {
  PointCloud pcl1, pcl2, pcl3, pcl4, pcl5;
};

namespace detail {

class PhaseClock {
 public:
  PhaseClock() : last_(std::chrono::steady_clock::now()) {}
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point last_;
};

constexpr double kArriveTolerance = 0.05;
constexpr int kMaxArrivalsPerStep = 16;

struct SearchContext {
  const PlannerConfig& config;
  std::span<const Point3> cloud;
  SearchAngles seed;
};

inline StepOutcome advance_or_brake(PlannerState& state, const SearchResult& found, const PlannerConfig& config,
                                    StepDiagnostics& diag) {
  StepOutcome out;
  out.waypoint = found.waypoint;
  out.ray_end = found.chosen.endpoint;
  out.ray = found.chosen.angles;
  const MotionLimits lim = MotionLimits::from(config, state.active_v_max);
  PhaseClock clock;
  auto motion = solve_motion(state.position, state.velocity, found.waypoint, lim);
  diag.timings.motion_ms += clock.lap();
  if (motion) {
    out.kind = OutcomeKind::kAdvance;
    out.primitive = *motion;
  } else {
    diag.motion_infeasible = true;
    out.kind = OutcomeKind::kBrake;
    out.primitive = brake_primitive(state.position, state.velocity, lim);
  }
  return out;
}

inline StepOutcome retreat_toward(PlannerState& state, const Point3& target, const PlannerConfig& config,
                                  StepDiagnostics& diag) {
  StepOutcome out;
  out.kind = OutcomeKind::kBackupRetreat;
  out.waypoint = target;
  const MotionLimits lim = MotionLimits::from(config, state.active_v_max);
  PhaseClock clock;
  auto motion = solve_motion(state.position, state.velocity, target, lim);
  diag.timings.motion_ms += clock.lap();
  if (!motion) diag.motion_infeasible = true;
  out.primitive = motion ? *motion : brake_primitive(state.position, state.velocity, lim);
  return out;
}

// Search at the current position, retrying once with the shortened ray
// length when nothing clears. Updates active_l_d when the retry is used.
inline SearchResult search_with_shrink(PlannerState& state, const SearchContext& ctx,
                                       std::span<const SearchAngles> excluded, StepDiagnostics& diag) {
  PhaseClock clock;
  SearchResult res = has_search(state.position, ctx.cloud, ctx.seed, state.active_l_d, ctx.config, excluded);
  diag.candidates_checked += res.candidates_checked;
  if (!diag.searched) {
    diag.searched = true;
    diag.rings = res.rings;
  }
  const double shrunk = ctx.config.backup_ld_factor * ctx.config.l_d;
  if (!res.found && state.active_l_d > shrunk) {
    diag.ld_shrunk = true;
    SearchResult retry = has_search(state.position, ctx.cloud, ctx.seed, shrunk, ctx.config, excluded);
    diag.candidates_checked += retry.candidates_checked;
    if (retry.found) state.active_l_d = shrunk;
    res = std::move(retry);
  }
  diag.timings.search_ms += clock.lap();
  return res;
}

}  // namespace detail

/// Backup plan after an unsuccessful search at the current ray length:
/// shrink l_d and search again; if that fails too, walk back along path_record and
/// take a different ray at each recorded position. Failed once path_record is
/// exhausted.
inline StepOutcome apply_backup(PlannerState& state, std::span<const Point3> pcl5, const SearchAngles& seed,
                                const PlannerConfig& config, StepDiagnostics& diag,
                                std::span<const SearchAngles> excluded = {}, bool try_shrink = true) {
  detail::SearchContext ctx{config, pcl5, seed};
  const double shrunk = config.backup_ld_factor * config.l_d;
  if (try_shrink && state.active_l_d > shrunk) {
    diag.ld_shrunk = true;
    detail::PhaseClock clock;
    SearchResult retry = has_search(state.position, pcl5, seed, shrunk, config, excluded);
    diag.candidates_checked += retry.candidates_checked;
    diag.timings.search_ms += clock.lap();
    if (retry.found) {
      state.active_l_d = shrunk;
      return detail::advance_or_brake(state, retry, config, diag);
    }
  }

  // Walk back through recorded positions.
  diag.backtracked = true;
  std::optional<std::size_t> idx;
  if (state.backtrack_index) {
    idx = *state.backtrack_index == 0 ? std::nullopt : std::optional<std::size_t>(*state.backtrack_index - 1);
  } else if (!state.path_record.empty()) {
    idx = state.path_record.size() - 1;
  }

  for (int arrivals = 0; idx; ++arrivals) {
    state.backtrack_index = idx;
    const PathRecord& rec = state.path_record[*idx];
    if ((rec.position - state.position).norm() > detail::kArriveTolerance ||
        arrivals >= detail::kMaxArrivalsPerStep) {
      return detail::retreat_toward(state, rec.position, config, diag);
    }
    // Already at the recorded point: try the next ray there.
    std::vector<SearchAngles> skip(excluded.begin(), excluded.end());
    if (rec.ray) skip.push_back(*rec.ray);
    SearchResult res = detail::search_with_shrink(state, ctx, skip, diag);
    if (res.found) {
      state.backtrack_index.reset();
      return detail::advance_or_brake(state, res, config, diag);
    }
    idx = *idx == 0 ? std::nullopt : std::optional<std::size_t>(*idx - 1);
  }

  state.backtrack_index.reset();
  StepOutcome failed;
  failed.kind = OutcomeKind::kFailed;
  return failed;
}

/// One replanning step. `state.position` / `state.velocity` must hold the
/// measured state at the time the body cloud was taken.
inline StepOutcome run_step(PlannerState& state, const PointCloud& body_cloud, const EulerAttitude& att,
                            const Point3& goal, VoxelMap& map, const PlannerConfig& config,
                            StepClouds* capture = nullptr) {
  detail::PhaseClock total;
  detail::PhaseClock clock;
  StepDiagnostics diag;

  const PointCloud pcl1 = filter_raw(body_cloud, config.filter_params());
  diag.timings.filter_ms = clock.lap();
  const PointCloud pcl2 = to_earth(pcl1, att, state.position);
  diag.timings.transform_ms = clock.lap();
  const PointCloud pcl3 = insert_cloud(map, pcl2);
  diag.timings.map_ms = clock.lap();
  const PointCloud pcl4 = config.use_sparsify ? sparsify(pcl3, config.r_safe) : pcl3;
  diag.timings.sparsify_ms = clock.lap();
  LocalCrop crop = local_crop(pcl4, state.position, config.d_use);
  diag.timings.crop_ms = clock.lap();

  diag.pcl1 = pcl1.size();
  diag.pcl2 = pcl2.size();
  diag.pcl3 = pcl3.size();
  diag.pcl4 = pcl4.size();
  diag.pcl5 = crop.cloud.size();
  diag.d_min = crop.d_min;

  // Speed cap near obstacles is re-evaluated every step.
  diag.vmax_capped = crop.d_min < config.vmax_shrink_ratio * config.r_safe;
  state.active_v_max = diag.vmax_capped ? config.backup_vmax_factor * config.v_max : config.v_max;

  const std::size_t obstacle_count = crop.cloud.size();
  const SearchAngles goal_dir = goal_angles(state.position, goal);
  SearchAngles seed = goal_dir;
  if (config.use_heuristic) {
    seed = heuristic_init(goal_dir, state.last_ray, state.match_history, obstacle_count, state.mean_obstacle_count);
    diag.seeded_from_last = state.last_ray && same_angles(seed, *state.last_ray) && !same_angles(seed, goal_dir);
  }
  const std::span<const Point3> pcl5 = crop.cloud.points;

  StepOutcome out;
  if (state.backtrack_index) {
    const PathRecord& rec = state.path_record[*state.backtrack_index];
    if ((rec.position - state.position).norm() > detail::kArriveTolerance) {
      diag.backtracked = true;
      out = detail::retreat_toward(state, rec.position, config, diag);
    } else {
      // Arrived: the next ray at this recorded point, then keep walking back.
      std::vector<SearchAngles> skip;
      if (rec.ray) skip.push_back(*rec.ray);
      detail::SearchContext ctx{config, pcl5, seed};
      SearchResult res = detail::search_with_shrink(state, ctx, skip, diag);
      if (res.found) {
        state.backtrack_index.reset();
        out = detail::advance_or_brake(state, res, config, diag);
      } else {
        out = apply_backup(state, pcl5, seed, config, diag, skip, false);
      }
    }
  } else {
    detail::PhaseClock search_clock;
    SearchResult res = has_search(state.position, pcl5, seed, state.active_l_d, config);
    diag.timings.search_ms += search_clock.lap();
    diag.searched = true;
    diag.rings = res.rings;
    diag.candidates_checked = res.candidates_checked;
    out = res.found ? detail::advance_or_brake(state, res, config, diag)
                    : apply_backup(state, pcl5, seed, config, diag);
  }

  // Heuristic bookkeeping.
  const bool has_ray = out.kind == OutcomeKind::kAdvance || out.kind == OutcomeKind::kBrake;
  if (has_ray) {
    // Angles are continuous, so "equal" means the same search cell.
    state.match_history.push(state.last_ray.has_value() &&
                             angular_separation(out.ray, *state.last_ray) < 0.5 * config.delta_alpha);
    state.last_ray = out.ray;
  }
  const double prior = state.mean_obstacle_count * static_cast<double>(state.steps);
  state.mean_obstacle_count = (prior + static_cast<double>(obstacle_count)) / static_cast<double>(state.steps + 1);
  ++state.steps;

  if (out.kind == OutcomeKind::kAdvance) {
    if (++state.consecutive_advances >= config.restore_after_advances) state.active_l_d = config.l_d;
  } else {
    state.consecutive_advances = 0;
  }

  state.path_record.push_back({state.position, has_ray ? std::optional<SearchAngles>(out.ray) : std::nullopt});

  diag.active_l_d = state.active_l_d;
  diag.active_v_max = state.active_v_max;
  diag.timings.total_ms = total.lap();
  out.diag = diag;

  if (capture) {
    capture->pcl1 = pcl1;
    capture->pcl2 = pcl2;
    capture->pcl3 = pcl3;
    capture->pcl4 = pcl4;
    capture->pcl5 = std::move(crop.cloud);
  }
  return out;
}

/// Bundles config, map and state for one flight.
class Planner {
 public:
  Planner(PlannerConfig config, const Point3& start)
      : config_(std::move(config)),
        map_(config_.voxel_size, static_cast<std::uint32_t>(config_.occupancy_threshold)),
        state_(PlannerState::initial(config_, start)) {
    validate(config_);
  }

  StepOutcome step(const Point3& position, const Vector3& velocity, const PointCloud& body_cloud,
                   const EulerAttitude& att, const Point3& goal, StepClouds* capture = nullptr) {
    state_.position = position;
    state_.velocity = velocity;
    return run_step(state_, body_cloud, att, goal, map_, config_, capture);
  }

  const PlannerConfig& config() const { return config_; }
  const PlannerState& state() const { return state_; }
  const VoxelMap& map() const { return map_; }

 private:
  PlannerConfig config_;
  VoxelMap map_;
  PlannerState state_;
};

}  // namespace hasplan
