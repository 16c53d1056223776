// Copyright 2026 The hasplan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Heuristic angular search: expand candidate rays around an initial search
// direction in rings of delta_alpha until one segment clears the local
// cloud by more than r_safe.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <optional>
#include <vector>

#include "hasplan/geometry.hpp"
#include "hasplan/planner/config.hpp"

namespace hasplan {

/// Azimuth alpha in (-pi, pi], elevation beta.
struct SearchAngles {
  double alpha = 0.0;
  double beta = 0.0;

  SearchAngles() = default;
  SearchAngles(double a, double b) : alpha(wrap_angle(a)), beta(b) {}

  /// Unit vector of the spherical direction (used for angular comparisons,
  /// not for endpoint generation).
  Vector3 unit() const {
    return {std::cos(beta) * std::cos(alpha), std::cos(beta) * std::sin(alpha), std::sin(beta)};
  }
};

inline bool same_angles(const SearchAngles& a, const SearchAngles& b, double tol = 1e-9) {
  return std::abs(wrap_angle(a.alpha - b.alpha)) <= tol && std::abs(a.beta - b.beta) <= tol;
}

inline double angular_separation(const SearchAngles& a, const SearchAngles& b) {
  return std::acos(std::clamp(a.unit().dot(b.unit()), -1.0, 1.0));
}

inline SearchAngles goal_angles(const Point3& position, const Point3& goal) {
  const Vector3 d = goal - position;
  if (d.squaredNorm() == 0.0) throw InvalidInput("goal_angles: goal coincides with position");
  return {std::atan2(d.y(), d.x()), std::atan2(d.z(), std::hypot(d.x(), d.y()))};
}

/// Last-three-steps record of whether the search result matched the last ray.
class MatchHistory {
 public:
  void push(bool matched) {
    history_.push_back(matched);
    if (history_.size() > 3) history_.pop_front();
  }
  int matches() const {
    int n = 0;
    for (bool m : history_) n += m ? 1 : 0;
    return n;
  }
  double lambda() const { return matches() / 3.0; }
  std::size_t size() const { return history_.size(); }

 private:
  std::deque<bool> history_;
};

/// Chooses the search seed: the last ray when
/// lambda * obstacle_count > mean_obstacle_count, otherwise the goal
/// direction. mean_obstacle_count is the mean |Pcl5| over earlier steps.
inline SearchAngles heuristic_init(const SearchAngles& goal_dir, const std::optional<SearchAngles>& last,
                                   const MatchHistory& history, std::size_t obstacle_count,
                                   double mean_obstacle_count) {
  if (mean_obstacle_count < 0.0) throw InvalidInput("heuristic_init: mean_obstacle_count must be >= 0");
  if (!last) return goal_dir;
  return history.lambda() * static_cast<double>(obstacle_count) > mean_obstacle_count ? *last : goal_dir;
}

/// The four ray endpoints at offset alpha_d around the seed. The direction
/// triple (c(alpha), s(alpha), s(beta)) is used as is, so elevated rays are
/// slightly longer than l_d.
inline std::array<Point3, 4> candidate_endpoints(const SearchAngles& seed, double alpha_d, double l_d,
                                                 const Point3& origin) {
  auto ray = [&](double a, double b) -> Point3 {
    return l_d * Vector3(std::cos(a), std::sin(a), std::sin(b)) + origin;
  };
  return {ray(seed.alpha + alpha_d, seed.beta), ray(seed.alpha - alpha_d, seed.beta),
          ray(seed.alpha, seed.beta + alpha_d), ray(seed.alpha, seed.beta - alpha_d)};
}

struct Candidate {
  int ring = 0;       // alpha_d = ring * delta_alpha
  int direction = 1;  // 1: +azimuth, 2: -azimuth, 3: +elevation, 4: -elevation
  SearchAngles angles;
  Point3 endpoint = Point3::Zero();
};

/// Loop order: ring outer, direction inner, with the four coincident
/// ring-0 rays reduced to one. Rays steeper than max_elevation are skipped.
inline std::vector<Candidate> enumerate_candidates(const SearchAngles& seed, double l_d, const Point3& origin,
                                                   const PlannerConfig& config) {
  std::vector<Candidate> out;
  out.reserve(static_cast<std::size_t>(4 * config.m_max_iters + 1));
  for (int ring = 0; ring <= config.m_max_iters; ++ring) {
    const double alpha_d = ring * config.delta_alpha;
    const auto ends = candidate_endpoints(seed, alpha_d, l_d, origin);
    const std::array<SearchAngles, 4> angles = {
        SearchAngles(seed.alpha + alpha_d, seed.beta), SearchAngles(seed.alpha - alpha_d, seed.beta),
        SearchAngles(seed.alpha, seed.beta + alpha_d), SearchAngles(seed.alpha, seed.beta - alpha_d)};
    const int directions = ring == 0 ? 1 : 4;
    for (int d = 0; d < directions; ++d) {
      if (std::abs(angles[d].beta) > config.max_elevation) continue;
      out.push_back({ring, d + 1, angles[d], ends[d]});
    }
  }
  return out;
}

struct SearchResult {
  bool found = false;
  Point3 waypoint = Point3::Zero();
  Candidate chosen;
  int rings = 0;               // ring index of the result + 1, or m + 1 when not found
  int candidates_checked = 0;  // segment clearance evaluations
  double clearance = 0.0;      // clearance of the chosen ray
  // Feasible rays that were passed over because they were excluded.
  std::vector<Candidate> feasible_alternatives;
};

/// Runs the search from `origin` with seed direction `seed`. Rays within
/// delta_alpha / 2 of any excluded direction are skipped; the ones among
/// them that would have cleared are reported in feasible_alternatives.
inline SearchResult has_search(const Point3& origin, std::span<const Point3> cloud, const SearchAngles& seed,
                               double l_d, const PlannerConfig& config,
                               std::span<const SearchAngles> excluded = {}) {
  if (!(l_d > 0)) throw InvalidInput("has_search: l_d must be positive");
  SearchResult result;
  result.rings = config.m_max_iters + 1;
  for (const Candidate& cand : enumerate_candidates(seed, l_d, origin, config)) {
    const bool skip = std::any_of(excluded.begin(), excluded.end(), [&](const SearchAngles& ex) {
      return angular_separation(ex, cand.angles) < 0.5 * config.delta_alpha;
    });
    ++result.candidates_checked;
    const double clearance = segment_clearance(origin, cand.endpoint, cloud);
    if (!(clearance > config.r_safe)) continue;
    if (skip) {
      result.feasible_alternatives.push_back(cand);
      continue;
    }
    result.found = true;
    result.chosen = cand;
    result.rings = cand.ring + 1;
    result.clearance = clearance;
    result.waypoint = origin + config.mu * (cand.endpoint - origin);
    return result;
  }
  return result;
}

}  // namespace hasplan
