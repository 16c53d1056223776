// Copyright 2026 The hasplan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Reference implementations used only by tests. Each is written from the
// defining formulas rather than by calling the library routine it checks.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "hasplan/planner/config.hpp"
#include "hasplan/planner/motion.hpp"

namespace oracle {

using hasplan::Point3;
using hasplan::Vector3;

/// Projection parameter of q onto the line a + t (b - a).
inline double foot_parameter(const Point3& a, const Point3& b, const Point3& q) {
  const Vector3 s = b - a;
  return (q - a).dot(s) / s.dot(s);
}

/// Standard point-to-segment distance with endpoint clamping.
inline double point_segment_distance(const Point3& a, const Point3& b, const Point3& q) {
  const double t = std::clamp(foot_parameter(a, b, q), 0.0, 1.0);
  return (q - (a + t * (b - a))).norm();
}

/// Minimum distance from q to samples a + k/n (b - a), k = 0..n.
inline double sampled_distance(const Point3& a, const Point3& b, const Point3& q, int n = 1000) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= n; ++k) {
    const Point3 s = a + (static_cast<double>(k) / n) * (b - a);
    best = std::min(best, (q - s).norm());
  }
  return best;
}

/// Dense-sampling clearance over points whose foot lies strictly inside.
inline double dense_clearance(const Point3& a, const Point3& b, std::span<const Point3> cloud, int n = 1000) {
  double best = std::numeric_limits<double>::infinity();
  for (const Point3& q : cloud) {
    const double t = foot_parameter(a, b, q);
    if (!(t > 0.0 && t < 1.0)) continue;
    best = std::min(best, sampled_distance(a, b, q, n));
  }
  return best;
}

struct GridMotion {
  bool feasible = false;
  double t = 0.0;
  Vector3 a = Vector3::Zero();
  double objective = std::numeric_limits<double>::infinity();
};

/// Grid search over the duration at the given resolution. For each t the
/// acceleration is the least-norm one that lands inside the tolerance ball
/// (the endpoint target is the ball point nearest the coasting endpoint).
inline GridMotion grid_motion(const Point3& p, const Vector3& v, const Point3& w,
                              const hasplan::MotionLimits& lim, double resolution = 1e-4) {
  GridMotion best;
  const int n = static_cast<int>(std::floor((lim.t_max - lim.t_lo) / resolution + 1e-9));
  for (int k = 0; k <= n; ++k) {
    const double t = k == n ? lim.t_max : lim.t_lo + k * resolution;
    const Point3 coast_end = p + v * t;
    const Vector3 off = coast_end - w;
    const double r = lim.xi * (1.0 - 1e-9);
    const Point3 target = off.norm() <= r ? coast_end : Point3(w + off * (r / off.norm()));
    const Vector3 a = 2.0 * (target - coast_end) / (t * t);
    const Vector3 v1 = v + a * t;
    const Point3 p1 = p + v * t + 0.5 * a * t * t;
    const bool ok = a.cwiseAbs().maxCoeff() <= lim.a_max && v1.cwiseAbs().maxCoeff() <= lim.v_max &&
                    (p1 - w).norm() <= lim.xi;
    if (!ok) continue;
    const double obj = a.squaredNorm() + lim.eta * t;
    if (obj < best.objective) best = {true, t, a, obj};
  }
  return best;
}

struct ExhaustiveResult {
  bool found = false;
  int ring = 0;
  int direction = 0;
  Point3 endpoint = Point3::Zero();
  Point3 waypoint = Point3::Zero();
};

/// Every candidate in loop order (ring outer, direction inner), first one
/// whose foot-rule clearance exceeds r_safe wins.
inline ExhaustiveResult exhaustive_search(const Point3& origin, std::span<const Point3> cloud, double alpha0,
                                          double beta0, double l_d, const hasplan::PlannerConfig& c) {
  auto clearance = [&](const Point3& end) {
    double best = std::numeric_limits<double>::infinity();
    for (const Point3& q : cloud) {
      const double t = foot_parameter(origin, end, q);
      if (t < 0.0 || t > 1.0) continue;
      const Point3 foot = origin + t * (end - origin);
      best = std::min(best, (q - foot).norm());
    }
    return best;
  };
  for (int ring = 0; ring <= c.m_max_iters; ++ring) {
    const double d = ring * c.delta_alpha;
    const double az[4] = {alpha0 + d, alpha0 - d, alpha0, alpha0};
    const double el[4] = {beta0, beta0, beta0 + d, beta0 - d};
    for (int dir = 0; dir < (ring == 0 ? 1 : 4); ++dir) {
      if (std::abs(el[dir]) > c.max_elevation) continue;
      const Point3 end = origin + l_d * Vector3(std::cos(az[dir]), std::sin(az[dir]), std::sin(el[dir]));
      if (clearance(end) > c.r_safe) {
        return {true, ring, dir + 1, end, origin + c.mu * (end - origin)};
      }
    }
  }
  return {};
}

/// True when every point of `dense` has a point of `sparse` within radius.
inline bool covers(std::span<const Point3> dense, std::span<const Point3> sparse, double radius) {
  for (const Point3& q : dense) {
    bool hit = false;
    for (const Point3& w : sparse) {
      if ((q - w).norm() <= radius) {
        hit = true;
        break;
      }
    }
    if (!hit) return false;
  }
  return true;
}

inline Point3 random_point(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return {u(rng), u(rng), u(rng)};
}

}  // namespace oracle
