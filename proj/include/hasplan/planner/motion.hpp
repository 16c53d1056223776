// Copyright 2026 The hasplan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Minimum-acceleration motion primitive:
//
//   min  |a|^2 + eta t
//   s.t. 0 < t <= t_max, |a|_inf <= a_max, |v + a t|_inf <= v_max,
//        |p + v t + a t^2 / 2 - w|_2 <= xi
//
// For a fixed t the least-norm acceleration lands on the point of the
// xi-ball around w closest to the coasting endpoint p + v t. That leaves a
// one-dimensional problem in t, solved by a coarse scan over [t_lo, t_max]
// followed by bisection of the feasible-run edges and golden-section
// refinement inside each run.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "hasplan/geometry.hpp"
#include "hasplan/planner/config.hpp"

namespace hasplan {

struct MotionLimits {
  double v_max = 3.0;
  double a_max = 4.0;
  double t_max = 0.5;
  double xi = 0.01;
  double eta = 1.2;
  double t_lo = 1e-3;

  static MotionLimits from(const PlannerConfig& c, double v_max_override = 0.0) {
    return {v_max_override > 0.0 ? v_max_override : c.v_max, c.a_max, c.t_max, c.xi, c.eta, 1e-3};
  }
};

struct MotionPrimitive {
  Vector3 accel = Vector3::Zero();
  double duration = 0.0;
  Point3 p_next = Point3::Zero();
  Vector3 v_next = Vector3::Zero();
  double objective = 0.0;
};

inline MotionPrimitive make_primitive(const Point3& p, const Vector3& v, const Vector3& a, double t, double eta) {
  MotionPrimitive m;
  m.accel = a;
  m.duration = t;
  m.v_next = v + a * t;
  m.p_next = p + v * t + 0.5 * a * t * t;
  m.objective = a.squaredNorm() + eta * t;
  return m;
}

inline bool satisfies_limits(const MotionPrimitive& m, const Point3& waypoint, const MotionLimits& lim) {
  return m.duration > 0.0 && m.duration <= lim.t_max && m.accel.lpNorm<Eigen::Infinity>() <= lim.a_max &&
         m.v_next.lpNorm<Eigen::Infinity>() <= lim.v_max && (m.p_next - waypoint).norm() <= lim.xi;
}

namespace detail {

struct TimeSample {
  double t = 0.0;
  bool feasible = false;
  double violation = 0.0;
  double objective = kInf;
  MotionPrimitive primitive;
};

inline TimeSample evaluate_duration(const Point3& p, const Vector3& v, const Point3& w, double t,
                                    const MotionLimits& lim) {
  const Vector3 disp = w - p;
  const Vector3 coast = v * t;
  const Vector3 gap = coast - disp;
  const double gap_norm = gap.norm();
  // stay a hair inside the ball so the recomputed endpoint cannot round out
  const double slack = lim.xi * (1.0 - 1e-9);
  const Vector3 target = gap_norm <= slack ? coast : Vector3(disp + slack * gap / gap_norm);
  const Vector3 a = 2.0 * (target - coast) / (t * t);

  TimeSample s;
  s.t = t;
  s.primitive = make_primitive(p, v, a, t, lim.eta);
  const double a_excess = s.primitive.accel.lpNorm<Eigen::Infinity>() - lim.a_max;
  const double v_excess = s.primitive.v_next.lpNorm<Eigen::Infinity>() - lim.v_max;
  const double p_excess = (s.primitive.p_next - w).norm() - lim.xi;
  s.violation = std::max({a_excess / lim.a_max, v_excess / lim.v_max, p_excess / lim.xi, 0.0});
  s.feasible = satisfies_limits(s.primitive, w, lim);
  s.objective = s.feasible ? s.primitive.objective : kInf;
  return s;
}

template <typename Eval>
double bisect_edge(double feasible_t, double infeasible_t, Eval&& eval) {
  for (int it = 0; it < 48; ++it) {
    const double mid = 0.5 * (feasible_t + infeasible_t);
    if (eval(mid).feasible) {
      feasible_t = mid;
    } else {
      infeasible_t = mid;
    }
  }
  return feasible_t;
}

template <typename F>
double golden_min(double lo, double hi, F&& f, int iterations = 60) {
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < iterations && hi - lo > 1e-12; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

}  // namespace detail

/// Returns the best primitive found, or nullopt when no duration in
/// [t_lo, t_max] admits a feasible acceleration.
inline std::optional<MotionPrimitive> solve_motion(const Point3& p, const Vector3& v, const Point3& waypoint,
                                                   const MotionLimits& lim) {
  if (!is_finite(p) || !v.allFinite() || !is_finite(waypoint)) throw InvalidInput("solve_motion: non-finite input");
  constexpr int kSamples = 200;
  auto eval = [&](double t) { return detail::evaluate_duration(p, v, waypoint, t, lim); };

  std::array<detail::TimeSample, kSamples> grid;
  for (int k = 0; k < kSamples; ++k) {
    const double t = lim.t_lo + (lim.t_max - lim.t_lo) * k / (kSamples - 1);
    grid[k] = eval(k == kSamples - 1 ? lim.t_max : t);
  }

  std::optional<detail::TimeSample> best;
  auto consider = [&](const detail::TimeSample& s) {
    if (s.feasible && (!best || s.objective < best->objective)) best = s;
  };

  auto refine_run = [&](double lo, double hi) {
    consider(eval(lo));
    consider(eval(hi));
    if (hi > lo) {
      const double t = detail::golden_min(lo, hi, [&](double x) { return eval(x).objective; });
      consider(eval(t));
    }
  };

  bool any_feasible = false;
  for (int k = 0; k < kSamples;) {
    if (!grid[k].feasible) {
      ++k;
      continue;
    }
    any_feasible = true;
    int end = k;
    while (end + 1 < kSamples && grid[end + 1].feasible) ++end;
    const double lo = k > 0 ? detail::bisect_edge(grid[k].t, grid[k - 1].t, eval) : grid[k].t;
    const double hi = end + 1 < kSamples ? detail::bisect_edge(grid[end].t, grid[end + 1].t, eval) : grid[end].t;
    for (int j = k; j <= end; ++j) consider(grid[j]);
    refine_run(lo, hi);
    k = end + 1;
  }

  if (!any_feasible) {
    // A feasible window narrower than the scan spacing can only sit next to
    // the least-violating sample; look for it there.
    int k_best = 0;
    for (int k = 1; k < kSamples; ++k) {
      if (grid[k].violation < grid[k_best].violation) k_best = k;
    }
    const double lo = grid[std::max(k_best - 1, 0)].t;
    const double hi = grid[std::min(k_best + 1, kSamples - 1)].t;
    const double t = detail::golden_min(lo, hi, [&](double x) { return eval(x).violation; }, 80);
    const auto s = eval(t);
    if (s.feasible) {
      const double step = (lim.t_max - lim.t_lo) / (kSamples - 1) * 1e-3;
      double run_lo = t, run_hi = t;
      if (t - step >= lim.t_lo && !eval(t - step).feasible) {
        run_lo = detail::bisect_edge(t, t - step, eval);
      } else {
        run_lo = detail::bisect_edge(t, lo, eval);
      }
      if (t + step <= lim.t_max && !eval(t + step).feasible) {
        run_hi = detail::bisect_edge(t, t + step, eval);
      } else {
        run_hi = detail::bisect_edge(t, hi, eval);
      }
      consider(s);
      refine_run(run_lo, run_hi);
    }
  }

  if (!best) return std::nullopt;
  return best->primitive;
}

/// Straight-line deceleration along the current velocity, bounded by a_max
/// per axis. Used when no primitive reaches the requested waypoint.
inline MotionPrimitive brake_primitive(const Point3& p, const Vector3& v, const MotionLimits& lim) {
  const double speed_inf = v.lpNorm<Eigen::Infinity>();
  if (speed_inf == 0.0) return make_primitive(p, v, Vector3::Zero(), lim.t_max, lim.eta);
  const double t = std::clamp(speed_inf / lim.a_max, lim.t_lo, lim.t_max);
  Vector3 a = -v / t;
  const double a_inf = a.lpNorm<Eigen::Infinity>();
  if (a_inf > lim.a_max) a *= lim.a_max / a_inf;
  return make_primitive(p, v, a, t, lim.eta);
}

}  // namespace hasplan
