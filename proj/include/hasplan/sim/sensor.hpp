// Copyright 2026 The hasplan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Synthetic depth camera: a regular azimuth/elevation ray grid inside the
// field of view, first hits within [min_range, max_range], returned in the
// camera (body) frame: x forward, y left, z up.

#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "hasplan/point_cloud.hpp"
#include "hasplan/sim/scenario.hpp"

namespace hasplan::sim {

/// Planner-facing attitude of a level drone with the given heading. The
/// body_to_earth layout maps body to earth as Rz(-yaw), hence the sign flip.
inline EulerAttitude planner_attitude(double heading) { return {0.0, 0.0, -heading}; }

inline Vector3 heading_rotate(double heading, const Vector3& body) {
  const double c = std::cos(heading), s = std::sin(heading);
  return {c * body.x() - s * body.y(), s * body.x() + c * body.y(), body.z()};
}

/// Offsets of the ray grid, centered on the optical axis.
inline std::vector<double> ray_offsets(double fov_deg, double resolution_deg) {
  const int half = static_cast<int>(std::floor(0.5 * fov_deg / resolution_deg + 1e-9));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(2 * half + 1));
  for (int k = -half; k <= half; ++k) out.push_back(deg2rad(k * resolution_deg));
  return out;
}

inline double range_sigma(const SensorParams& sensor, double range) {
  return sensor.noise_sigma0 * range / sensor.max_range;
}

/// Casts the ray grid from `position` at `heading` (pitch and roll zero).
/// Range noise is zero-mean Gaussian with sigma = sigma0 * range / max_range,
/// truncated at 3 sigma.
template <typename Rng>
PointCloud sense(const Scenario& scene, const Point3& position, double heading, Rng& rng) {
  const SensorParams& s = scene.sensor;
  PointCloud out(Frame::kBody);
  if (scene.obstacles.empty()) return out;

  const auto az = ray_offsets(s.fov_h_deg, s.resolution_deg);
  const auto el = ray_offsets(s.fov_v_deg, s.resolution_deg);
  std::normal_distribution<double> unit_normal(0.0, 1.0);
  out.points.reserve(az.size() * el.size());
  for (double e : el) {
    for (double a : az) {
      const Vector3 body_dir(std::cos(e) * std::cos(a), std::cos(e) * std::sin(a), std::sin(e));
      const Vector3 earth_dir = heading_rotate(heading, body_dir);
      double hit = kInf;
      for (const Obstacle& o : scene.obstacles) {
        if (auto t = o.raycast(position, earth_dir); t && *t < hit) hit = *t;
      }
      if (hit < s.min_range || hit > s.max_range) continue;
      double range = hit;
      if (s.noise_sigma0 > 0.0) {
        const double z = std::clamp(unit_normal(rng), -3.0, 3.0);
        range += z * range_sigma(s, hit);
      }
      out.points.push_back(range * body_dir);
    }
  }
  return out;
}

}  // namespace hasplan::sim
