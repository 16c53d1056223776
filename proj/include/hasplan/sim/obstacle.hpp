// Copyright 2026 The hasplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "hasplan/geometry.hpp"

namespace hasplan::sim {

/// Axis-aligned box (center + full extents) or vertical cylinder
/// (axis through center.xy, spanning z_lo..z_hi).
struct Obstacle {
  enum class Shape { kBox, kCylinder };

  Shape shape = Shape::kBox;
  Point3 center = Point3::Zero();
  Vector3 size = Vector3::Ones();  // box only
  double radius = 0.0;             // cylinder only
  double z_lo = 0.0, z_hi = 0.0;   // cylinder only

  static Obstacle box(const Point3& center, const Vector3& size) {
    if (!(size.minCoeff() > 0.0)) throw InvalidInput("box: dimensions must be positive");
    Obstacle o;
    o.shape = Shape::kBox;
    o.center = center;
    o.size = size;
    return o;
  }

  static Obstacle cylinder(double cx, double cy, double radius, double z_lo, double z_hi) {
    if (!(radius > 0.0) || !(z_hi > z_lo)) throw InvalidInput("cylinder: dimensions must be positive");
    Obstacle o;
    o.shape = Shape::kCylinder;
    o.center = Point3(cx, cy, 0.5 * (z_lo + z_hi));
    o.radius = radius;
    o.z_lo = z_lo;
    o.z_hi = z_hi;
    return o;
  }

  Point3 box_min() const { return center - 0.5 * size; }
  Point3 box_max() const { return center + 0.5 * size; }

  /// Negative inside, zero on the surface.
  double signed_distance(const Point3& p) const {
    if (shape == Shape::kBox) {
      const Vector3 q = (p - center).cwiseAbs() - 0.5 * size;
      const double outside = q.cwiseMax(0.0).norm();
      const double inside = std::min(q.maxCoeff(), 0.0);
      return outside + inside;
    }
    const double dr = std::hypot(p.x() - center.x(), p.y() - center.y()) - radius;
    const double dz = std::max(z_lo - p.z(), p.z() - z_hi);
    const double outside = std::hypot(std::max(dr, 0.0), std::max(dz, 0.0));
    const double inside = std::min(std::max(dr, dz), 0.0);
    return outside + inside;
  }

  bool contains(const Point3& p) const { return signed_distance(p) <= 0.0; }

  /// Distance along a unit ray to the first surface hit at t >= 0.
  std::optional<double> raycast(const Point3& origin, const Vector3& dir) const {
    return shape == Shape::kBox ? raycast_box(origin, dir) : raycast_cylinder(origin, dir);
  }

 private:
  std::optional<double> raycast_box(const Point3& o, const Vector3& d) const {
    const Point3 lo = box_min(), hi = box_max();
    double t_near = -kInf, t_far = kInf;
    for (int axis = 0; axis < 3; ++axis) {
      if (d[axis] == 0.0) {
        if (o[axis] < lo[axis] || o[axis] > hi[axis]) return std::nullopt;
        continue;
      }
      double t1 = (lo[axis] - o[axis]) / d[axis];
      double t2 = (hi[axis] - o[axis]) / d[axis];
      if (t1 > t2) std::swap(t1, t2);
      t_near = std::max(t_near, t1);
      t_far = std::min(t_far, t2);
      if (t_near > t_far) return std::nullopt;
    }
    if (t_far < 0.0) return std::nullopt;
    return t_near >= 0.0 ? t_near : t_far;
  }

  std::optional<double> raycast_cylinder(const Point3& o, const Vector3& d) const {
    std::optional<double> best;
    auto take = [&](double t) {
      if (t >= 0.0 && (!best || t < *best)) best = t;
    };
    const double ox = o.x() - center.x(), oy = o.y() - center.y();
    const double a = d.x() * d.x() + d.y() * d.y();
    if (a > 0.0) {
      const double b = 2.0 * (ox * d.x() + oy * d.y());
      const double c = ox * ox + oy * oy - radius * radius;
      const double disc = b * b - 4.0 * a * c;
      if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        for (double t : {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)}) {
          const double z = o.z() + t * d.z();
          if (z >= z_lo && z <= z_hi) take(t);
        }
      }
    }
    if (d.z() != 0.0) {
      for (double zc : {z_lo, z_hi}) {
        const double t = (zc - o.z()) / d.z();
        const double x = ox + t * d.x(), y = oy + t * d.y();
        if (x * x + y * y <= radius * radius) take(t);
      }
    }
    return best;
  }
};

}  // namespace hasplan::sim
