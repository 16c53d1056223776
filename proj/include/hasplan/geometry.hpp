// Copyright 2026 The hasplan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Core 3D types, the Euler-angle rotation used to lift body-frame clouds
// into the earth frame, and the perpendicular segment clearance used by the
// angular search collision check.

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>

namespace hasplan {

using Point3 = Eigen::Vector3d;
using Vector3 = Eigen::Vector3d;
using RotationMatrix = Eigen::Matrix3d;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = std::numbers::pi;

struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline bool is_finite(const Point3& p) { return p.allFinite(); }

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Roll/pitch/yaw in radians. Yaw is kept in (-pi, pi].
struct EulerAttitude {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;

  EulerAttitude() = default;
  EulerAttitude(double r, double p, double y) : roll(r), pitch(p), yaw(wrap_angle(y)) {
    if (!std::isfinite(r) || !std::isfinite(p) || !std::isfinite(y)) {
      throw InvalidInput("EulerAttitude: non-finite angle");
    }
  }
};

/// The body-to-earth matrix in its row layout
///
///   [ cψcθ           sψcθ           -sθ  ]
///   [ cψsθsφ - sψcφ  sψsθsφ + cψcφ  cθsφ ]
///   [ cψsθcφ + sψsφ  sψsθcφ - cψsφ  cθcφ ]
///
/// This layout is the transpose of the conventional ZYX body->earth rotation,
/// so a heading of h is expressed as yaw = -h (see sim::planner_attitude).
inline RotationMatrix body_to_earth(const EulerAttitude& att) {
  const double cf = std::cos(att.roll), sf = std::sin(att.roll);
  const double ct = std::cos(att.pitch), st = std::sin(att.pitch);
  const double cp = std::cos(att.yaw), sp = std::sin(att.yaw);
  RotationMatrix r;
  r << cp * ct, sp * ct, -st,
       cp * st * sf - sp * cf, sp * st * sf + cp * cf, ct * sf,
       cp * st * cf + sp * sf, sp * st * cf - cp * sf, ct * cf;
  return r;
}

inline Point3 transform_point(const RotationMatrix& r, const Point3& p_body, const Point3& origin) {
  return r * p_body + origin;
}

/// Clearance between the segment [from, to] and a cloud, using the
/// perpendicular-foot rule: a point whose foot of perpendicular falls
/// outside the segment is ignored (contributes +inf). Otherwise it
/// contributes its perpendicular distance to the supporting line.
/// Returns +inf for an empty cloud or when every point is ignored.
inline double segment_clearance(const Point3& from, const Point3& to, std::span<const Point3> cloud) {
  const Vector3 seg = to - from;
  const double seg2 = seg.squaredNorm();
  if (seg2 == 0.0) throw InvalidInput("segment_clearance: degenerate segment");
  const double inv_len = 1.0 / std::sqrt(seg2);

  double best = kInf;
  for (const Point3& q : cloud) {
    const Vector3 fq = q - from;
    const double from2 = fq.squaredNorm();
    const double to2 = (q - to).squaredNorm();
    // exact comparisons; ties put the foot on an endpoint
    if (from2 > to2 + seg2 || to2 > from2 + seg2) continue;
    const double d = fq.cross(seg).norm() * inv_len;
    if (d < best) best = d;
  }
  return best;
}

inline std::string to_string(const Point3& p) {
  return "(" + std::to_string(p.x()) + ", " + std::to_string(p.y()) + ", " + std::to_string(p.z()) + ")";
}

}  // namespace hasplan
