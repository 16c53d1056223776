// Copyright 2026 The hasplan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Point-cloud chain from raw depth returns to the local collision set:
//
//   raw (body) --filter_raw--> Pcl1 --to_earth--> Pcl2 --insert_cloud--> Pcl3
//   Pcl3 --sparsify--> Pcl4 --local_crop--> Pcl5, d_min
//
// Pcl3 is the full set of occupied voxel centers of the global map.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "hasplan/geometry.hpp"
#include "hasplan/point_cloud.hpp"

namespace hasplan {

struct FilterParams {
  double max_range = 8.0;
  double voxel_size = 0.2;
  int outlier_min_neighbors = 3;  // 0 disables outlier removal
  double outlier_radius = 0.4;
  double r_safe = 0.8;
  double d_use = 3.0;

  void validate() const {
    if (!(max_range > 0 && voxel_size > 0 && outlier_radius > 0 && r_safe > 0 && d_use > 0)) {
      throw InvalidInput("FilterParams: lengths must be strictly positive");
    }
    if (outlier_min_neighbors < 0) throw InvalidInput("FilterParams: outlier_min_neighbors < 0");
    if (d_use > max_range) throw InvalidInput("FilterParams: d_use must not exceed max_range");
  }
};

struct VoxelKey {
  std::int64_t i = 0, j = 0, k = 0;
  friend bool operator==(const VoxelKey&, const VoxelKey&) = default;
  friend bool operator<(const VoxelKey& a, const VoxelKey& b) {
    return std::tie(a.i, a.j, a.k) < std::tie(b.i, b.j, b.k);
  }
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& key) const noexcept {
    auto h = static_cast<std::uint64_t>(key.i) * 0x9E3779B97F4A7C15ULL;
    h ^= static_cast<std::uint64_t>(key.j) * 0xC2B2AE3D27D4EB4FULL + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(key.k) * 0x165667B19E3779F9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

inline VoxelKey voxel_key(const Point3& p, double size) {
  return {static_cast<std::int64_t>(std::floor(p.x() / size)),
          static_cast<std::int64_t>(std::floor(p.y() / size)),
          static_cast<std::int64_t>(std::floor(p.z() / size))};
}

inline Point3 voxel_center(const VoxelKey& key, double size) {
  return {(static_cast<double>(key.i) + 0.5) * size,
          (static_cast<double>(key.j) + 0.5) * size,
          (static_cast<double>(key.k) + 0.5) * size};
}

namespace detail {

// Number of other points within radius of each point, via a hash grid with
// cell edge == radius.
inline std::vector<int> neighbor_counts(std::span<const Point3> pts, double radius) {
  std::unordered_map<VoxelKey, std::vector<std::size_t>, VoxelKeyHash> grid;
  grid.reserve(pts.size());
  for (std::size_t n = 0; n < pts.size(); ++n) grid[voxel_key(pts[n], radius)].push_back(n);

  const double r2 = radius * radius;
  std::vector<int> counts(pts.size(), 0);
  for (std::size_t n = 0; n < pts.size(); ++n) {
    const VoxelKey c = voxel_key(pts[n], radius);
    int count = 0;
    for (std::int64_t di = -1; di <= 1; ++di)
      for (std::int64_t dj = -1; dj <= 1; ++dj)
        for (std::int64_t dk = -1; dk <= 1; ++dk) {
          auto it = grid.find({c.i + di, c.j + dj, c.k + dk});
          if (it == grid.end()) continue;
          for (std::size_t m : it->second) {
            if (m != n && (pts[m] - pts[n]).squaredNorm() <= r2) ++count;
          }
        }
    counts[n] = count;
  }
  return counts;
}

}  // namespace detail

/// Range cut, radius outlier removal, then one point (the first seen) per
/// voxel. Surviving points keep their original coordinates.
inline PointCloud filter_raw(const PointCloud& raw, const FilterParams& params) {
  if (raw.frame != Frame::kBody) throw InvalidInput("filter_raw: expected a body-frame cloud");

  std::vector<Point3> in_range;
  in_range.reserve(raw.size());
  for (const Point3& p : raw.points) {
    if (is_finite(p) && p.norm() <= params.max_range) in_range.push_back(p);
  }

  std::vector<Point3> inliers;
  if (params.outlier_min_neighbors > 0) {
    const auto counts = detail::neighbor_counts(in_range, params.outlier_radius);
    inliers.reserve(in_range.size());
    for (std::size_t n = 0; n < in_range.size(); ++n) {
      if (counts[n] >= params.outlier_min_neighbors) inliers.push_back(in_range[n]);
    }
  } else {
    inliers = std::move(in_range);
  }

  PointCloud out(Frame::kBody);
  std::unordered_map<VoxelKey, bool, VoxelKeyHash> taken;
  taken.reserve(inliers.size());
  for (const Point3& p : inliers) {
    if (taken.emplace(voxel_key(p, params.voxel_size), true).second) out.points.push_back(p);
  }
  return out;
}

inline PointCloud to_earth(const PointCloud& cloud, const EulerAttitude& att, const Point3& position) {
  if (cloud.frame != Frame::kBody) throw InvalidInput("to_earth: expected a body-frame cloud");
  const RotationMatrix r = body_to_earth(att);
  PointCloud out(Frame::kEarth);
  out.points.reserve(cloud.size());
  for (const Point3& p : cloud.points) out.points.push_back(transform_point(r, p, position));
  return out;
}

/// Insert-only occupancy map keyed by integer voxel index. Single writer;
/// center_points() returns an independent snapshot.
class VoxelMap {
 public:
  explicit VoxelMap(double voxel_size = 0.2, std::uint32_t occupancy_threshold = 1)
      : voxel_size_(voxel_size), threshold_(occupancy_threshold) {
    if (!(voxel_size > 0)) throw InvalidInput("VoxelMap: voxel size must be positive");
    if (occupancy_threshold == 0) throw InvalidInput("VoxelMap: occupancy threshold must be >= 1");
  }

  void insert(std::span<const Point3> points) {
    for (const Point3& p : points) {
      if (!is_finite(p)) continue;
      auto& hits = hits_[voxel_key(p, voxel_size_)];
      if (hits < UINT32_MAX) ++hits;
    }
  }

  bool occupied(const VoxelKey& key) const {
    auto it = hits_.find(key);
    return it != hits_.end() && it->second >= threshold_;
  }

  std::uint32_t hits(const VoxelKey& key) const {
    auto it = hits_.find(key);
    return it == hits_.end() ? 0 : it->second;
  }

  /// One center per occupied voxel, sorted by voxel index so the result does
  /// not depend on insertion order.
  std::vector<Point3> center_points() const {
    std::vector<VoxelKey> keys;
    keys.reserve(hits_.size());
    for (const auto& [key, hits] : hits_) {
      if (hits >= threshold_) keys.push_back(key);
    }
    std::sort(keys.begin(), keys.end());
    std::vector<Point3> out;
    out.reserve(keys.size());
    for (const VoxelKey& key : keys) out.push_back(voxel_center(key, voxel_size_));
    return out;
  }

  std::size_t occupied_count() const {
    return static_cast<std::size_t>(
        std::count_if(hits_.begin(), hits_.end(), [&](const auto& kv) { return kv.second >= threshold_; }));
  }

  double voxel_size() const { return voxel_size_; }
  std::uint32_t occupancy_threshold() const { return threshold_; }

 private:
  double voxel_size_;
  std::uint32_t threshold_;
  std::unordered_map<VoxelKey, std::uint32_t, VoxelKeyHash> hits_;
};

/// Adds an earth-frame cloud to the map and returns all occupied centers (Pcl3).
inline PointCloud insert_cloud(VoxelMap& map, const PointCloud& cloud) {
  if (cloud.frame != Frame::kEarth) throw InvalidInput("insert_cloud: expected an earth-frame cloud");
  map.insert(cloud.points);
  return PointCloud(map.center_points(), Frame::kEarth);
}

/// Keeps one representative per cubic cell of pitch r_safe/sqrt(3): the
/// point nearest its cell center. Every input point then lies within r_safe
/// of some output point (the cell diagonal is r_safe).
inline PointCloud sparsify(const PointCloud& pcl3, double r_safe) {
  if (!(r_safe > 0)) throw InvalidInput("sparsify: r_safe must be positive");
  // shave a hair off the pitch so the diagonal never rounds above r_safe
  const double pitch = r_safe / std::sqrt(3.0) * (1.0 - 1e-12);

  struct Rep {
    Point3 point;
    double dist2;
  };
  std::unordered_map<VoxelKey, Rep, VoxelKeyHash> cells;
  cells.reserve(pcl3.size());
  auto lex_less = [](const Point3& a, const Point3& b) {
    return std::tie(a.x(), a.y(), a.z()) < std::tie(b.x(), b.y(), b.z());
  };
  for (const Point3& p : pcl3.points) {
    const VoxelKey key = voxel_key(p, pitch);
    const double d2 = (p - voxel_center(key, pitch)).squaredNorm();
    auto [it, inserted] = cells.try_emplace(key, Rep{p, d2});
    if (inserted) continue;
    Rep& rep = it->second;
    if (d2 < rep.dist2 || (d2 == rep.dist2 && lex_less(p, rep.point))) rep = Rep{p, d2};
  }

  std::vector<std::pair<VoxelKey, Point3>> sorted;
  sorted.reserve(cells.size());
  for (const auto& [key, rep] : cells) sorted.emplace_back(key, rep.point);
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  PointCloud out(Frame::kEarth);
  out.points.reserve(sorted.size());
  for (const auto& entry : sorted) out.points.push_back(entry.second);
  return out;
}

struct LocalCrop {
  PointCloud cloud;
  double d_min = kInf;
};

inline LocalCrop local_crop(const PointCloud& pcl4, const Point3& position, double d_use) {
  if (!(d_use > 0)) throw InvalidInput("local_crop: d_use must be positive");
  LocalCrop out{PointCloud(Frame::kEarth), kInf};
  for (const Point3& p : pcl4.points) {
    const double d = (p - position).norm();
    if (d > d_use) continue;
    out.cloud.points.push_back(p);
    out.d_min = std::min(out.d_min, d);
  }
  return out;
}

}  // namespace hasplan
