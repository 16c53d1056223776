// Copyright 2026 The hasplan Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <tuple>

#include "hasplan/cloudpipe.hpp"
#include "oracles.hpp"

using namespace hasplan;

namespace {

FilterParams no_outliers() {
  FilterParams f;
  f.outlier_min_neighbors = 0;
  return f;
}

PointCloud body(std::vector<Point3> pts) { return PointCloud(std::move(pts), Frame::kBody); }
PointCloud earth(std::vector<Point3> pts) { return PointCloud(std::move(pts), Frame::kEarth); }

std::set<std::tuple<double, double, double>> as_set(const std::vector<Point3>& pts) {
  std::set<std::tuple<double, double, double>> s;
  for (const auto& p : pts) s.emplace(p.x(), p.y(), p.z());
  return s;
}

}  // namespace

TEST(FilterRaw, DropsPointsBeyondRange) {
  EXPECT_TRUE(filter_raw(body({{9, 0, 0}}), no_outliers()).empty());
  EXPECT_EQ(filter_raw(body({{8, 0, 0}}), no_outliers()).size(), 1u);
}

TEST(FilterRaw, OnePointPerVoxel) {
  const auto out = filter_raw(body({{1.00, 0, 0}, {1.05, 0, 0}, {1.11, 0, 0}}), no_outliers());
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out.points[0], Point3(1.00, 0, 0));
  EXPECT_EQ(out.frame, Frame::kBody);
}

TEST(FilterRaw, EmptyInEmptyOut) { EXPECT_TRUE(filter_raw(body({}), FilterParams{}).empty()); }

TEST(FilterRaw, RejectsEarthFrame) { EXPECT_THROW(filter_raw(earth({{1, 0, 0}}), FilterParams{}), InvalidInput); }

TEST(FilterRaw, RandomCubeCellsMatchBruteForce) {
  std::mt19937_64 rng(21);
  std::vector<Point3> pts;
  for (int n = 0; n < 500; ++n) pts.push_back(oracle::random_point(rng, 0.0, 1.0));
  const auto out = filter_raw(body(pts), no_outliers());
  EXPECT_LE(out.size(), 125u);
  std::set<std::tuple<long, long, long>> in_cells, out_cells;
  auto cell = [](const Point3& p) {
    return std::make_tuple(static_cast<long>(std::floor(p.x() / 0.2)), static_cast<long>(std::floor(p.y() / 0.2)),
                           static_cast<long>(std::floor(p.z() / 0.2)));
  };
  for (const auto& p : pts) in_cells.insert(cell(p));
  for (const auto& p : out.points) {
    EXPECT_TRUE(out_cells.insert(cell(p)).second) << "two outputs in one cell";
    EXPECT_TRUE(std::find(pts.begin(), pts.end(), p) != pts.end());
  }
  EXPECT_EQ(in_cells, out_cells);
}

TEST(FilterRaw, OutlierRemovalNeedsEnoughNeighbors) {
  FilterParams f;
  f.outlier_min_neighbors = 3;
  f.outlier_radius = 0.4;
  // Cluster of four within 0.4 of each other plus one isolated point.
  std::vector<Point3> pts{{2, 0, 0}, {2, 0.1, 0}, {2, 0, 0.25}, {2.1, 0.2, 0.1}, {5, 3, 0}};
  f.voxel_size = 0.01;
  const auto out = filter_raw(body(pts), f);
  EXPECT_EQ(out.size(), 4u);
  for (const auto& p : out.points) {
    int neighbors = 0;
    for (const auto& q : pts) neighbors += (q != p && (q - p).norm() <= 0.4);
    EXPECT_GE(neighbors, 3);
  }
}

TEST(ToEarth, EmptyAndTranslation) {
  EXPECT_TRUE(to_earth(body({}), {0, 0, 0}, {1, 1, 1}).empty());
  const auto out = to_earth(body({{0, 0, 0}}), {0, 0, 0}, {1, 1, 1});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out.points[0], Point3(1, 1, 1));
  EXPECT_EQ(out.frame, Frame::kEarth);
}

TEST(ToEarth, RotationPreservesNorm) {
  const auto out = to_earth(body({{1, 0, 0}}), {0, 0, kPi / 2}, Point3::Zero());
  EXPECT_NEAR(out.points[0].norm(), 1.0, 1e-15);
}

TEST(VoxelMap, CenterConvention) {
  VoxelMap map(0.2);
  const auto pcl3 = insert_cloud(map, earth({{0.05, 0.05, 0.05}}));
  ASSERT_EQ(pcl3.size(), 1u);
  EXPECT_LT((pcl3.points[0] - Point3(0.1, 0.1, 0.1)).norm(), 1e-15);
  EXPECT_LT((voxel_center(voxel_key({-0.05, 0, 0}, 0.2), 0.2) - Point3(-0.1, 0.1, 0.1)).norm(), 1e-15);
}

TEST(VoxelMap, RepeatedInsertIsIdempotentForOccupancy) {
  VoxelMap map(0.2);
  const auto cloud = earth({{0.05, 0.05, 0.05}, {0.1, 0.1, 0.1}, {1.0, 0, 0}});
  const auto first = insert_cloud(map, cloud);
  EXPECT_EQ(first.size(), 2u);
  const auto second = insert_cloud(map, cloud);
  EXPECT_EQ(first.points, second.points);
  EXPECT_EQ(map.hits(voxel_key({0.05, 0.05, 0.05}, 0.2)), 4u);
}

TEST(VoxelMap, ThresholdControlsOccupancy) {
  VoxelMap map(0.2, 2);
  map.insert(std::vector<Point3>{{0.05, 0.05, 0.05}});
  EXPECT_EQ(map.occupied_count(), 0u);
  map.insert(std::vector<Point3>{{0.15, 0.05, 0.05}});
  EXPECT_EQ(map.occupied_count(), 1u);
  EXPECT_THROW(VoxelMap(0.0), InvalidInput);
  EXPECT_THROW(VoxelMap(0.2, 0), InvalidInput);
}

TEST(VoxelMap, CentersIndependentOfInsertionOrder) {
  std::mt19937_64 rng(22);
  std::vector<Point3> pts;
  for (int n = 0; n < 300; ++n) pts.push_back(oracle::random_point(rng, -2, 2));
  VoxelMap a(0.2), b(0.2);
  a.insert(pts);
  std::shuffle(pts.begin(), pts.end(), rng);
  b.insert(pts);
  EXPECT_EQ(a.center_points(), b.center_points());
}

TEST(Sparsify, SinglePointAndFarPair) {
  EXPECT_EQ(sparsify(earth({{1, 2, 3}}), 0.8).points, std::vector<Point3>{Point3(1, 2, 3)});
  const auto pair = sparsify(earth({{0, 0, 0}, {2.4, 0, 0}}), 0.8);
  EXPECT_EQ(pair.size(), 2u);
}

TEST(Sparsify, DenseWallCoverage) {
  std::vector<Point3> wall;
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 25; ++j) wall.emplace_back(3.1, -3.9 + 0.2 * i, -2.4 + 0.2 * j);
  ASSERT_EQ(wall.size(), 1000u);
  const auto out = sparsify(earth(wall), 0.8);
  EXPECT_LT(out.size(), wall.size());
  EXPECT_TRUE(oracle::covers(wall, out.points, 0.8));
  const auto in = as_set(wall);
  for (const auto& p : out.points) EXPECT_TRUE(in.count({p.x(), p.y(), p.z()}));
}

TEST(Sparsify, RandomCloudsCoveredAndSubset) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> r(0.2, 1.5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Point3> pts;
    for (int n = 0; n < 400; ++n) pts.push_back(oracle::random_point(rng, -3, 3));
    const double r_safe = r(rng);
    const auto out = sparsify(earth(pts), r_safe);
    EXPECT_LE(out.size(), pts.size());
    EXPECT_TRUE(oracle::covers(pts, out.points, r_safe));
    const auto in = as_set(pts);
    for (const auto& p : out.points) EXPECT_TRUE(in.count({p.x(), p.y(), p.z()}));
  }
}

TEST(Sparsify, OrderIndependent) {
  std::mt19937_64 rng(24);
  std::vector<Point3> pts;
  for (int n = 0; n < 300; ++n) pts.push_back(oracle::random_point(rng, -3, 3));
  const auto a = sparsify(earth(pts), 0.8);
  std::shuffle(pts.begin(), pts.end(), rng);
  EXPECT_EQ(a.points, sparsify(earth(pts), 0.8).points);
}

TEST(LocalCrop, ExamplesAndEmpty) {
  const auto c = local_crop(earth({{1, 0, 0}, {4, 0, 0}}), Point3::Zero(), 3.0);
  EXPECT_EQ(c.cloud.points, std::vector<Point3>{Point3(1, 0, 0)});
  EXPECT_DOUBLE_EQ(c.d_min, 1.0);
  const auto e = local_crop(earth({}), Point3::Zero(), 3.0);
  EXPECT_TRUE(e.cloud.empty());
  EXPECT_EQ(e.d_min, kInf);
}

TEST(LocalCrop, MatchesBruteForceFilter) {
  std::mt19937_64 rng(25);
  std::vector<Point3> pts;
  for (int n = 0; n < 200; ++n) pts.push_back(oracle::random_point(rng, -5, 5));
  const Point3 p(0.3, -0.2, 0.1);
  const auto c = local_crop(earth(pts), p, 3.0);
  std::vector<Point3> want;
  double dmin = kInf;
  for (const auto& q : pts) {
    if ((q - p).norm() <= 3.0) {
      want.push_back(q);
      dmin = std::min(dmin, (q - p).norm());
    }
  }
  EXPECT_EQ(c.cloud.points, want);
  EXPECT_DOUBLE_EQ(c.d_min, dmin);
}

TEST(Pipeline, StageSizesAreMonotone) {
  std::mt19937_64 rng(26);
  std::vector<Point3> raw;
  for (int n = 0; n < 2000; ++n) raw.push_back(oracle::random_point(rng, -6, 6));
  const FilterParams f;
  const auto pcl1 = filter_raw(body(raw), f);
  const auto pcl2 = to_earth(pcl1, {0.1, -0.1, 0.7}, {1, 2, 3});
  VoxelMap map(f.voxel_size);
  const auto pcl3 = insert_cloud(map, pcl2);
  const auto pcl4 = sparsify(pcl3, f.r_safe);
  const auto pcl5 = local_crop(pcl4, {1, 2, 3}, f.d_use);
  EXPECT_LE(pcl1.size(), raw.size());
  EXPECT_LE(pcl2.size(), pcl1.size());
  EXPECT_LE(pcl4.size(), pcl3.size());
  EXPECT_LE(pcl5.cloud.size(), pcl4.size());
}

TEST(Pipeline, FilterThenTransformCommutesAtZeroAttitude) {
  std::mt19937_64 rng(27);
  std::vector<Point3> raw;
  for (int n = 0; n < 500; ++n) raw.push_back(oracle::random_point(rng, -10, 10));
  const Point3 pos(0.5, -1.5, 2.0);
  FilterParams f = no_outliers();
  f.voxel_size = 1e-6;  // isolate the range cut
  const auto a = to_earth(filter_raw(body(raw), f), {0, 0, 0}, pos);
  const auto moved = to_earth(body(raw), {0, 0, 0}, pos);
  std::vector<Point3> b;
  for (const auto& q : moved.points) {
    if ((q - pos).norm() <= f.max_range) b.push_back(q);
  }
  EXPECT_EQ(as_set(a.points), as_set(b));
}
