// Copyright 2026 The hasplan Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "hasplan/sim/catalog.hpp"
#include "hasplan/sim/metrics.hpp"
#include "hasplan/sim/sensor.hpp"
#include "hasplan/sim/simulator.hpp"

using namespace hasplan;
using namespace hasplan::sim;

namespace {

Scenario wall_ahead(double noise) {
  Scenario s;
  s.name = "wall";
  s.start = Point3::Zero();
  s.goal = Point3(10, 0, 0);
  s.sensor.noise_sigma0 = noise;
  s.obstacles.push_back(Obstacle::box({2.5, 0, 0}, {1, 4, 4}));
  return s;
}

}  // namespace

TEST(Obstacle, BoxAndCylinderDistances) {
  const auto box = Obstacle::box({0, 0, 0}, {2, 2, 2});
  EXPECT_DOUBLE_EQ(box.signed_distance({3, 0, 0}), 2.0);
  EXPECT_DOUBLE_EQ(box.signed_distance({0.5, 0, 0}), -0.5);
  EXPECT_TRUE(box.contains({0.9, 0.9, 0.9}));
  const auto cyl = Obstacle::cylinder(0, 0, 1, 0, 2);
  EXPECT_DOUBLE_EQ(cyl.signed_distance({3, 0, 1}), 2.0);
  EXPECT_FALSE(cyl.contains({0, 0, 2.5}));
  const auto t = box.raycast({-5, 0, 0}, {1, 0, 0});
  ASSERT_TRUE(t);
  EXPECT_DOUBLE_EQ(*t, 4.0);
  EXPECT_FALSE(box.raycast({-5, 0, 0}, {-1, 0, 0}));
  EXPECT_THROW(Obstacle::box({0, 0, 0}, {0, 1, 1}), InvalidInput);
}

TEST(Sensor, EmptySceneGivesEmptyCloud) {
  Scenario s;
  std::mt19937_64 rng(1);
  const auto c = sense(s, Point3::Zero(), 0.0, rng);
  EXPECT_TRUE(c.empty());
  EXPECT_EQ(c.frame, Frame::kBody);
}

TEST(Sensor, NoiselessHitsLieOnFrontFace) {
  const auto s = wall_ahead(0.0);
  std::mt19937_64 rng(2);
  const auto c = sense(s, Point3::Zero(), 0.0, rng);
  ASSERT_FALSE(c.empty());
  for (const auto& p : c.points) EXPECT_NEAR(p.x(), 2.0, 1e-9);
}

TEST(Sensor, WallBehindIsNotSeen) {
  const auto s = wall_ahead(0.0);
  std::mt19937_64 rng(3);
  EXPECT_TRUE(sense(s, Point3::Zero(), kPi, rng).empty());
}

TEST(Sensor, HeadingRotatesBodyCloudIntoEarth) {
  auto s = wall_ahead(0.0);
  s.obstacles = {Obstacle::box({0, 2.5, 0}, {4, 1, 4})};  // wall on +y
  std::mt19937_64 rng(4);
  const auto c = sense(s, Point3::Zero(), kPi / 2, rng);
  ASSERT_FALSE(c.empty());
  for (const auto& p : c.points) {
    EXPECT_NEAR(p.x(), 2.0, 1e-9);  // body frame: straight ahead
    const Point3 e = transform_point(body_to_earth(planner_attitude(kPi / 2)), p, Point3::Zero());
    EXPECT_NEAR(e.y(), 2.0, 1e-9);
  }
}

TEST(Sensor, NoiseStaysWithinThreeSigma) {
  const auto s = wall_ahead(0.05);
  std::mt19937_64 rng(5);
  const auto c = sense(s, Point3::Zero(), 0.0, rng);
  ASSERT_FALSE(c.empty());
  for (const auto& p : c.points) {
    const Vector3 dir = p.normalized();
    const double truth = 2.0 / dir.x();
    EXPECT_LE(std::abs(p.norm() - truth), 3.0 * range_sigma(s.sensor, truth) + 1e-12);
  }
}

TEST(Integrate, ClosedFormAndYaw) {
  DroneState s{{1, 2, 3}, {1, 0, 0}, 0.0, 0.0};
  const auto n = integrate(s, Vector3(0, 2, 0), 0.5, Point3(1, 10, 3));
  EXPECT_LT((n.position - Point3(1.5, 2.25, 3)).norm(), 1e-15);
  EXPECT_LT((n.velocity - Vector3(1, 1, 0)).norm(), 1e-15);
  EXPECT_DOUBLE_EQ(n.time, 0.5);
  EXPECT_DOUBLE_EQ(n.yaw, goal_heading(n.position, {1, 10, 3}));
  const auto m = make_primitive(s.position, s.velocity, Vector3(0, 2, 0), 0.5, 1.2);
  EXPECT_THROW(integrate(s, m, 0.6, Point3::Zero()), InvalidInput);
  EXPECT_THROW(integrate(s, m, 0.0, Point3::Zero()), InvalidInput);
  const auto full = integrate(s, m, 0.5, Point3::Zero());
  EXPECT_LT((full.position - m.p_next).norm(), 1e-15);
}

TEST(Metrics, PathLengthFactor) {
  Scenario s;
  s.start = Point3::Zero();
  s.goal = Point3(10, 0, 0);
  RunRecord r;
  r.trajectory = {{0, {0, 0, 0}, {}}, {1, {5, 0, 0}, {}}, {2, {10, 0, 0}, {}}};
  finalize_path(r, s);
  EXPECT_DOUBLE_EQ(r.pl_factor, 1.0);
  s.goal = Point3(3, 4, 0);
  r.trajectory = {{0, {0, 0, 0}, {}}, {1, {3, 0, 0}, {}}, {2, {3, 4, 0}, {}}};
  finalize_path(r, s);
  EXPECT_DOUBLE_EQ(r.path_length, 7.0);
  EXPECT_DOUBLE_EQ(r.pl_factor, 1.4);
}

TEST(Metrics, StatsNearestRank) {
  const auto s = compute_stats({4, 1, 3, 2});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.median, 2.5);
  EXPECT_DOUBLE_EQ(s.p95, 4.0);
  std::vector<double> many(100);
  std::iota(many.begin(), many.end(), 1.0);
  EXPECT_DOUBLE_EQ(compute_stats(many).p95, 95.0);
  EXPECT_EQ(compute_stats({}).count, 0u);
}

TEST(ScenarioText, ParsesAndRejects) {
  const auto s = parse_scenario(std::string(
      "[scenario]\nname = t\nstart = 0 0 0\ngoal = 5 0 0\n[obstacles]\nbox 2 0 0 1 1 1\ncyl 3 3 0.5 2\n"));
  EXPECT_EQ(s.name, "t");
  ASSERT_EQ(s.obstacles.size(), 2u);
  EXPECT_EQ(s.obstacles[1].shape, Obstacle::Shape::kCylinder);
  EXPECT_THROW(parse_scenario(std::string("[scenario]\nstart = 0 0\n")), InvalidInput);
  EXPECT_THROW(parse_scenario(std::string("[obstacles]\nbox 1 2 3\n")), InvalidInput);
  EXPECT_THROW(parse_scenario(std::string("[scenario]\nwarp = 1\n")), InvalidInput);
  EXPECT_THROW(builtin_scenario("nowhere"), InvalidInput);
}

TEST(Catalog, AllScenariosParseAndValidate) {
  for (const auto& e : kCatalog) {
    const auto s = builtin_scenario(e.name);
    EXPECT_EQ(s.name, e.name);
    EXPECT_NO_THROW(s.validate());
  }
}

TEST(Flight, EmptyWorldReachesGoalAlmostStraight) {
  Scenario s;
  s.name = "open";
  s.start = Point3::Zero();
  s.goal = Point3(5, 0, 1);
  const auto r = run_flight(s, PlannerConfig{}, 0);
  EXPECT_EQ(r.status, FlightStatus::kGoalReached);
  EXPECT_LT(r.pl_factor, 1.05);
  // The goal servo settles within 1 cm, so the path may end a hair short.
  EXPECT_GE(r.pl_factor, 1.0 - 0.01 / (s.goal - s.start).norm());
  EXPECT_EQ(r.penetrations, 0);
  EXPECT_EQ(r.speed_violations, 0);
  ASSERT_GE(r.trajectory.size(), 2u);
  for (std::size_t k = 1; k < r.trajectory.size(); ++k) EXPECT_GT(r.trajectory[k].time, r.trajectory[k - 1].time);
  EXPECT_LT((r.trajectory.back().position - s.goal).norm(), 0.3);
}

TEST(Flight, SimpleForwardIsCollisionFree) {
  const auto s = builtin_scenario("simple_forward");
  const auto r = run_flight(s, PlannerConfig{}, 0);
  EXPECT_EQ(r.status, FlightStatus::kGoalReached);
  EXPECT_EQ(r.penetrations, 0);
  EXPECT_GT(r.min_clearance, 0.0);
  const auto m = compute_metrics(r, s);
  std::size_t total = 0;
  for (auto n : m.rings_histogram) total += n;
  EXPECT_EQ(total, m.steps);
  std::size_t outcomes = 0;
  for (const auto& [k, n] : m.outcome_counts) outcomes += n;
  EXPECT_EQ(outcomes, m.steps);
}

TEST(Flight, EnclosedRoomEndsWithoutGoalOrCollision) {
  const auto s = builtin_scenario("narrow_room");
  const auto r = run_flight(s, PlannerConfig{}, 0);
  EXPECT_NE(r.status, FlightStatus::kGoalReached);
  EXPECT_EQ(r.penetrations, 0);
  const auto m = compute_metrics(r, s);
  EXPECT_GE(m.ld_shrink_steps, 1u);
  EXPECT_GE(m.backtrack_steps, 1u);
}

TEST(Flight, SameSeedSameTrajectory) {
  const auto s = builtin_scenario("simple_return");
  const auto a = run_flight(s, PlannerConfig{}, 3);
  const auto b = run_flight(s, PlannerConfig{}, 3);
  ASSERT_EQ(a.trajectory.size(), b.trajectory.size());
  for (std::size_t k = 0; k < a.trajectory.size(); ++k) EXPECT_EQ(a.trajectory[k].position, b.trajectory[k].position);
}
