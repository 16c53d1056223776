// Copyright 2026 The hasplan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Closed-loop point-mass flight: sense, plan, then hold the returned
// primitive for one replan period, integrated at 1 ms sub-steps.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hasplan/planner/planner.hpp"
#include "hasplan/sim/scenario.hpp"
#include "hasplan/sim/sensor.hpp"

namespace hasplan::sim {

inline constexpr double kReplanPeriod = 0.1;
inline constexpr double kSubStep = 1e-3;
inline constexpr int kSampleEvery = 10;  // sub-steps between trajectory samples

// Position servo used inside the goal radius.
inline constexpr double kServoOmega = 3.0;
inline constexpr double kServoMaxTime = 3.0;
inline constexpr double kServoSettle = 0.01;

struct DroneState {
  Point3 position = Point3::Zero();
  Vector3 velocity = Vector3::Zero();
  double yaw = 0.0;
  double time = 0.0;
};

inline double goal_heading(const Point3& from, const Point3& goal) {
  const Vector3 d = goal - from;
  if (d.x() == 0.0 && d.y() == 0.0) return 0.0;
  return std::atan2(d.y(), d.x());
}

/// Constant-acceleration update over dt; yaw then faces the goal.
inline DroneState integrate(const DroneState& s, const Vector3& accel, double dt, const Point3& goal) {
  DroneState n = s;
  n.position = s.position + s.velocity * dt + 0.5 * accel * dt * dt;
  n.velocity = s.velocity + accel * dt;
  n.time = s.time + dt;
  n.yaw = goal_heading(n.position, goal);
  return n;
}

inline DroneState integrate(const DroneState& s, const MotionPrimitive& m, double dt, const Point3& goal) {
  if (!(dt > 0.0) || dt > m.duration) throw InvalidInput("integrate: dt must lie in (0, duration]");
  return integrate(s, m.accel, dt, goal);
}

enum class FlightStatus { kGoalReached, kFailed, kStepLimit };

inline const char* to_string(FlightStatus s) {
  switch (s) {
    case FlightStatus::kGoalReached: return "GoalReached";
    case FlightStatus::kFailed: return "Failed";
    case FlightStatus::kStepLimit: return "StepLimit";
  }
  return "?";
}

struct TrajectorySample {
  double time = 0.0;
  Point3 position = Point3::Zero();
  Vector3 velocity = Vector3::Zero();
};

struct StepRecord {
  double time = 0.0;
  Point3 position = Point3::Zero();
  Vector3 velocity = Vector3::Zero();
  OutcomeKind kind = OutcomeKind::kFailed;
  Point3 waypoint = Point3::Zero();
  double hold = 0.0;
  StepDiagnostics diag;
};

struct RunRecord {
  std::string scenario;
  std::uint64_t seed = 0;
  FlightStatus status = FlightStatus::kStepLimit;
  std::vector<StepRecord> steps;
  std::vector<TrajectorySample> trajectory;
  int penetrations = 0;           // sub-steps with the drone inside an obstacle
  double min_clearance = kInf;    // over all sub-steps
  int speed_violations = 0;       // sub-steps with |v|_inf above configured v_max
  double path_length = 0.0;
  double pl_factor = 0.0;
  std::optional<StepClouds> final_clouds;
};

struct FlightOptions {
  bool capture_final_clouds = false;
};

namespace detail {

class FlightLog {
 public:
  FlightLog(RunRecord& rec, const Scenario& scene, double v_max) : rec_(rec), scene_(scene), v_max_(v_max) {}

  void record(const DroneState& s, bool force_sample) {
    const double c = scene_.clearance(s.position);
    if (c <= 0.0) ++rec_.penetrations;
    rec_.min_clearance = std::min(rec_.min_clearance, c);
    if (s.velocity.lpNorm<Eigen::Infinity>() > v_max_ + 1e-9) ++rec_.speed_violations;
    if (force_sample || ++since_sample_ >= kSampleEvery) sample(s);
  }

  void sample(const DroneState& s) {
    since_sample_ = 0;
    if (!rec_.trajectory.empty() && !(s.time > rec_.trajectory.back().time)) return;
    rec_.trajectory.push_back({s.time, s.position, s.velocity});
  }

 private:
  RunRecord& rec_;
  const Scenario& scene_;
  double v_max_;
  int since_sample_ = 0;
};

inline Vector3 servo_accel(const DroneState& s, const Point3& goal, double a_max) {
  Vector3 a = kServoOmega * kServoOmega * (goal - s.position) - 2.0 * kServoOmega * s.velocity;
  return a.cwiseMax(-a_max).cwiseMin(a_max);
}

// Critically damped position hold on the goal.
inline void servo_to_goal(DroneState& s, const Point3& goal, const PlannerConfig& c, FlightLog& log) {
  const int max_steps = static_cast<int>(std::lround(kServoMaxTime / kSubStep));
  for (int k = 0; k < max_steps; ++k) {
    if ((goal - s.position).norm() < kServoSettle && s.velocity.norm() < kServoSettle) break;
    s = integrate(s, servo_accel(s, goal, c.a_max), kSubStep, goal);
    s.velocity = s.velocity.cwiseMax(-c.v_max).cwiseMin(c.v_max);
    log.record(s, false);
  }
}

}  // namespace detail

inline void finalize_path(RunRecord& rec, const Scenario& scene) {
  rec.path_length = 0.0;
  for (std::size_t k = 1; k < rec.trajectory.size(); ++k) {
    rec.path_length += (rec.trajectory[k].position - rec.trajectory[k - 1].position).norm();
  }
  rec.pl_factor = rec.path_length / (scene.goal - scene.start).norm();
}

/// Flies `scene` under `config` with the given noise seed.
inline RunRecord run_flight(const Scenario& scene, const PlannerConfig& config, std::uint64_t seed,
                            const FlightOptions& opts = {}) {
  scene.validate();
  Planner planner(config, scene.start);
  std::mt19937_64 rng(seed);

  RunRecord rec;
  rec.scenario = scene.name;
  rec.seed = seed;
  detail::FlightLog log(rec, scene, config.v_max);

  DroneState s;
  s.position = scene.start;
  s.yaw = goal_heading(s.position, scene.goal);
  log.record(s, true);

  const auto in_goal_radius = [&](const DroneState& d) {
    return (scene.goal - d.position).norm() < config.goal_switch_radius;
  };

  bool reached = in_goal_radius(s);
  StepClouds clouds;
  for (int step = 0; step < scene.step_limit && !reached; ++step) {
    s.yaw = goal_heading(s.position, scene.goal);
    const PointCloud body = sense(scene, s.position, s.yaw, rng);
    const StepOutcome out = planner.step(s.position, s.velocity, body, planner_attitude(s.yaw), scene.goal,
                                         opts.capture_final_clouds ? &clouds : nullptr);

    StepRecord sr;
    sr.time = s.time;
    sr.position = s.position;
    sr.velocity = s.velocity;
    sr.kind = out.kind;
    sr.waypoint = out.waypoint;
    sr.diag = out.diag;

    if (out.kind == OutcomeKind::kFailed || !out.primitive) {
      rec.steps.push_back(sr);
      rec.status = FlightStatus::kFailed;
      break;
    }

    const MotionPrimitive& m = *out.primitive;
    const double hold = std::min(kReplanPeriod, m.duration);
    sr.hold = hold;
    rec.steps.push_back(sr);

    // Closed form from the hold start avoids drift across sub-steps.
    const DroneState start = s;
    const int n = std::max(1, static_cast<int>(std::ceil(hold / kSubStep - 1e-9)));
    for (int k = 1; k <= n; ++k) {
      const double t = k == n ? hold : k * kSubStep;
      s = integrate(start, m.accel, t, scene.goal);
      log.record(s, k == n);
      if (in_goal_radius(s)) {
        reached = true;
        break;
      }
    }
  }

  if (reached) {
    rec.status = FlightStatus::kGoalReached;
    detail::servo_to_goal(s, scene.goal, config, log);
  }
  log.sample(s);
  if (opts.capture_final_clouds) rec.final_clouds = std::move(clouds);
  finalize_path(rec, scene);
  return rec;
}

}  // namespace hasplan::sim
