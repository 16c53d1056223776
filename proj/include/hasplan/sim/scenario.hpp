// Copyright 2026 The hasplan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Scenario text format:
//
//   [scenario]
//   name = complex
//   start = 12 0 0
//   goal = -12 0 1
//   seed = 1
//   step_limit = 1500
//   ground = -2          # base height of cylinders
//
//   [sensor]
//   fov_h_deg = 70
//   fov_v_deg = 60
//   min_range = 0.5
//   max_range = 8
//   resolution_deg = 2
//   noise_sigma0 = 0.01
//
//   [obstacles]
//   box cx cy cz sx sy sz
//   cyl cx cy r h
//
// '#' starts a comment.

#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hasplan/geometry.hpp"
#include "hasplan/planner/config.hpp"
#include "hasplan/sim/obstacle.hpp"

namespace hasplan::sim {

struct SensorParams {
  double fov_h_deg = 70.0;
  double fov_v_deg = 60.0;
  double min_range = 0.5;
  double max_range = 8.0;
  double resolution_deg = 2.0;
  double noise_sigma0 = 0.01;
};

struct Scenario {
  std::string name = "unnamed";
  Point3 start = Point3::Zero();
  Point3 goal = Point3::UnitX();
  std::uint64_t seed = 0;
  int step_limit = 1500;
  double ground = 0.0;
  SensorParams sensor;
  std::vector<Obstacle> obstacles;

  double clearance(const Point3& p) const {
    double best = kInf;
    for (const Obstacle& o : obstacles) best = std::min(best, o.signed_distance(p));
    return best;
  }

  void validate() const {
    if (step_limit <= 0) throw InvalidInput("scenario " + name + ": step_limit must be positive");
    if (!is_finite(start) || !is_finite(goal)) throw InvalidInput("scenario " + name + ": non-finite start/goal");
    if ((goal - start).norm() == 0.0) throw InvalidInput("scenario " + name + ": goal equals start");
    if (!(clearance(start) > 0.0)) throw InvalidInput("scenario " + name + ": start inside an obstacle");
    if (!(clearance(goal) > 0.0)) throw InvalidInput("scenario " + name + ": goal inside an obstacle");
    const SensorParams& s = sensor;
    if (!(s.fov_h_deg > 0 && s.fov_h_deg < 180 && s.fov_v_deg > 0 && s.fov_v_deg < 180)) {
      throw InvalidInput("scenario " + name + ": field of view must lie in (0, 180) deg");
    }
    if (!(s.min_range >= 0 && s.max_range > s.min_range)) throw InvalidInput("scenario " + name + ": bad sensor range");
    if (!(s.resolution_deg > 0)) throw InvalidInput("scenario " + name + ": resolution must be positive");
    if (!(s.noise_sigma0 >= 0)) throw InvalidInput("scenario " + name + ": noise must be >= 0");
  }
};

namespace detail {

inline Point3 parse_vec3(const std::string& key, const std::string& value) {
  std::istringstream is(value);
  double x, y, z;
  std::string extra;
  if (!(is >> x >> y >> z) || (is >> extra)) throw InvalidInput("scenario: " + key + " expects three numbers");
  return {x, y, z};
}

}  // namespace detail

inline Scenario parse_scenario(std::istream& is) {
  Scenario sc;
  std::string section;
  std::string line;
  int lineno = 0;
  struct PendingCylinder {
    double cx, cy, r, h;
    int line;
  };
  std::vector<PendingCylinder> cylinders;
  std::vector<Obstacle> ordered;  // cylinder slots are filled after parsing
  std::vector<std::size_t> cylinder_slots;

  auto fail = [&](const std::string& msg) -> void {
    throw InvalidInput("scenario line " + std::to_string(lineno) + ": " + msg);
  };

  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = hasplan::detail::trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') fail("unterminated section header");
      section = t.substr(1, t.size() - 2);
      if (section != "scenario" && section != "sensor" && section != "obstacles") fail("unknown section " + section);
      continue;
    }
    if (section == "obstacles") {
      std::istringstream ls(t);
      std::string kind;
      ls >> kind;
      std::vector<double> v;
      double x;
      while (ls >> x) v.push_back(x);
      if (!ls.eof()) fail("bad number in obstacle line");
      try {
        if (kind == "box") {
          if (v.size() != 6) fail("box expects cx cy cz sx sy sz");
          ordered.push_back(Obstacle::box({v[0], v[1], v[2]}, {v[3], v[4], v[5]}));
        } else if (kind == "cyl") {
          if (v.size() != 4) fail("cyl expects cx cy r h");
          cylinder_slots.push_back(ordered.size());
          cylinders.push_back({v[0], v[1], v[2], v[3], lineno});
          ordered.emplace_back();
        } else {
          fail("unknown obstacle kind '" + kind + "'");
        }
      } catch (const InvalidInput& e) {
        if (std::string(e.what()).rfind("scenario line", 0) == 0) throw;
        fail(e.what());
      }
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = hasplan::detail::trim(t.substr(0, eq));
    const std::string value = hasplan::detail::trim(t.substr(eq + 1));
    if (section == "scenario") {
      if (key == "name") {
        sc.name = value;
      } else if (key == "start") {
        sc.start = detail::parse_vec3(key, value);
      } else if (key == "goal") {
        sc.goal = detail::parse_vec3(key, value);
      } else if (key == "seed") {
        sc.seed = static_cast<std::uint64_t>(hasplan::detail::parse_int(key, value));
      } else if (key == "step_limit") {
        sc.step_limit = hasplan::detail::parse_int(key, value);
      } else if (key == "ground") {
        sc.ground = hasplan::detail::parse_double(key, value);
      } else {
        fail("unknown scenario key '" + key + "'");
      }
    } else if (section == "sensor") {
      const double v = hasplan::detail::parse_double(key, value);
      if (key == "fov_h_deg") sc.sensor.fov_h_deg = v;
      else if (key == "fov_v_deg") sc.sensor.fov_v_deg = v;
      else if (key == "min_range") sc.sensor.min_range = v;
      else if (key == "max_range") sc.sensor.max_range = v;
      else if (key == "resolution_deg") sc.sensor.resolution_deg = v;
      else if (key == "noise_sigma0") sc.sensor.noise_sigma0 = v;
      else fail("unknown sensor key '" + key + "'");
    } else {
      fail("key outside of a section");
    }
  }

  // Cylinders stand on the ground height, which may be declared anywhere.
  for (std::size_t n = 0; n < cylinders.size(); ++n) {
    const auto& c = cylinders[n];
    lineno = c.line;
    if (!(c.h > sc.ground)) fail("cylinder top must be above ground");
    ordered[cylinder_slots[n]] = Obstacle::cylinder(c.cx, c.cy, c.r, sc.ground, c.h);
  }
  sc.obstacles = std::move(ordered);
  sc.validate();
  return sc;
}

inline Scenario parse_scenario(const std::string& text) {
  std::istringstream is(text);
  return parse_scenario(is);
}

inline Scenario load_scenario_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot open scenario " + path);
  return parse_scenario(is);
}

}  // namespace hasplan::sim
