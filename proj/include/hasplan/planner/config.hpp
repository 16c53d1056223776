// Copyright 2026 The hasplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "hasplan/cloudpipe.hpp"
#include "hasplan/geometry.hpp"

namespace hasplan {

/// Raised when a parameter set fails the worst-case deviation check
/// (d_max must stay below r_safe).
struct SafetyRejection : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PlannerConfig {
  // angular search
  double delta_alpha = deg2rad(10.0);
  int m_max_iters = 9;
  double l_d = 3.0;
  double mu = 0.1;
  double r_safe = 0.8;
  double d_use = 3.0;
  double max_elevation = deg2rad(80.0);

  // motion limits
  double v_max = 3.0;
  double a_max = 4.0;
  double t_max = 0.5;
  double xi = 0.01;
  double eta = 1.2;

  double goal_switch_radius = 0.3;

  // backup plan
  double backup_ld_factor = 0.5;
  double backup_vmax_factor = 0.5;
  double vmax_shrink_ratio = 1.5;  // shrink v_max when d_min < ratio * r_safe
  int restore_after_advances = 3;

  // cloud chain
  double voxel_size = 0.2;
  double max_range = 8.0;
  double outlier_radius = 0.4;
  int outlier_min_neighbors = 3;
  int occupancy_threshold = 1;

  // ablations
  bool use_heuristic = true;
  bool use_sparsify = true;

  double step_length() const { return mu * l_d; }

  FilterParams filter_params() const {
    FilterParams f;
    f.max_range = max_range;
    f.voxel_size = voxel_size;
    f.outlier_min_neighbors = outlier_min_neighbors;
    f.outlier_radius = outlier_radius;
    f.r_safe = r_safe;
    f.d_use = d_use;
    return f;
  }
};

/// Worst-case lateral deviation of one constant-acceleration step from the
/// straight segment it was checked along, evaluated at |v_n| = v_max:
///
///   d_max = 2 v_max (t_max - sqrt(2 step / a_max)),  clamped at 0.
inline double d_max_bound(double v_max, double a_max, double t_max, double step_length) {
  if (v_max <= 0.0) return 0.0;
  const double d = 2.0 * v_max * (t_max - std::sqrt(2.0 * step_length / a_max));
  return d > 0.0 ? d : 0.0;
}

inline double d_max_bound(const PlannerConfig& c, double step_length) {
  return d_max_bound(c.v_max, c.a_max, c.t_max, step_length);
}

inline double d_max_bound(const PlannerConfig& c) { return d_max_bound(c, c.step_length()); }

/// Structural checks; throws InvalidInput.
inline void validate_structure(const PlannerConfig& c) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput(std::string("config: ") + name + " must be positive");
  };
  positive(c.delta_alpha, "delta_alpha");
  positive(c.l_d, "l_d");
  positive(c.mu, "mu");
  positive(c.r_safe, "r_safe");
  positive(c.d_use, "d_use");
  positive(c.max_elevation, "max_elevation");
  positive(c.v_max, "v_max");
  positive(c.a_max, "a_max");
  positive(c.t_max, "t_max");
  positive(c.xi, "xi");
  positive(c.eta, "eta");
  positive(c.goal_switch_radius, "goal_switch_radius");
  positive(c.backup_ld_factor, "backup_ld_factor");
  positive(c.backup_vmax_factor, "backup_vmax_factor");
  positive(c.vmax_shrink_ratio, "vmax_shrink_ratio");
  positive(c.voxel_size, "voxel_size");
  positive(c.max_range, "max_range");
  positive(c.outlier_radius, "outlier_radius");
  if (c.m_max_iters < 0) throw InvalidInput("config: m_max_iters must be >= 0");
  if (c.mu > 1.0) throw InvalidInput("config: mu must lie in (0, 1]");
  if (c.xi >= c.r_safe) throw InvalidInput("config: xi must be smaller than r_safe");
  if (c.max_elevation >= kPi / 2) throw InvalidInput("config: max_elevation must be below 90 deg");
  if (c.backup_ld_factor > 1.0 || c.backup_vmax_factor > 1.0) {
    throw InvalidInput("config: backup factors must lie in (0, 1]");
  }
  if (c.restore_after_advances < 1) throw InvalidInput("config: restore_after_advances must be >= 1");
  if (c.outlier_min_neighbors < 0) throw InvalidInput("config: outlier_min_neighbors must be >= 0");
  if (c.occupancy_threshold < 1) throw InvalidInput("config: occupancy_threshold must be >= 1");
  if (c.d_use > c.max_range) throw InvalidInput("config: d_use must not exceed max_range");
  if (2.0 * c.step_length() / c.a_max > c.t_max * c.t_max) {
    throw InvalidInput("config: step mu*l_d is not reachable from rest within t_max at a_max");
  }
}

/// Full acceptance: structure plus d_max < r_safe. Throws InvalidInput or
/// SafetyRejection.
inline void validate(const PlannerConfig& c) {
  validate_structure(c);
  const double dmax = d_max_bound(c);
  if (!(dmax < c.r_safe)) {
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "config rejected by the d_max safety bound: d_max = %.4f m >= r_safe = %.4f m "
                  "(2 v_max (t_max - sqrt(2 mu l_d / a_max)))",
                  dmax, c.r_safe);
    throw SafetyRejection(buf);
  }
}

// key=value text format ------------------------------------------------------

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    throw InvalidInput("config: bad number for " + key + ": '" + value + "'");
  }
  if (used != value.size() || !std::isfinite(v)) {
    throw InvalidInput("config: bad number for " + key + ": '" + value + "'");
  }
  return v;
}

inline int parse_int(const std::string& key, const std::string& value) {
  const double v = parse_double(key, value);
  if (v != std::floor(v)) throw InvalidInput("config: " + key + " must be an integer");
  return static_cast<int>(v);
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "on") return true;
  if (value == "0" || value == "false" || value == "off") return false;
  throw InvalidInput("config: " + key + " must be 0/1");
}

using ConfigSetter = std::function<void(PlannerConfig&, const std::string&, const std::string&)>;

inline const std::map<std::string, ConfigSetter>& config_setters() {
  auto dbl = [](double PlannerConfig::*field) {
    return ConfigSetter([field](PlannerConfig& c, const std::string& k, const std::string& v) {
      c.*field = parse_double(k, v);
    });
  };
  auto deg = [](double PlannerConfig::*field) {
    return ConfigSetter([field](PlannerConfig& c, const std::string& k, const std::string& v) {
      c.*field = deg2rad(parse_double(k, v));
    });
  };
  auto integer = [](int PlannerConfig::*field) {
    return ConfigSetter([field](PlannerConfig& c, const std::string& k, const std::string& v) {
      c.*field = parse_int(k, v);
    });
  };
  auto boolean = [](bool PlannerConfig::*field) {
    return ConfigSetter([field](PlannerConfig& c, const std::string& k, const std::string& v) {
      c.*field = parse_bool(k, v);
    });
  };
  static const std::map<std::string, ConfigSetter> setters = {
      {"delta_alpha_deg", deg(&PlannerConfig::delta_alpha)},
      {"m_max_iters", integer(&PlannerConfig::m_max_iters)},
      {"l_d", dbl(&PlannerConfig::l_d)},
      {"mu", dbl(&PlannerConfig::mu)},
      {"r_safe", dbl(&PlannerConfig::r_safe)},
      {"d_use", dbl(&PlannerConfig::d_use)},
      {"max_elevation_deg", deg(&PlannerConfig::max_elevation)},
      {"v_max", dbl(&PlannerConfig::v_max)},
      {"a_max", dbl(&PlannerConfig::a_max)},
      {"t_max", dbl(&PlannerConfig::t_max)},
      {"xi", dbl(&PlannerConfig::xi)},
      {"eta", dbl(&PlannerConfig::eta)},
      {"goal_switch_radius", dbl(&PlannerConfig::goal_switch_radius)},
      {"backup_ld_factor", dbl(&PlannerConfig::backup_ld_factor)},
      {"backup_vmax_factor", dbl(&PlannerConfig::backup_vmax_factor)},
      {"vmax_shrink_ratio", dbl(&PlannerConfig::vmax_shrink_ratio)},
      {"restore_after_advances", integer(&PlannerConfig::restore_after_advances)},
      {"voxel_size", dbl(&PlannerConfig::voxel_size)},
      {"max_range", dbl(&PlannerConfig::max_range)},
      {"outlier_radius", dbl(&PlannerConfig::outlier_radius)},
      {"outlier_min_neighbors", integer(&PlannerConfig::outlier_min_neighbors)},
      {"occupancy_threshold", integer(&PlannerConfig::occupancy_threshold)},
      {"heuristic", boolean(&PlannerConfig::use_heuristic)},
      {"sparsify", boolean(&PlannerConfig::use_sparsify)},
  };
  return setters;
}

}  // namespace detail

/// Sets one field by its file key. Unknown keys throw InvalidInput.
inline void apply_config_entry(PlannerConfig& c, const std::string& key, const std::string& value) {
  const auto& setters = detail::config_setters();
  auto it = setters.find(key);
  if (it == setters.end()) throw InvalidInput("config: unknown key '" + key + "'");
  it->second(c, key, value);
}

/// Parses "key=value" (used for --param overrides too).
inline void apply_config_assignment(PlannerConfig& c, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw InvalidInput("config: expected key=value, got '" + std::string(assignment) + "'");
  }
  apply_config_entry(c, detail::trim(assignment.substr(0, eq)), detail::trim(assignment.substr(eq + 1)));
}

/// Reads key=value lines over the defaults. Does not run validate().
inline PlannerConfig parse_config(std::istream& is, PlannerConfig base = {}) {
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (detail::trim(line).empty()) continue;
    apply_config_assignment(base, line);
  }
  return base;
}

inline PlannerConfig load_config(const std::string& path, PlannerConfig base = {}) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot open config " + path);
  return parse_config(is, base);
}

inline std::string format_config(const PlannerConfig& c) {
  std::ostringstream os;
  auto num = [&](const char* key, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    os << key << '=' << buf << '\n';
  };
  num("delta_alpha_deg", rad2deg(c.delta_alpha));
  num("m_max_iters", c.m_max_iters);
  num("l_d", c.l_d);
  num("mu", c.mu);
  num("r_safe", c.r_safe);
  num("d_use", c.d_use);
  num("max_elevation_deg", rad2deg(c.max_elevation));
  num("v_max", c.v_max);
  num("a_max", c.a_max);
  num("t_max", c.t_max);
  num("xi", c.xi);
  num("eta", c.eta);
  num("goal_switch_radius", c.goal_switch_radius);
  num("backup_ld_factor", c.backup_ld_factor);
  num("backup_vmax_factor", c.backup_vmax_factor);
  num("vmax_shrink_ratio", c.vmax_shrink_ratio);
  num("restore_after_advances", c.restore_after_advances);
  num("voxel_size", c.voxel_size);
  num("max_range", c.max_range);
  num("outlier_radius", c.outlier_radius);
  num("outlier_min_neighbors", c.outlier_min_neighbors);
  num("occupancy_threshold", c.occupancy_threshold);
  num("heuristic", c.use_heuristic ? 1 : 0);
  num("sparsify", c.use_sparsify ? 1 : 0);
  return os.str();
}

}  // namespace hasplan
