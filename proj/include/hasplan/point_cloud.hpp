// Copyright 2026 The hasplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hasplan/geometry.hpp"

namespace hasplan {

enum class Frame { kBody, kEarth };

struct PointCloud {
  std::vector<Point3> points;
  Frame frame = Frame::kEarth;

  PointCloud() = default;
  explicit PointCloud(Frame f) : frame(f) {}
  PointCloud(std::vector<Point3> pts, Frame f) : points(std::move(pts)), frame(f) {}

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  std::span<const Point3> view() const { return points; }
};

// Plain-text cloud format: one "x y z" line per point, '#' lines are comments.

inline std::string format_point(const Point3& p) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%.6f %.6f %.6f", p.x(), p.y(), p.z());
  return buf;
}

inline void write_cloud(std::ostream& os, std::span<const Point3> points, const std::string& comment = {}) {
  if (!comment.empty()) os << "# " << comment << '\n';
  for (const Point3& p : points) os << format_point(p) << '\n';
}

inline void write_cloud_file(const std::string& path, std::span<const Point3> points, const std::string& comment = {}) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_cloud(os, points, comment);
}

inline std::vector<Point3> read_cloud(std::istream& is) {
  std::vector<Point3> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    double x, y, z;
    std::string extra;
    if (!(ls >> x >> y >> z) || (ls >> extra)) {
      throw InvalidInput("cloud line " + std::to_string(lineno) + ": expected three numbers");
    }
    Point3 p(x, y, z);
    if (!is_finite(p)) throw InvalidInput("cloud line " + std::to_string(lineno) + ": non-finite value");
    out.push_back(p);
  }
  return out;
}

inline std::vector<Point3> read_cloud_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot open " + path);
  return read_cloud(is);
}

}  // namespace hasplan
