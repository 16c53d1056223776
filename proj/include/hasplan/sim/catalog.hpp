// Copyright 2026 The hasplan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Built-in scenarios. Obstacle layouts are hand-authored.

#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "hasplan/sim/scenario.hpp"

namespace hasplan::sim {

namespace catalog_text {

// A short block to climb over, then a tall one offset to -y to pass beside.
inline constexpr std::string_view kSimpleForward = R"(
[scenario]
name = simple_forward
start = 0 0 0
goal = 12 0 1
step_limit = 600
ground = -2

[obstacles]
box 4 0 -0.8 1.0 4.0 2.4
box 8 -0.75 1.5 1.0 3.5 7.0
)";

inline constexpr std::string_view kSimpleReturn = R"(
[scenario]
name = simple_return
start = 12 0 0
goal = 0 0 1
step_limit = 600
ground = -2

[obstacles]
box 4 0 -0.8 1.0 4.0 2.4
box 8 -0.75 1.5 1.0 3.5 7.0
)";

inline constexpr std::string_view kComplex = R"(
[scenario]
name = complex
start = 12 0 0
goal = -12 0 1
step_limit = 1500
ground = -2

[obstacles]
box 8 0.5 1.5 1.2 2.5 7
cyl 5 -2.5 0.5 5
cyl 4.5 2.5 0.4 5
box 2 -0.5 1.5 1 3 7
cyl -1 2.5 0.5 5
cyl -1.5 -3 0.5 5
box -4 0.8 1.5 1.5 2.5 7
cyl -6.5 -1.8 0.5 5
box -8.5 0 -0.6 1 3 2.8
cyl -9 3 0.5 5
)";

// Closed room whose only exit is narrower than twice the safety radius.
inline constexpr std::string_view kNarrowRoom = R"(
[scenario]
name = narrow_room
start = 0 0 1.5
goal = 10 0 1.5
step_limit = 600
ground = 0

[obstacles]
box 0 0 -0.1 14 6 0.2
box 0 0 3.1 14 6 0.2
box 2.5 1.3 1.5 7.4 0.2 3.0
box 2.5 -1.3 1.5 7.4 0.2 3.0
box -1.2 0 1.5 0.2 2.8 3.0
box 6.1 0.95 1.5 0.2 0.9 3.0
box 6.1 -0.95 1.5 0.2 0.9 3.0
)";

// Tall thin pillars spaced closer than twice the safety radius, under a canopy.
inline constexpr std::string_view kDenseForest = R"(
[scenario]
name = dense_forest
start = 0 0 1
goal = 14 0 1
step_limit = 600
ground = -0.2

[obstacles]
box 7 0 -0.3 22 14 0.2
box 7 0 4.1 22 14 0.2
cyl 2 1.2 0.15 4
cyl 3 1.2 0.15 4
cyl 4 1.2 0.15 4
cyl 5 1.2 0.15 4
cyl 6 1.2 0.15 4
cyl 7 1.2 0.15 4
cyl 8 1.2 0.15 4
cyl 2 -1.2 0.15 4
cyl 3 -1.2 0.15 4
cyl 4 -1.2 0.15 4
cyl 5 -1.2 0.15 4
cyl 6 -1.2 0.15 4
cyl 7 -1.2 0.15 4
cyl 8 -1.2 0.15 4
cyl 8 0 0.15 4
cyl 8 0.6 0.15 4
cyl 8 -0.6 0.15 4
cyl 8 2.2 0.15 4
cyl 8 -2.2 0.15 4
cyl 8 3.2 0.15 4
cyl 8 -3.2 0.15 4
cyl 9 0.6 0.15 4
cyl 9 -0.6 0.15 4
cyl 9 1.8 0.15 4
cyl 9 -1.8 0.15 4
cyl 9 3 0.15 4
cyl 9 -3 0.15 4
cyl 3 2.2 0.15 4
cyl 5 2.2 0.15 4
cyl 7 2.2 0.15 4
cyl 3 -2.2 0.15 4
cyl 5 -2.2 0.15 4
cyl 7 -2.2 0.15 4
cyl 2 3.2 0.15 4
cyl 4 3.2 0.15 4
cyl 6 3.2 0.15 4
cyl 2 -3.2 0.15 4
cyl 4 -3.2 0.15 4
cyl 6 -3.2 0.15 4
)";

}  // namespace catalog_text

struct CatalogEntry {
  std::string_view name;
  std::string_view text;
};

inline constexpr std::array<CatalogEntry, 5> kCatalog = {{
    {"simple_forward", catalog_text::kSimpleForward},
    {"simple_return", catalog_text::kSimpleReturn},
    {"complex", catalog_text::kComplex},
    {"narrow_room", catalog_text::kNarrowRoom},
    {"dense_forest", catalog_text::kDenseForest},
}};

inline std::optional<std::string_view> catalog_text_for(std::string_view name) {
  for (const auto& e : kCatalog) {
    if (e.name == name) return e.text;
  }
  return std::nullopt;
}

inline Scenario builtin_scenario(std::string_view name) {
  const auto text = catalog_text_for(name);
  if (!text) throw InvalidInput("unknown scenario '" + std::string(name) + "'");
  return parse_scenario(std::string(*text));
}

}  // namespace hasplan::sim
