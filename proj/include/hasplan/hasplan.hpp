// Copyright 2026 The hasplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "hasplan/cloudpipe.hpp"
#include "hasplan/geometry.hpp"
#include "hasplan/planner/config.hpp"
#include "hasplan/planner/motion.hpp"
#include "hasplan/planner/planner.hpp"
#include "hasplan/planner/search.hpp"
#include "hasplan/point_cloud.hpp"
#include "hasplan/sim/catalog.hpp"
#include "hasplan/sim/metrics.hpp"
#include "hasplan/sim/obstacle.hpp"
#include "hasplan/sim/scenario.hpp"
#include "hasplan/sim/sensor.hpp"
#include "hasplan/sim/simulator.hpp"
