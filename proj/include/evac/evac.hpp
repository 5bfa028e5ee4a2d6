#pragma once

// Umbrella header for the evac simulation library.

#include "evac/agent.hpp"
#include "evac/behavior.hpp"
#include "evac/grid.hpp"
#include "evac/hazard.hpp"
#include "evac/pathfield.hpp"
#include "evac/presets.hpp"
#include "evac/report.hpp"
#include "evac/resolver.hpp"
#include "evac/rng.hpp"
#include "evac/scenario.hpp"
#include "evac/simulation.hpp"
#include "evac/world.hpp"
