#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evac/scenario.hpp"

namespace evac {

// Bundled experiment presets. All share one hall: 20 m x 30 m (50 x 75 cells
// including the boundary ring), 625 agents placed uniformly at random, and
// two 4-cell (1.6 m) exits on opposite sides, each reached through a
// vestibule whose 1-cell gate limits door throughput to one agent per tick.
// E1 sits low on the left wall, E2 high on the right wall; the gate offsets
// make the nearest-exit catchment of E2 a bit larger than E1's.
//
//   caseA  all agents NearestExit, no fire
//   caseB  caseA plus a fire started in a combustible patch near E2
//   caseC  all agents BestPredictedExit, no fire
//   caseD  caseC plus the same fire
//   caseE  half NE / half BPE, no fire
//   caseF  mixed crowd, fire with a slow spread rate
//   caseG  mixed crowd, fire with a fast spread rate
namespace preset_detail {

// Exit spans on the boundary (y ranges on the left/right walls).
inline constexpr int kExit1Start = 7;  // E1 cells y 7..10 on x = 0
inline constexpr int kExit2Start = 55; // E2 cells y 55..58 on x = 49
inline constexpr int kExitLen = 4;

// Vestibule walls: a line parallel to the exit wall, capped top and bottom,
// with a single gate cell in front of the exit's middle.
inline constexpr int kVest1X = 3;
inline constexpr int kVest1Lo = 5;
inline constexpr int kVest1Hi = 12;
inline constexpr int kGate1Y = 8;
inline constexpr int kVest2X = 46;
inline constexpr int kVest2Lo = 53;
inline constexpr int kVest2Hi = 60;
inline constexpr int kGate2Y = 56;

// Combustible patch south-west of the E2 vestibule; the seed block sits a
// few cells from the E2 gate. Fire (plus its heat fringe at x <= 42,
// y <= 53) never reaches the lane hugging the vestibule, so E2 stays
// reachable while the detour around the burn grows with the spread rate.
// The fire severity of a case is its patch extent plus its spread rate.
inline constexpr int kPatchX1 = 41, kPatchY1 = 52;
inline constexpr int kPatchX0 = 30, kPatchY0 = 38;         // caseB / caseD
inline constexpr int kPatchSmallX0 = 36, kPatchSmallY0 = 44; // caseF
inline constexpr int kPatchBigX0 = 30, kPatchBigY0 = 34;     // caseG
inline constexpr int kSeedX = 40, kSeedY = 51; // 2x2 block at (40..41, 51..52)

inline void add_vestibules(ScenarioSpec& s) {
    // E1 vestibule (exit on the left wall).
    s.obstacle_rects.push_back({kVest1X, kVest1Lo, kVest1X, kGate1Y - 1});
    s.obstacle_rects.push_back({kVest1X, kGate1Y + 1, kVest1X, kVest1Hi});
    s.obstacle_rects.push_back({1, kVest1Lo, kVest1X - 1, kVest1Lo});
    s.obstacle_rects.push_back({1, kVest1Hi, kVest1X - 1, kVest1Hi});
    // E2 vestibule (exit on the right wall).
    s.obstacle_rects.push_back({kVest2X, kVest2Lo, kVest2X, kGate2Y - 1});
    s.obstacle_rects.push_back({kVest2X, kGate2Y + 1, kVest2X, kVest2Hi});
    s.obstacle_rects.push_back({kVest2X + 1, kVest2Lo, 48, kVest2Lo});
    s.obstacle_rects.push_back({kVest2X + 1, kVest2Hi, 48, kVest2Hi});
}

inline void add_fire(ScenarioSpec& s, double beta_fire, int patch_x0, int patch_y0) {
    s.hazard.beta_fire = beta_fire;
    s.combustible_rects.push_back({patch_x0, patch_y0, kPatchX1, kPatchY1});
    s.fire_seeds.push_back({kSeedX, kSeedY});
    s.fire_seeds.push_back({kSeedX + 1, kSeedY});
    s.fire_seeds.push_back({kSeedX, kSeedY + 1});
    s.fire_seeds.push_back({kSeedX + 1, kSeedY + 1});
}

inline AgentGroup crowd(int count, Behavior b) {
    AgentGroup g;
    g.count = count;
    g.behavior = b;
    g.speed_min = 1;
    g.speed_max = 3;
    g.damage_min = 0;
    g.damage_max = 2;
    g.stress_min = 40.0;
    g.stress_max = 60.0;
    return g;
}

inline ScenarioSpec base_hall(const std::string& name) {
    ScenarioSpec s;
    s.name = name;
    s.width_m = 20.0;
    s.height_m = 30.0;
    s.exits.push_back({1, "left", kExit1Start, kExitLen});
    s.exits.push_back({2, "right", kExit2Start, kExitLen});
    add_vestibules(s);
    // Smoky cells cost a detour, not a wall; crowds and hazards are sensed
    // within 4.8 m (smoke included), and objectives are reconsidered at a
    // damped cadence.
    s.hazard.smoke_weight = 4.0;
    s.behavior.sight_range = 12;
    s.behavior.sight_range_smoke = 12;
    s.behavior.base_period = 40;
    s.sim.max_ticks = 4000;
    s.sim.replications = 50;
    return s;
}

} // namespace preset_detail

inline std::optional<ScenarioSpec> builtin_preset(const std::string& name) {
    using namespace preset_detail;
    if (name == "caseA") {
        ScenarioSpec s = base_hall(name);
        s.groups.push_back(crowd(625, Behavior::NearestExit));
        return s;
    }
    if (name == "caseB") {
        ScenarioSpec s = base_hall(name);
        s.groups.push_back(crowd(625, Behavior::NearestExit));
        add_fire(s, 0.4, kPatchX0, kPatchY0);
        return s;
    }
    if (name == "caseC") {
        ScenarioSpec s = base_hall(name);
        s.groups.push_back(crowd(625, Behavior::BestPredictedExit));
        return s;
    }
    if (name == "caseD") {
        ScenarioSpec s = base_hall(name);
        s.groups.push_back(crowd(625, Behavior::BestPredictedExit));
        add_fire(s, 0.4, kPatchX0, kPatchY0);
        return s;
    }
    if (name == "caseE" || name == "caseF" || name == "caseG") {
        ScenarioSpec s = base_hall(name);
        s.groups.push_back(crowd(312, Behavior::NearestExit));
        s.groups.push_back(crowd(313, Behavior::BestPredictedExit));
        if (name == "caseF") add_fire(s, 0.25, kPatchSmallX0, kPatchSmallY0);
        if (name == "caseG") add_fire(s, 0.5, kPatchBigX0, kPatchBigY0);
        return s;
    }
    return std::nullopt;
}

inline std::vector<std::string> builtin_preset_names() {
    return {"caseA", "caseB", "caseC", "caseD", "caseE", "caseF", "caseG"};
}

} // namespace evac
