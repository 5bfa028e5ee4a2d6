#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evac/grid.hpp"

namespace evac {

enum class Behavior : std::uint8_t {
    NearestExit,       // commit to the exit with the smallest predicted distance
    BestPredictedExit, // commit to the exit with the smallest predicted evacuation cost
};

inline const char* behavior_name(Behavior b) {
    return b == Behavior::NearestExit ? "NE" : "BPE";
}

inline std::optional<Behavior> behavior_from_name(const std::string& s) {
    if (s == "NE") return Behavior::NearestExit;
    if (s == "BPE") return Behavior::BestPredictedExit;
    return std::nullopt;
}

enum class BehaviorEvent : std::uint8_t {
    ObjectiveInfeasible,
    StressExceedsTolerance,
};

inline const char* event_name(BehaviorEvent e) {
    return e == BehaviorEvent::ObjectiveInfeasible ? "objective_infeasible"
                                                   : "stress_exceeds_tolerance";
}

inline std::optional<BehaviorEvent> event_from_name(const std::string& s) {
    if (s == "objective_infeasible") return BehaviorEvent::ObjectiveInfeasible;
    if (s == "stress_exceeds_tolerance") return BehaviorEvent::StressExceedsTolerance;
    return std::nullopt;
}

// The engine of behaviors: states are behaviors, edges fire on declared
// events. An empty table keeps every agent's behavior constant for the run.
struct TransitionTable {
    struct Rule {
        Behavior from;
        BehaviorEvent event;
        Behavior to;
    };
    std::vector<Rule> rules;

    std::optional<Behavior> next(Behavior from, BehaviorEvent event) const {
        for (const Rule& r : rules) {
            if (r.from == from && r.event == event) return r.to;
        }
        return std::nullopt;
    }

    bool empty() const { return rules.empty(); }
};

// Static traits. Sex and age are carried for scenario authors but no
// implemented rule consumes them yet.
struct AgentProfile {
    int id = 0;
    std::string sex = "u";
    int age = 0;
    int speed = 1;                 // conflict priority rank, >= 1
    int damage_points = 0;         // conflict priority (fewer wins)
    double stress_tolerance = 50.0;
    Behavior initial_behavior = Behavior::NearestExit;
};

inline constexpr long kNeverDeliberated = -1000000000L;

struct AgentState {
    Pos pos{};
    Behavior behavior = Behavior::NearestExit;
    std::optional<int> objective_exit; // exit id, not index
    double stress = 0.0;
    bool stress_event_fired = false;
    long distance_moves = 0;
    int blocked_steps = 0; // consecutive ticks without advancing
    long last_deliberation_tick = kNeverDeliberated;
    std::optional<long> evacuated_at;

    // Last executed move, used to judge which exit the agent is heading for.
    Pos last_from{};
    bool has_moved = false;

    // Hazard cells this agent has already seen (word-packed bitset over the
    // grid); newly seen cells surface as Percept.hazard_deltas.
    std::vector<std::uint64_t> known_hazards;

    bool active() const { return !evacuated_at.has_value(); }
};

// Tunables of the deliberation loop.
struct BehaviorParams {
    int sight_range = 0;       // Chebyshev cells; 0 = unlimited
    int sight_range_smoke = 2; // sight while standing in smoke
    int base_period = 0;       // re-deliberation period in ticks; 0 = auto from grid diagonal
    int growth_divisor = 100;  // period grows by 1 every this many ticks
    int prudential_limit = 3;  // blocked ticks before a lateral escape move
    TransitionTable transitions;
};

// What one agent saw this tick.
struct Percept {
    std::vector<Pos> visible_positions;       // excludes the agent's own cell
    std::vector<int> visible_exits;           // exit ids, ascending
    std::map<int, int> oriented_counts;       // exit id -> visible agents heading there
    std::vector<Pos> hazard_deltas;           // newly seen fire/smoke/heat cells
};

} // namespace evac
