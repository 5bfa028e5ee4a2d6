#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "evac/agent.hpp"
#include "evac/grid.hpp"
#include "evac/hazard.hpp"
#include "evac/pathfield.hpp"
#include "evac/rng.hpp"
#include "evac/scenario.hpp"

namespace evac {

// Everything one run owns. A World is a value: copying it forks the whole
// simulation state, generator included.
struct World {
    Grid grid;
    std::vector<ExitSpec> exits;
    HazardParams hazard;
    BehaviorParams behavior;
    std::vector<AgentProfile> profiles; // index == agent id
    std::vector<AgentState> agents;
    FieldSet fields;
    HazardField hz; // fire/smoke/heat masks matching fields.stamp
    Rng rng;
    long tick = 0;
    int active_count = 0;

    // Sight blockers (walls, obstacles, fire), rebuilt when hazards grow.
    std::vector<std::uint8_t> sight_block;

    // Cells that became hazardous (smoke, fire or heat) during the previous
    // tick; what a "newly seen hazard" can be this tick. Spotting one of
    // these is what lets a due re-deliberation actually happen.
    std::vector<Pos> fresh_hazards;

    // Which exits each agent's last move approached; rebuilt every tick.
    // Bit j of oriented_mask[id] covers exit index j.
    std::vector<std::uint32_t> oriented_mask;
    std::vector<int> oriented_totals; // per exit index

    explicit World(std::uint64_t seed) : rng(seed) {}

    int exit_index(int exit_id) const {
        for (std::size_t i = 0; i < exits.size(); ++i) {
            if (exits[i].id == exit_id) return static_cast<int>(i);
        }
        return -1;
    }

    bool cell_blocked(Pos p) const { return fields.costs[grid.index(p)] == kBlocked; }

    void rebuild_sight_block() {
        sight_block.assign(grid.cell_count(), 0);
        for (std::size_t i = 0; i < grid.cell_count(); ++i) {
            const Cell& c = grid.cells[i];
            sight_block[i] = (c.structure == Structure::Wall || c.structure == Structure::Obstacle ||
                              c.fire_level > 0)
                                 ? 1
                                 : 0;
        }
    }

    void refresh_hazard_caches() {
        hz = compute_hazard_field(grid, hazard);
        rebuild_sight_block();
    }
};

// Did this agent's last move take it closer to exit `exit_idx` under the
// current field? Agents that have not moved yet are oriented toward nothing.
inline bool oriented_toward(const World& w, const AgentState& a, int exit_idx) {
    if (!a.has_moved || !a.active()) return false;
    const DistanceField& f = w.fields.fields[exit_idx];
    double now = f.at(a.pos);
    double before = f.at(a.last_from);
    return now < before && now != kUnreachable && before != kUnreachable;
}

inline void rebuild_orientation(World& w) {
    const std::size_t n = w.agents.size();
    w.oriented_mask.assign(n, 0);
    w.oriented_totals.assign(w.exits.size(), 0);
    for (std::size_t id = 0; id < n; ++id) {
        const AgentState& a = w.agents[id];
        if (!a.active() || !a.has_moved) continue;
        for (std::size_t e = 0; e < w.exits.size(); ++e) {
            if (oriented_toward(w, a, static_cast<int>(e))) {
                w.oriented_mask[id] |= (1u << e);
                ++w.oriented_totals[e];
            }
        }
    }
}

// Builds a validated world: grid and exits, seeded hazards, field set, and
// the agent population. Explicit placements go first, then uniform groups
// draw cells from one seeded shuffle of the eligible floor cells.
inline World build_world(const ScenarioSpec& spec, std::uint64_t seed) {
    {
        std::vector<std::string> errors = validate_scenario(spec);
        if (!errors.empty()) {
            std::string joined = "invalid scenario:";
            for (const std::string& e : errors) joined += "\n  " + e;
            throw std::invalid_argument(joined);
        }
    }
    if (spec.exits.size() > 31) throw std::invalid_argument("at most 31 exits are supported");

    World w(seed);
    w.hazard = spec.hazard;
    w.behavior = spec.behavior;

    std::vector<std::string> errors;
    w.grid = build_grid(spec, w.exits, errors);

    // Explicit cells claim their spots before the uniform pool is drawn.
    int population = spec.population();
    w.profiles.reserve(population);
    w.agents.reserve(population);

    auto add_agent = [&](const AgentGroup& g, Pos p) {
        AgentProfile prof;
        prof.id = static_cast<int>(w.profiles.size());
        prof.speed = g.speed_min + static_cast<int>(w.rng.next_below(
                                       static_cast<std::uint64_t>(g.speed_max - g.speed_min + 1)));
        prof.damage_points =
            g.damage_min + static_cast<int>(w.rng.next_below(
                               static_cast<std::uint64_t>(g.damage_max - g.damage_min + 1)));
        prof.stress_tolerance = g.stress_min == g.stress_max
                                    ? g.stress_min
                                    : w.rng.next_in(g.stress_min, g.stress_max);
        prof.initial_behavior = g.behavior;

        AgentState st;
        st.pos = p;
        st.behavior = g.behavior;
        w.grid.at(p).occupant = prof.id;
        w.profiles.push_back(prof);
        w.agents.push_back(std::move(st));
    };

    for (const AgentGroup& g : spec.groups) {
        if (!g.explicit_placement) continue;
        if (w.grid.at(g.cell).occupant != kNoAgent)
            throw std::invalid_argument("two agents placed on the same cell");
        add_agent(g, g.cell);
    }

    std::vector<Pos> pool;
    {
        std::vector<std::uint8_t> heat = heat_mask(w.grid, w.hazard);
        for (int y = 0; y < w.grid.height; ++y) {
            for (int x = 0; x < w.grid.width; ++x) {
                Pos p{x, y};
                const Cell& c = w.grid.at(p);
                if (c.structure != Structure::Floor) continue;
                if (c.smoke_level > 0 || c.fire_level > 0 || heat[w.grid.index(p)]) continue;
                if (c.occupant != kNoAgent) continue;
                pool.push_back(p);
            }
        }
        // Fisher-Yates with the run generator; placement is part of the seed.
        for (std::size_t i = pool.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(w.rng.next_below(i));
            std::swap(pool[i - 1], pool[j]);
        }
    }
    std::size_t next = 0;
    for (const AgentGroup& g : spec.groups) {
        if (g.explicit_placement) continue;
        for (int k = 0; k < g.count; ++k) {
            if (next >= pool.size()) throw std::invalid_argument("agent population exceeds floor space");
            add_agent(g, pool[next++]);
        }
    }
    w.active_count = static_cast<int>(w.agents.size());

    w.fields = make_fields(w.grid, w.exits, w.hazard, 0);
    w.refresh_hazard_caches();
    rebuild_orientation(w);

    // Scenario-seeded hazards count as fresh on the first tick.
    for (std::size_t i = 0; i < w.grid.cell_count(); ++i) {
        if (w.hz.fire[i] || w.hz.smoke[i] || w.hz.heat[i])
            w.fresh_hazards.push_back(w.grid.pos_of(static_cast<int>(i)));
    }
    return w;
}

} // namespace evac
