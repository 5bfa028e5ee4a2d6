#pragma once

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "evac/agent.hpp"
#include "evac/grid.hpp"
#include "evac/hazard.hpp"
#include "evac/rng.hpp"

namespace evac {

// One agent's nominated destination for the current tick.
struct MoveIntent {
    int agent = -1;
    Pos from{};
    Pos to{};
};

struct ResolutionOutcome {
    std::vector<std::pair<int, Pos>> moved;     // agent -> destination (stays on the grid)
    std::vector<std::pair<int, Pos>> evacuated; // agent -> exit cell it stepped onto
    std::vector<int> stalled;
};

namespace detail {

enum class Decision : std::uint8_t { Undecided, Move, Stall };

// Free-cell contest: greater speed wins, then fewer damage points, then a
// seeded uniform pick. `candidates` arrive in agent-id order so the draw
// sequence is reproducible.
inline int contest(const std::vector<int>& candidates, const std::vector<AgentProfile>& profiles,
                   Rng& rng) {
    std::vector<int> best;
    int best_speed = -1;
    for (int id : candidates) {
        if (profiles[id].speed > best_speed) best_speed = profiles[id].speed;
    }
    int best_damage = std::numeric_limits<int>::max();
    for (int id : candidates) {
        if (profiles[id].speed == best_speed) best_damage = std::min(best_damage, profiles[id].damage_points);
    }
    for (int id : candidates) {
        if (profiles[id].speed == best_speed && profiles[id].damage_points == best_damage)
            best.push_back(id);
    }
    if (best.size() == 1) return best.front();
    return best[static_cast<std::size_t>(rng.next_below(best.size()))];
}

} // namespace detail

// Resolves all intents of one tick. Free-cell contests pick one winner per
// nominated cell; requests for occupied cells are granted only if the
// occupant itself wins and vacates this tick, with stalls cascading down the
// chain and dependency cycles (including 2-swaps) stalling every member.
// Grants are simultaneous: after `apply` no cell hosts two agents.
//
// `costs` (from the current FieldSet) enforces the fire/heat half of the
// intent invariant; pass nullptr to skip hazard-zone validation.
inline ResolutionOutcome resolve(const std::vector<MoveIntent>& intents, const Grid& grid,
                                 const std::vector<AgentProfile>& profiles, Rng& rng,
                                 const std::vector<double>* costs = nullptr) {
    // Usage errors reject the whole batch before any decision is made.
    std::vector<int> order(intents.size());
    for (std::size_t i = 0; i < intents.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return intents[a].agent < intents[b].agent; });

    std::unordered_map<int, int> intent_of_agent; // agent id -> intent index
    intent_of_agent.reserve(intents.size());
    for (int idx : order) {
        const MoveIntent& mi = intents[idx];
        if (mi.agent < 0 || mi.agent >= static_cast<int>(profiles.size()))
            throw std::invalid_argument("resolve: unknown agent id");
        if (!intent_of_agent.emplace(mi.agent, idx).second)
            throw std::invalid_argument("resolve: duplicate intent for one agent");
        if (!grid.in_bounds(mi.from) || !grid.in_bounds(mi.to))
            throw std::invalid_argument("resolve: intent out of bounds");
        if (chebyshev(mi.from, mi.to) != 1)
            throw std::invalid_argument("resolve: destination not in the Moore neighborhood");
        if (grid.at(mi.from).occupant != mi.agent)
            throw std::invalid_argument("resolve: agent is not where its intent claims");
        const Cell& dest = grid.at(mi.to);
        if (!dest.walkable_structure() || dest.fire_level > 0)
            throw std::invalid_argument("resolve: destination is not walkable");
        if (costs && (*costs)[grid.index(mi.to)] == kBlocked)
            throw std::invalid_argument("resolve: destination inside a hazard zone");
    }

    // Requests grouped by nominated cell, requester lists in agent-id order.
    std::unordered_map<int, std::vector<int>> requests; // cell index -> intent indices
    for (int idx : order) requests[grid.index(intents[idx].to)].push_back(idx);

    std::vector<detail::Decision> decision(intents.size(), detail::Decision::Undecided);
    std::deque<int> decided; // intent indices whose vacated cell may unblock others

    auto run_contest = [&](const std::vector<int>& reqs) {
        std::vector<int> agents;
        agents.reserve(reqs.size());
        for (int idx : reqs) agents.push_back(intents[idx].agent);
        int winner = detail::contest(agents, profiles, rng);
        for (int idx : reqs) {
            decision[idx] = intents[idx].agent == winner ? detail::Decision::Move
                                                         : detail::Decision::Stall;
            decided.push_back(idx);
        }
    };

    // Wave 1: contests on cells that are already free, immediate stalls on
    // cells whose occupant has no intent of its own. Cells in ascending index
    // order so seeded draws replay identically.
    std::vector<int> cells;
    cells.reserve(requests.size());
    for (const auto& [cell, _] : requests) cells.push_back(cell);
    std::sort(cells.begin(), cells.end());
    for (int cell : cells) {
        int occ = grid.cells[static_cast<std::size_t>(cell)].occupant;
        if (occ == kNoAgent) {
            run_contest(requests[cell]);
        } else if (!intent_of_agent.count(occ)) {
            for (int idx : requests[cell]) {
                decision[idx] = detail::Decision::Stall;
                decided.push_back(idx);
            }
        }
    }

    // Chain propagation from the decided sinks.
    while (!decided.empty()) {
        int idx = decided.front();
        decided.pop_front();
        auto it = requests.find(grid.index(intents[idx].from));
        if (it == requests.end()) continue;
        const std::vector<int>& reqs = it->second;
        if (decision[reqs.front()] != detail::Decision::Undecided) continue; // already handled
        if (decision[idx] == detail::Decision::Move) {
            run_contest(reqs);
        } else {
            for (int r : reqs) {
                decision[r] = detail::Decision::Stall;
                decided.push_back(r);
            }
        }
    }

    // Whatever is still undecided sits on a dependency cycle.
    ResolutionOutcome out;
    for (int idx : order) {
        const MoveIntent& mi = intents[idx];
        if (decision[idx] != detail::Decision::Move) {
            out.stalled.push_back(mi.agent);
            continue;
        }
        if (grid.at(mi.to).structure == Structure::ExitFloor) out.evacuated.emplace_back(mi.agent, mi.to);
        else out.moved.emplace_back(mi.agent, mi.to);
    }
    return out;
}

// Applies an outcome atomically: all vacated cells clear first, then all
// winners land, so chain grants into just-vacated cells are safe. Agents
// landing on an exit cell leave the grid and are stamped with the tick.
inline void apply(const ResolutionOutcome& outcome, Grid& grid, std::vector<AgentState>& agents,
                  long tick) {
    for (const auto& [id, to] : outcome.moved) grid.at(agents[id].pos).occupant = kNoAgent;
    for (const auto& [id, to] : outcome.evacuated) grid.at(agents[id].pos).occupant = kNoAgent;

    for (const auto& [id, to] : outcome.moved) {
        AgentState& a = agents[id];
        a.last_from = a.pos;
        a.pos = to;
        a.has_moved = true;
        a.distance_moves += 1;
        a.blocked_steps = 0;
        grid.at(to).occupant = id;
    }
    for (const auto& [id, to] : outcome.evacuated) {
        AgentState& a = agents[id];
        a.last_from = a.pos;
        a.pos = to;
        a.has_moved = true;
        a.distance_moves += 1;
        a.blocked_steps = 0;
        a.evacuated_at = tick;
    }
    for (int id : outcome.stalled) agents[id].blocked_steps += 1;
}

} // namespace evac
