#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "evac/resolver.hpp"
#include "evac/world.hpp"

namespace evac {

// ---------------------------------------------------------------------------
// Prediction primitives
// ---------------------------------------------------------------------------

// Unobstructed travel time: one move per tick.
inline double min_pred_time_to(double pred_dist_moves, double tick_seconds = kTickSeconds) {
    if (pred_dist_moves == kUnreachable) return kUnreachable;
    return pred_dist_moves * tick_seconds;
}

// Time for an exit's queue to drain at one agent per exit cell per tick,
// which is exactly the throughput the conflict resolver enforces.
inline double estimate_evac_time(double intenders, int width_cells,
                                 double tick_seconds = kTickSeconds) {
    if (intenders <= 0.0) return 0.0;
    return std::ceil(intenders / width_cells) * tick_seconds;
}

// Predicted cost of evacuating through one exit. When the walk there takes
// at least as long as the queue needs to drain, the queue term drops out:
// the door will be clear on arrival.
inline double cost(double min_pred_time, double evac_pred_time, double pred_dist,
                   double intenders) {
    if (pred_dist == kUnreachable || min_pred_time == kUnreachable) return kUnreachable;
    double i = std::max(1.0, intenders);
    if (min_pred_time >= evac_pred_time) return min_pred_time * pred_dist * i;
    return evac_pred_time * min_pred_time * pred_dist * i;
}

// Estimated number of agents intending to use the exit: the visible agents
// heading there plus the estimating agent itself. An exit out of sight gets
// the neutral floor of 1 so its cost stays positive and comparable.
inline int estimate_I(const Percept& percept, int exit_id) {
    bool visible = std::find(percept.visible_exits.begin(), percept.visible_exits.end(),
                             exit_id) != percept.visible_exits.end();
    if (!visible) return 1;
    auto it = percept.oriented_counts.find(exit_id);
    return (it == percept.oriented_counts.end() ? 0 : it->second) + 1;
}

// ---------------------------------------------------------------------------
// Re-deliberation damping
// ---------------------------------------------------------------------------

// Base re-deliberation period scales with the environment size.
inline int effective_base_period(const BehaviorParams& params, const Grid& grid) {
    if (params.base_period > 0) return params.base_period;
    double diag = std::sqrt(double(grid.width) * grid.width + double(grid.height) * grid.height);
    return static_cast<int>(std::ceil(diag / 5.0));
}

// The period between deliberations grows as the run ages, damping the
// crowd-wide oscillation of agents re-picking the same "fastest" exit.
inline bool reconsider_allowed(const AgentState& agent, long tick, const BehaviorParams& params,
                               const Grid& grid) {
    if (agent.last_deliberation_tick == kNeverDeliberated) return true;
    long period = effective_base_period(params, grid) + tick / params.growth_divisor;
    return tick - agent.last_deliberation_tick >= period;
}

// ---------------------------------------------------------------------------
// Perception
// ---------------------------------------------------------------------------

// A cell is visible iff no wall, obstacle or burning cell lies strictly
// between (cells on the Bresenham line, endpoints excluded).
inline bool line_of_sight(const Grid& grid, Pos a, Pos b) {
    int x = a.x, y = a.y;
    int dx = std::abs(b.x - a.x), sx = a.x < b.x ? 1 : -1;
    int dy = -std::abs(b.y - a.y), sy = a.y < b.y ? 1 : -1;
    int err = dx + dy;
    while (true) {
        if (!(x == a.x && y == a.y) && !(x == b.x && y == b.y)) {
            const Cell& c = grid.at({x, y});
            if (c.structure == Structure::Wall || c.structure == Structure::Obstacle ||
                c.fire_level > 0)
                return false;
        }
        if (x == b.x && y == b.y) return true;
        int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y += sy;
        }
    }
}

namespace detail {

// Same line, but over the world's precomputed blocker mask.
inline bool los_masked(const World& w, Pos a, Pos b) {
    const Grid& grid = w.grid;
    int x = a.x, y = a.y;
    int dx = std::abs(b.x - a.x), sx = a.x < b.x ? 1 : -1;
    int dy = -std::abs(b.y - a.y), sy = a.y < b.y ? 1 : -1;
    int err = dx + dy;
    while (true) {
        if (!(x == a.x && y == a.y) && !(x == b.x && y == b.y)) {
            if (w.sight_block[static_cast<std::size_t>(y) * grid.width + x]) return false;
        }
        if (x == b.x && y == b.y) return true;
        int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y += sy;
        }
    }
}

} // namespace detail

inline int sight_range_of(const World& w, const AgentState& a) {
    if (w.grid.at(a.pos).smoke_level > 0) return w.behavior.sight_range_smoke;
    if (w.behavior.sight_range <= 0) return w.grid.width + w.grid.height; // unlimited
    return w.behavior.sight_range;
}

// Full perception of the world from one agent's cell: visible cells within
// sight range, visible exits, the crowd heading for each visible exit, and
// hazard cells this agent had not seen before.
inline Percept perceive(const World& w, int agent_id) {
    const AgentState& a = w.agents[agent_id];
    const Grid& grid = w.grid;
    Percept pct;

    const int range = sight_range_of(w, a);
    const int x0 = std::max(0, a.pos.x - range), x1 = std::min(grid.width - 1, a.pos.x + range);
    const int y0 = std::max(0, a.pos.y - range), y1 = std::min(grid.height - 1, a.pos.y + range);

    const std::size_t words = (grid.cell_count() + 63) / 64;
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            Pos p{x, y};
            if (p == a.pos) continue;
            if (!detail::los_masked(w, a.pos, p)) continue;
            pct.visible_positions.push_back(p);

            const Cell& c = grid.at(p);
            const int idx = grid.index(p);
            bool hazardous = c.fire_level > 0 || c.smoke_level > 0 ||
                             (!w.hz.heat.empty() && w.hz.heat[idx]);
            if (hazardous) {
                bool known = a.known_hazards.size() == words &&
                             (a.known_hazards[idx / 64] >> (idx % 64)) & 1u;
                if (!known) pct.hazard_deltas.push_back(p);
            }
        }
    }

    for (const ExitSpec& e : w.exits) {
        for (const Pos& c : e.cells) {
            if (chebyshev(a.pos, c) <= range && detail::los_masked(w, a.pos, c)) {
                pct.visible_exits.push_back(e.id);
                break;
            }
        }
    }
    std::sort(pct.visible_exits.begin(), pct.visible_exits.end());

    for (int id : pct.visible_exits) {
        int exit_idx = w.exit_index(id);
        int count = 0;
        for (const Pos& p : pct.visible_positions) {
            int occ = grid.at(p).occupant;
            if (occ == kNoAgent || occ == agent_id) continue;
            if (oriented_toward(w, w.agents[occ], exit_idx)) ++count;
        }
        pct.oriented_counts[id] = count;
    }
    return pct;
}

// Folds freshly seen hazard cells into the agent's memory.
inline void update_knowledge(AgentState& a, const Grid& grid, const Percept& percept) {
    const std::size_t words = (grid.cell_count() + 63) / 64;
    if (a.known_hazards.size() != words) a.known_hazards.assign(words, 0);
    for (const Pos& p : percept.hazard_deltas) {
        int idx = grid.index(p);
        a.known_hazards[idx / 64] |= (std::uint64_t{1} << (idx % 64));
    }
}

namespace detail {

// The percept slice deliberation actually consumes (visible exits and
// oriented counts), computed without materializing every visible cell. Its
// agreement with perceive() is pinned by a property test.
inline Percept deliberation_percept(const World& w, int agent_id) {
    const AgentState& a = w.agents[agent_id];
    Percept pct;
    const int range = sight_range_of(w, a);

    std::vector<int> exit_indices;
    for (std::size_t e = 0; e < w.exits.size(); ++e) {
        for (const Pos& c : w.exits[e].cells) {
            if (chebyshev(a.pos, c) <= range && los_masked(w, a.pos, c)) {
                pct.visible_exits.push_back(w.exits[e].id);
                exit_indices.push_back(static_cast<int>(e));
                break;
            }
        }
    }
    if (exit_indices.empty()) return pct;
    for (int id : pct.visible_exits) pct.oriented_counts[id] = 0;

    for (std::size_t b = 0; b < w.agents.size(); ++b) {
        if (static_cast<int>(b) == agent_id) continue;
        const AgentState& other = w.agents[b];
        if (!other.active() || w.oriented_mask[b] == 0) continue;
        if (chebyshev(a.pos, other.pos) > range) continue;
        if (!los_masked(w, a.pos, other.pos)) continue;
        for (std::size_t k = 0; k < exit_indices.size(); ++k) {
            if (w.oriented_mask[b] & (1u << exit_indices[k]))
                ++pct.oriented_counts[pct.visible_exits[k]];
        }
    }
    return pct;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Deliberation
// ---------------------------------------------------------------------------

// Exit with the smallest predicted distance; ties go to the lowest exit id.
inline std::optional<int> nearest_exit(const FieldSet& fields, const std::vector<ExitSpec>& exits,
                                       Pos pos) {
    std::optional<int> best;
    double best_d = kUnreachable;
    for (std::size_t i = 0; i < exits.size(); ++i) {
        double d = fields.fields[i].at(pos);
        if (d == kUnreachable) continue;
        if (!best || d < best_d || (d == best_d && exits[i].id < *best)) {
            best = exits[i].id;
            best_d = d;
        }
    }
    return best;
}

// Exit with the smallest predicted evacuation cost; ties go to the lowest id.
inline std::optional<int> best_predicted_exit(const World& w, Pos pos, const Percept& percept) {
    std::optional<int> best;
    double best_cost = kUnreachable;
    for (std::size_t i = 0; i < w.exits.size(); ++i) {
        double d = w.fields.fields[i].at(pos);
        if (d == kUnreachable) continue;
        int intenders = estimate_I(percept, w.exits[i].id);
        double c = cost(min_pred_time_to(d), estimate_evac_time(intenders, w.exits[i].width_cells()),
                        d, intenders);
        if (!best || c < best_cost || (c == best_cost && w.exits[i].id < *best)) {
            best = w.exits[i].id;
            best_cost = c;
        }
    }
    return best;
}

// Commits the agent to an objective exit (or to none, if every exit is
// unreachable: the agent is trapped and reported at run end).
inline std::optional<int> deliberate(World& w, int agent_id, const Percept& percept) {
    AgentState& a = w.agents[agent_id];
    a.last_deliberation_tick = w.tick;
    std::optional<int> chosen = a.behavior == Behavior::NearestExit
                                    ? nearest_exit(w.fields, w.exits, a.pos)
                                    : best_predicted_exit(w, a.pos, percept);
    a.objective_exit = chosen;
    return chosen;
}

// ---------------------------------------------------------------------------
// Control step
// ---------------------------------------------------------------------------

namespace detail {

// Random unoccupied, unblocked neighbor; the jam and hazard escape move.
// With `allow_occupied`, a crowded-in agent nominates an occupied neighbor
// instead and rides the chain-grant rules.
inline std::optional<MoveIntent> escape_move(World& w, int agent_id, bool allow_occupied = false) {
    const AgentState& a = w.agents[agent_id];
    Pos options[8], occupied[8];
    int n = 0, n_occ = 0;
    for (const Pos& off : kMooreOffsets) {
        Pos p{a.pos.x + off.x, a.pos.y + off.y};
        if (!w.grid.in_bounds(p)) continue;
        const Cell& c = w.grid.at(p);
        if (!c.walkable_structure() || w.cell_blocked(p)) continue;
        if (c.occupant == kNoAgent) options[n++] = p;
        else occupied[n_occ++] = p;
    }
    if (n > 0) {
        Pos to = options[w.rng.next_below(static_cast<std::uint64_t>(n))];
        return MoveIntent{agent_id, a.pos, to};
    }
    if (allow_occupied && n_occ > 0) {
        Pos to = occupied[w.rng.next_below(static_cast<std::uint64_t>(n_occ))];
        return MoveIntent{agent_id, a.pos, to};
    }
    return std::nullopt;
}

// Can the agent see any cell that turned hazardous last tick?
inline bool sees_fresh_hazard(const World& w, const AgentState& a) {
    if (w.fresh_hazards.empty()) return false;
    const int range = sight_range_of(w, a);
    for (const Pos& p : w.fresh_hazards) {
        if (chebyshev(a.pos, p) <= range && los_masked(w, a.pos, p)) return true;
    }
    return false;
}

} // namespace detail

// One iteration of the agent's sense-think-act loop: refresh the objective
// when it is missing, when it became infeasible, or when a re-deliberation
// is due and the agent has just seen new hazard cells; then nominate a
// cell. Normal motion takes the best free descent candidate (seeded-random
// among equals), falls back to the best occupied one, and a persistently
// blocked agent instead tries any free neighbor to shake the jam. Returns
// nothing when the agent is trapped or boxed in.
inline std::optional<MoveIntent> control_step(World& w, int agent_id) {
    AgentState& a = w.agents[agent_id];
    const AgentProfile& prof = w.profiles[agent_id];

    if (!a.stress_event_fired && a.stress > prof.stress_tolerance) {
        a.stress_event_fired = true;
        if (auto to = w.behavior.transitions.next(a.behavior, BehaviorEvent::StressExceedsTolerance))
            a.behavior = *to;
    }

    const bool own_blocked = w.cell_blocked(a.pos);
    int obj_idx = a.objective_exit ? w.exit_index(*a.objective_exit) : -1;
    bool feasible = obj_idx >= 0 && w.fields.fields[obj_idx].at(a.pos) != kUnreachable;

    if (a.objective_exit && !feasible) {
        if (auto to = w.behavior.transitions.next(a.behavior, BehaviorEvent::ObjectiveInfeasible))
            a.behavior = *to;
    }

    if (!a.objective_exit || !feasible ||
        (reconsider_allowed(a, w.tick, w.behavior, w.grid) && detail::sees_fresh_hazard(w, a))) {
        Percept percept;
        if (a.behavior == Behavior::BestPredictedExit)
            percept = detail::deliberation_percept(w, agent_id);
        deliberate(w, agent_id, percept);
        obj_idx = a.objective_exit ? w.exit_index(*a.objective_exit) : -1;
    }

    // Hazard swept over this cell: getting out beats standing in it, even if
    // the only way out is to queue behind a neighbor.
    if (own_blocked) return detail::escape_move(w, agent_id, /*allow_occupied=*/true);

    if (!a.objective_exit) return std::nullopt; // trapped; stays put

    const DistanceField& field = w.fields.fields[obj_idx];
    const double here = field.at(a.pos);
    if (here == kUnreachable) return std::nullopt;

    if (a.blocked_steps >= w.behavior.prudential_limit) {
        if (auto esc = detail::escape_move(w, agent_id)) return esc;
    }

    Pos best_free[8], best_occ[8];
    int n_free = 0, n_occ = 0;
    double d_free = kUnreachable, d_occ = kUnreachable;
    for (const Pos& off : kMooreOffsets) {
        Pos p{a.pos.x + off.x, a.pos.y + off.y};
        if (!w.grid.in_bounds(p)) continue;
        double d = field.at(p);
        if (d >= here) continue;
        if (w.grid.at(p).occupant == kNoAgent) {
            if (d < d_free) {
                d_free = d;
                n_free = 0;
            }
            if (d == d_free) best_free[n_free++] = p;
        } else {
            if (d < d_occ) {
                d_occ = d;
                n_occ = 0;
            }
            if (d == d_occ) best_occ[n_occ++] = p;
        }
    }
    if (n_free > 0) {
        Pos to = n_free == 1 ? best_free[0]
                             : best_free[w.rng.next_below(static_cast<std::uint64_t>(n_free))];
        return MoveIntent{agent_id, a.pos, to};
    }
    if (n_occ > 0) {
        Pos to = n_occ == 1 ? best_occ[0]
                            : best_occ[w.rng.next_below(static_cast<std::uint64_t>(n_occ))];
        return MoveIntent{agent_id, a.pos, to};
    }
    return std::nullopt; // transient local minimum; wait for the next refresh
}

} // namespace evac
