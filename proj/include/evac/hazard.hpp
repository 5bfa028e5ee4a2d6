#pragma once

#include <limits>
#include <vector>

#include "evac/grid.hpp"
#include "evac/rng.hpp"

namespace evac {

inline constexpr double kBlocked = std::numeric_limits<double>::infinity();

struct HazardParams {
    // Spread probability for a clean cell with k hazard-bearing Moore
    // neighbors is beta * k / 8.
    double beta_smoke = 1.0;
    double beta_fire = 0.4;
    // Levels saturate at l_max; only presence (level >= 1) affects movement.
    int l_max = 3;
    // Cells within this Chebyshev radius of fire count as heat and block
    // movement exactly like fire itself.
    int heat_radius = 1;
    // Path cost of stepping into a smoke-only cell (plain floor costs 1).
    double smoke_weight = 10.0;

    bool valid() const {
        return beta_smoke >= 0.0 && beta_smoke <= 1.0 && beta_fire >= 0.0 && beta_fire <= 1.0 &&
               l_max >= 1 && heat_radius >= 0 && smoke_weight >= 1.0;
    }
};

namespace detail {

template <typename Level>
inline int hazard_neighbor_count(const Grid& grid, Pos p, const std::vector<std::uint8_t>& mask,
                                 Level) {
    int k = 0;
    for (const Pos& d : kMooreOffsets) {
        Pos n{p.x + d.x, p.y + d.y};
        if (grid.in_bounds(n) && mask[grid.index(n)]) ++k;
    }
    return k;
}

} // namespace detail

// Synchronous smoke update. Every smoke-bearing cell keeps its smoke and
// deepens one level toward l_max; a clean walkable cell with k smoky Moore
// neighbors catches smoke_level 1 with probability beta_smoke * k / 8.
// Draws happen in row-major order over candidate cells, so a seed pins the
// whole evolution. Returns the number of cells that newly acquired smoke and
// appends their positions to `newly_affected` when given.
inline int step_smoke(Grid& grid, const HazardParams& params, Rng& rng,
                      std::vector<Pos>* newly_affected = nullptr) {
    std::vector<std::uint8_t> had(grid.cell_count(), 0);
    for (std::size_t i = 0; i < grid.cell_count(); ++i) had[i] = grid.cells[i].smoke_level > 0;

    int newly = 0;
    for (int y = 0; y < grid.height; ++y) {
        for (int x = 0; x < grid.width; ++x) {
            Pos p{x, y};
            Cell& c = grid.at(p);
            if (!c.walkable_structure()) continue;
            if (had[grid.index(p)]) {
                if (c.smoke_level < params.l_max) c.smoke_level += 1;
                continue;
            }
            int k = detail::hazard_neighbor_count(grid, p, had, 0);
            if (k == 0) continue;
            if (rng.bernoulli(params.beta_smoke * k / 8.0)) {
                c.smoke_level = 1;
                ++newly;
                if (newly_affected) newly_affected->push_back(p);
            }
        }
    }
    return newly;
}

// Fire spreads like smoke with two restrictions: only combustible cells
// ignite, and never while an agent stands on them (there is no person+fire
// state and casualties are out of scope). Igniting a cell also gives it
// smoke. Returns the number of newly ignited cells and appends their
// positions to `newly_affected` when given.
inline int step_fire(Grid& grid, const HazardParams& params, Rng& rng,
                     std::vector<Pos>* newly_affected = nullptr) {
    std::vector<std::uint8_t> had(grid.cell_count(), 0);
    for (std::size_t i = 0; i < grid.cell_count(); ++i) had[i] = grid.cells[i].fire_level > 0;

    int newly = 0;
    for (int y = 0; y < grid.height; ++y) {
        for (int x = 0; x < grid.width; ++x) {
            Pos p{x, y};
            Cell& c = grid.at(p);
            if (!c.walkable_structure()) continue;
            if (had[grid.index(p)]) {
                if (c.fire_level < params.l_max) c.fire_level += 1;
                continue;
            }
            if (!c.combustible || c.occupant != kNoAgent) continue;
            int k = detail::hazard_neighbor_count(grid, p, had, 0);
            if (k == 0) continue;
            if (rng.bernoulli(params.beta_fire * k / 8.0)) {
                c.fire_level = 1;
                if (c.smoke_level == 0) c.smoke_level = 1;
                ++newly;
                if (newly_affected) newly_affected->push_back(p);
            }
        }
    }
    return newly;
}

// Per-cell heat mask: walkable cells within heat_radius (Chebyshev) of any
// burning cell. heat_radius 0 yields exactly the fire cells.
inline std::vector<std::uint8_t> heat_mask(const Grid& grid, const HazardParams& params) {
    std::vector<std::uint8_t> mask(grid.cell_count(), 0);
    const int r = params.heat_radius;
    for (int y = 0; y < grid.height; ++y) {
        for (int x = 0; x < grid.width; ++x) {
            if (grid.at({x, y}).fire_level == 0) continue;
            for (int dy = -r; dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    Pos n{x + dx, y + dy};
                    if (grid.in_bounds(n) && grid.at(n).walkable_structure()) mask[grid.index(n)] = 1;
                }
            }
        }
    }
    return mask;
}

inline std::vector<Pos> heat_zone(const Grid& grid, const HazardParams& params) {
    std::vector<std::uint8_t> mask = heat_mask(grid, params);
    std::vector<Pos> zone;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) zone.push_back(grid.pos_of(static_cast<int>(i)));
    }
    return zone;
}

// Single source of truth for what pathfinding may enter and at what price:
// walls, obstacles, fire and heat are impassable; smoke costs smoke_weight;
// anything else costs 1.
inline double traversal_cost(const Cell& cell, bool in_heat, const HazardParams& params) {
    if (cell.structure == Structure::Wall || cell.structure == Structure::Obstacle) return kBlocked;
    if (cell.fire_level > 0 || in_heat) return kBlocked;
    if (cell.smoke_level > 0) return params.smoke_weight;
    return 1.0;
}

struct HazardField {
    std::vector<std::uint8_t> fire;
    std::vector<std::uint8_t> smoke;
    std::vector<std::uint8_t> heat;
    int fire_count = 0;
    int smoke_count = 0;
};

inline HazardField compute_hazard_field(const Grid& grid, const HazardParams& params) {
    HazardField f;
    f.fire.resize(grid.cell_count(), 0);
    f.smoke.resize(grid.cell_count(), 0);
    for (std::size_t i = 0; i < grid.cell_count(); ++i) {
        if (grid.cells[i].fire_level > 0) {
            f.fire[i] = 1;
            ++f.fire_count;
        }
        if (grid.cells[i].smoke_level > 0) {
            f.smoke[i] = 1;
            ++f.smoke_count;
        }
    }
    f.heat = heat_mask(grid, params);
    return f;
}

// Per-cell movement costs for the whole grid, shared by every exit's field
// and by intent validation.
inline std::vector<double> traversal_costs(const Grid& grid, const HazardParams& params) {
    std::vector<std::uint8_t> heat = heat_mask(grid, params);
    std::vector<double> costs(grid.cell_count(), 1.0);
    for (std::size_t i = 0; i < grid.cell_count(); ++i) {
        costs[i] = traversal_cost(grid.cells[i], heat[i] != 0, params);
    }
    return costs;
}

} // namespace evac
