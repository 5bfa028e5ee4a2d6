#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "evac/grid.hpp"
#include "evac/hazard.hpp"

namespace evac {

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

// Shortest-path cost (in moves, smoke-weighted) from every cell to one exit.
// Shared by all agents heading there; descending it step by step is the plan.
struct DistanceField {
    int exit_id = 0;
    int width = 0;
    int height = 0;
    std::vector<double> dist;
    long stamp = -1; // tick at which the field was computed

    double at(Pos p) const { return dist[static_cast<std::size_t>(p.y) * width + p.x]; }
};

namespace detail {

// Multi-source Dijkstra over the 8-connected grid. The edge cost of a move
// is the traversal cost of the cell being entered; occupied cells are not
// blocked here, crowding is the resolver's problem.
inline DistanceField compute_field_with_costs(const Grid& grid, const ExitSpec& exit,
                                              const std::vector<double>& costs, long stamp) {
    DistanceField f;
    f.exit_id = exit.id;
    f.width = grid.width;
    f.height = grid.height;
    f.stamp = stamp;
    f.dist.assign(grid.cell_count(), kUnreachable);

    using Item = std::pair<double, int>; // (dist, cell index)
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> open;
    for (const Pos& p : exit.cells) {
        if (!grid.in_bounds(p)) continue;
        if (costs[grid.index(p)] == kBlocked) continue; // a burning exit cell admits nobody
        f.dist[grid.index(p)] = 0.0;
        open.emplace(0.0, grid.index(p));
    }

    while (!open.empty()) {
        auto [d, idx] = open.top();
        open.pop();
        if (d > f.dist[idx]) continue;
        Pos p = grid.pos_of(idx);
        for (const Pos& off : kMooreOffsets) {
            Pos n{p.x + off.x, p.y + off.y};
            if (!grid.in_bounds(n)) continue;
            int nidx = grid.index(n);
            double step = costs[nidx];
            if (step == kBlocked) continue;
            double nd = d + step;
            if (nd < f.dist[nidx]) {
                f.dist[nidx] = nd;
                open.emplace(nd, nidx);
            }
        }
    }
    return f;
}

} // namespace detail

inline DistanceField compute_field(const Grid& grid, const ExitSpec& exit,
                                   const HazardParams& hazards, long stamp = 0) {
    return detail::compute_field_with_costs(grid, exit, traversal_costs(grid, hazards), stamp);
}

inline double pred_dist(const DistanceField& field, Pos pos) { return field.at(pos); }

// Moore neighbors strictly closer to the exit, best first; ties keep
// neighborhood order so a seeded random pick downstream stays reproducible.
inline std::vector<Pos> descent_candidates(const DistanceField& field, Pos pos) {
    std::vector<Pos> out;
    out.reserve(8);
    const double here = field.at(pos);
    for (const Pos& off : kMooreOffsets) {
        Pos n{pos.x + off.x, pos.y + off.y};
        if (n.x < 0 || n.x >= field.width || n.y < 0 || n.y >= field.height) continue;
        if (field.at(n) < here) out.push_back(n);
    }
    std::stable_sort(out.begin(), out.end(),
                     [&](const Pos& a, const Pos& b) { return field.at(a) < field.at(b); });
    return out;
}

// All per-exit fields plus the cost signature they were computed from.
struct FieldSet {
    std::vector<DistanceField> fields; // parallel to the exit list
    std::vector<double> costs;         // per-cell traversal costs at `stamp`
    long stamp = -1;

    const DistanceField& for_exit_index(std::size_t i) const { return fields[i]; }
};

inline FieldSet make_fields(const Grid& grid, const std::vector<ExitSpec>& exits,
                            const HazardParams& hazards, long tick) {
    FieldSet set;
    set.costs = traversal_costs(grid, hazards);
    set.stamp = tick;
    set.fields.reserve(exits.size());
    for (const ExitSpec& e : exits) {
        set.fields.push_back(detail::compute_field_with_costs(grid, e, set.costs, tick));
    }
    return set;
}

// Recompute every field when any cell's traversal cost changed since the
// stored stamp (hazard growth); no-op otherwise. Returns true on recompute.
inline bool refresh_fields(FieldSet& set, const Grid& grid, const std::vector<ExitSpec>& exits,
                           const HazardParams& hazards, long tick) {
    std::vector<double> costs = traversal_costs(grid, hazards);
    if (costs == set.costs && set.fields.size() == exits.size()) return false;
    set.costs = std::move(costs);
    set.stamp = tick;
    set.fields.clear();
    set.fields.reserve(exits.size());
    for (const ExitSpec& e : exits) {
        set.fields.push_back(detail::compute_field_with_costs(grid, e, set.costs, tick));
    }
    return true;
}

// Debug rendering: one row per grid row, "inf" for unreachable cells.
inline std::string field_to_text(const DistanceField& field) {
    std::string out;
    char buf[32];
    for (int y = 0; y < field.height; ++y) {
        for (int x = 0; x < field.width; ++x) {
            double d = field.at({x, y});
            if (x > 0) out += ' ';
            if (d == kUnreachable) {
                out += "inf";
            } else {
                std::snprintf(buf, sizeof(buf), "%g", d);
                out += buf;
            }
        }
        out += '\n';
    }
    return out;
}

} // namespace evac
