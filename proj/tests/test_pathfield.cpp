#include <catch_amalgamated.hpp>

#include "evac/pathfield.hpp"
#include "test_support.hpp"

using namespace evac;
using evac_test::bfs_unit_distances;
using evac_test::random_walled_grid;

namespace {

Grid walled_room(int w, int h) {
    Grid g(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (g.on_boundary({x, y})) g.at({x, y}).structure = Structure::Wall;
        }
    }
    return g;
}

ExitSpec carve_exit(Grid& g, std::vector<Pos> cells) {
    ExitSpec e;
    e.id = 1;
    for (const Pos& p : cells) {
        g.at(p).structure = Structure::ExitFloor;
        g.at(p).exit_id = 1;
        e.cells.push_back(p);
    }
    return e;
}

} // namespace

TEST_CASE("field equals the breadth-first oracle on a hazard-free room") {
    Grid g = walled_room(10, 10);
    ExitSpec e = carve_exit(g, {{0, 4}});
    HazardParams hazards;
    DistanceField f = compute_field(g, e, hazards);
    std::vector<double> oracle = bfs_unit_distances(g, e);
    for (std::size_t i = 0; i < g.cell_count(); ++i) REQUIRE(f.dist[i] == oracle[i]);
    CHECK(f.at({0, 4}) == 0.0);
    CHECK(f.at({1, 4}) == 1.0);
    CHECK(f.at({1, 5}) == 1.0); // diagonal neighbor, same move count
    CHECK(f.at({8, 4}) == 8.0);
}

TEST_CASE("field equals the oracle on a random grid corpus") {
    Rng rng(505);
    for (int trial = 0; trial < 150; ++trial) {
        ExitSpec e;
        Grid g = random_walled_grid(rng, e);
        HazardParams hazards;
        DistanceField f = compute_field(g, e, hazards);
        std::vector<double> oracle = bfs_unit_distances(g, e);
        for (std::size_t i = 0; i < g.cell_count(); ++i) {
            INFO("trial " << trial << " cell " << i);
            REQUIRE(f.dist[i] == oracle[i]);
        }
    }
}

TEST_CASE("cells ringed by fire are unreachable; exit cells are zero") {
    Grid g = walled_room(10, 10);
    ExitSpec e = carve_exit(g, {{0, 4}, {0, 5}});
    for (const Pos& off : kMooreOffsets) {
        Pos p{6 + off.x, 6 + off.y};
        g.at(p).fire_level = 1;
        g.at(p).combustible = true;
    }
    HazardParams hazards;
    hazards.heat_radius = 0; // the ring itself blocks
    DistanceField f = compute_field(g, e, hazards);
    CHECK(f.at({6, 6}) == kUnreachable);
    CHECK(f.at({0, 4}) == 0.0);
    CHECK(f.at({0, 5}) == 0.0);
    CHECK(pred_dist(f, {1, 5}) == 1.0);
}

TEST_CASE("smoke weights path costs") {
    Grid g = walled_room(8, 4);
    ExitSpec e = carve_exit(g, {{0, 1}});
    // A smoke column the path must cross.
    for (int y = 1; y <= 2; ++y) g.at({3, y}).smoke_level = 1;
    HazardParams hazards;
    hazards.smoke_weight = 10.0;
    DistanceField f = compute_field(g, e, hazards);
    // From the right of the column: 2 plain moves + 1 smoky + moves to exit.
    CHECK(f.at({4, 1}) == 3.0 + 10.0); // (4,1)->(3,1) smoky,(2,1),(1,1),(0,1)
}

TEST_CASE("descent candidates: corridor, diagonal, local minimum") {
    // 1-wide corridor.
    Grid g = walled_room(8, 3);
    ExitSpec e = carve_exit(g, {{0, 1}});
    HazardParams hazards;
    DistanceField f = compute_field(g, e, hazards);
    std::vector<Pos> c = descent_candidates(f, {4, 1});
    REQUIRE(c.size() == 1);
    CHECK(c[0] == Pos{3, 1});

    // Open floor: the diagonal neighbor with dist-1 is among the best.
    Grid g2 = walled_room(10, 10);
    ExitSpec e2 = carve_exit(g2, {{0, 2}});
    DistanceField f2 = compute_field(g2, e2, hazards);
    std::vector<Pos> c2 = descent_candidates(f2, {6, 6});
    REQUIRE_FALSE(c2.empty());
    double here = f2.at({6, 6});
    std::vector<double> oracle = bfs_unit_distances(g2, e2);
    for (const Pos& p : c2) {
        CHECK(f2.at(p) < here);
        CHECK(f2.at(p) == oracle[g2.index(p)]);
    }
    CHECK(f2.at(c2.front()) == here - 1.0);

    // A cell whose neighbors are all equal-or-greater yields no candidates.
    Grid g3 = walled_room(9, 9);
    ExitSpec e3 = carve_exit(g3, {{0, 4}});
    for (const Pos& off : kMooreOffsets) {
        Pos p{6 + off.x, 4 + off.y};
        g3.at(p).fire_level = 1;
        g3.at(p).combustible = true;
    }
    HazardParams h3;
    h3.heat_radius = 0;
    DistanceField f3 = compute_field(g3, e3, h3);
    CHECK(descent_candidates(f3, {6, 4}).empty());
}

TEST_CASE("descending the field reaches the exit within dist moves") {
    Rng rng(99);
    int checked = 0;
    for (int trial = 0; trial < 60; ++trial) {
        ExitSpec e;
        Grid g = random_walled_grid(rng, e);
        HazardParams hazards;
        DistanceField f = compute_field(g, e, hazards);
        for (int probe = 0; probe < 5; ++probe) {
            Pos p{1 + int(rng.next_below(std::uint64_t(g.width - 2))),
                  1 + int(rng.next_below(std::uint64_t(g.height - 2)))};
            double d = f.at(p);
            if (d == kUnreachable || d == 0.0) continue;
            int steps = 0;
            Pos cur = p;
            while (f.at(cur) > 0.0 && steps <= int(d)) {
                std::vector<Pos> c = descent_candidates(f, cur);
                REQUIRE_FALSE(c.empty());
                cur = c.front();
                ++steps;
            }
            REQUIRE(f.at(cur) == 0.0);
            REQUIRE(steps <= int(d));
            ++checked;
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("fields are deterministic functions of their inputs") {
    Rng rng(12);
    ExitSpec e;
    Grid g = random_walled_grid(rng, e);
    HazardParams hazards;
    DistanceField a = compute_field(g, e, hazards);
    DistanceField b = compute_field(g, e, hazards);
    CHECK(a.dist == b.dist);
}

TEST_CASE("refresh recomputes only when traversal costs change") {
    Grid g = walled_room(12, 12);
    ExitSpec e = carve_exit(g, {{0, 5}, {0, 6}});
    std::vector<ExitSpec> exits = {e};
    HazardParams hazards;
    FieldSet set = make_fields(g, exits, hazards, 0);
    CHECK(set.stamp == 0);

    CHECK_FALSE(refresh_fields(set, g, exits, hazards, 1)); // nothing changed
    CHECK(set.stamp == 0);

    g.at({6, 6}).fire_level = 1; // one new fire cell forces a recompute
    g.at({6, 6}).combustible = true;
    CHECK(refresh_fields(set, g, exits, hazards, 2));
    CHECK(set.stamp == 2);
    CHECK(set.fields[0].at({6, 6}) == kUnreachable);

    // Smoke level deepening on an already smoky cell is not a cost change.
    g.at({3, 3}).smoke_level = 1;
    CHECK(refresh_fields(set, g, exits, hazards, 3));
    g.at({3, 3}).smoke_level = 2;
    CHECK_FALSE(refresh_fields(set, g, exits, hazards, 4));
}

TEST_CASE("fire growth across an exit leaves the region beyond unreachable") {
    Grid g = walled_room(12, 8);
    ExitSpec e = carve_exit(g, {{0, 3}});
    std::vector<ExitSpec> exits = {e};
    HazardParams hazards;
    hazards.heat_radius = 0;
    FieldSet set = make_fields(g, exits, hazards, 0);
    CHECK(set.fields[0].at({10, 3}) != kUnreachable);

    // A full fire wall at x=5 splits the room.
    for (int y = 1; y <= 6; ++y) {
        g.at({5, y}).fire_level = 1;
        g.at({5, y}).combustible = true;
    }
    REQUIRE(refresh_fields(set, g, exits, hazards, 1));
    // Reachability oracle: BFS over non-fire walkable cells.
    Grid masked = g;
    for (Cell& c : masked.cells) {
        if (c.fire_level > 0) c.structure = Structure::Obstacle;
    }
    std::vector<double> oracle = bfs_unit_distances(masked, e);
    for (int y = 1; y <= 6; ++y) {
        for (int x = 6; x <= 10; ++x) {
            REQUIRE(oracle[g.index({x, y})] == kUnreachable);
            REQUIRE(set.fields[0].at({x, y}) == kUnreachable);
        }
    }
}

TEST_CASE("field text dump marks unreachable cells") {
    Grid g = walled_room(4, 3);
    ExitSpec e = carve_exit(g, {{0, 1}});
    DistanceField f = compute_field(g, e, HazardParams{});
    std::string text = field_to_text(f);
    CHECK(text.find("inf") != std::string::npos);
    CHECK(text.find('0') != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}
