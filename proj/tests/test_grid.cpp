#include <catch_amalgamated.hpp>

#include <set>

#include "evac/grid.hpp"
#include "evac/rng.hpp"
#include "evac/scenario.hpp"

using namespace evac;

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

void carve_exit(Grid& g, ExitSpec& e) {
    for (const Pos& p : e.cells) {
        g.at(p).structure = Structure::ExitFloor;
        g.at(p).exit_id = static_cast<std::uint8_t>(e.id);
    }
}

} // namespace

TEST_CASE("moore neighborhood sizes and clipping") {
    Grid g(10, 10);
    CHECK(moore_neighborhood(g, {5, 5}).size() == 8);
    CHECK(moore_neighborhood(g, {0, 0}).size() == 3);
    CHECK(moore_neighborhood(g, {0, 5}).size() == 5);
    CHECK_THROWS_AS(moore_neighborhood(g, {10, 5}), std::out_of_range);
    CHECK_THROWS_AS(moore_neighborhood(g, {-1, 0}), std::out_of_range);
}

TEST_CASE("moore neighborhood order is row-major and fixed") {
    Grid g(5, 5);
    std::vector<Pos> n = moore_neighborhood(g, {2, 2});
    std::vector<Pos> expected = {{1, 1}, {2, 1}, {3, 1}, {1, 2}, {3, 2}, {1, 3}, {2, 3}, {3, 3}};
    CHECK(n == expected);
}

TEST_CASE("moore neighborhood never contains the center or out-of-bounds cells") {
    Grid g(7, 4);
    Rng rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        Pos p{static_cast<int>(rng.next_below(7)), static_cast<int>(rng.next_below(4))};
        std::vector<Pos> n = moore_neighborhood(g, p);
        std::set<std::size_t> sizes = {3, 5, 8};
        CHECK(sizes.count(n.size()) == 1);
        for (const Pos& q : n) {
            CHECK(q != p);
            CHECK(g.in_bounds(q));
            CHECK(chebyshev(p, q) == 1);
        }
    }
}

TEST_CASE("state projection covers all seven states") {
    Cell c;
    CHECK(state_of(c) == QState::E);

    c.smoke_level = 2;
    c.occupant = 7;
    CHECK(state_of(c) == QState::PS);

    c.occupant = kNoAgent;
    c.smoke_level = 1;
    c.fire_level = 3;
    CHECK(state_of(c) == QState::SF); // fire dominates smoke

    c = Cell{};
    c.occupant = 3;
    CHECK(state_of(c) == QState::P);
    c.occupant = kNoAgent;
    c.smoke_level = 1;
    CHECK(state_of(c) == QState::S);

    c = Cell{};
    c.structure = Structure::Wall;
    CHECK(state_of(c) == QState::W);
    c.structure = Structure::Obstacle;
    CHECK(state_of(c) == QState::O);
}

TEST_CASE("state projection is total over random valid cells") {
    Rng rng(7);
    for (int i = 0; i < 2000; ++i) {
        Cell c;
        switch (rng.next_below(4)) {
            case 0: c.structure = Structure::Wall; break;
            case 1: c.structure = Structure::Obstacle; break;
            case 2: c.structure = Structure::Floor; break;
            default: c.structure = Structure::ExitFloor; break;
        }
        if (c.walkable_structure()) {
            c.smoke_level = static_cast<std::uint8_t>(rng.next_below(4));
            c.fire_level = static_cast<std::uint8_t>(rng.next_below(4));
            if (c.fire_level == 0 && rng.bernoulli(0.5)) c.occupant = 11;
        }
        QState q = state_of(c);
        bool known = q == QState::W || q == QState::E || q == QState::P || q == QState::O ||
                     q == QState::S || q == QState::SF || q == QState::PS;
        CHECK(known);
    }
}

TEST_CASE("validate_geometry accepts the reference hall") {
    ScenarioSpec spec;
    spec.width_m = 20.0;
    spec.height_m = 30.0;
    spec.exits.push_back({1, "left", 5, 4});
    spec.exits.push_back({2, "right", 53, 4});
    std::vector<std::string> errors;
    std::vector<ExitSpec> exits;
    Grid g = build_grid(spec, exits, errors);
    REQUIRE(errors.empty());
    CHECK(g.width == 50);
    CHECK(g.height == 75);
    CHECK(validate_geometry(g, exits).empty());
}

TEST_CASE("validate_geometry flags an open boundary") {
    Grid g = walled_room(8, 8);
    g.at({3, 0}).structure = Structure::Floor; // hole in the ring
    std::vector<std::string> v = validate_geometry(g, {});
    REQUIRE_FALSE(v.empty());
    CHECK(v.front().find("open boundary") != std::string::npos);
}

TEST_CASE("validate_geometry flags a non-contiguous exit") {
    Grid g = walled_room(10, 10);
    ExitSpec e;
    e.id = 1;
    e.cells = {{0, 2}, {0, 4}}; // split by a wall cell at (0,3)
    carve_exit(g, e);
    std::vector<std::string> v = validate_geometry(g, {e});
    bool found = false;
    for (const std::string& s : v) found = found || s.find("non-contiguous exit") != std::string::npos;
    CHECK(found);
}

TEST_CASE("validate_geometry flags occupants and hazards on walls") {
    Grid g = walled_room(6, 6);
    g.at({0, 2}).occupant = 4;
    g.at({5, 3}).smoke_level = 1;
    std::vector<std::string> v = validate_geometry(g, {});
    int hits = 0;
    for (const std::string& s : v) {
        if (s.find("occupant on wall") != std::string::npos) ++hits;
        if (s.find("hazard level on wall") != std::string::npos) ++hits;
    }
    CHECK(hits == 2);
}

TEST_CASE("walls and obstacles are immutable under scenario build") {
    ScenarioSpec spec;
    spec.width_m = 4.0;
    spec.height_m = 4.0;
    spec.exits.push_back({1, "top", 3, 2});
    spec.obstacle_cells.push_back({4, 4});
    std::vector<std::string> errors;
    std::vector<ExitSpec> exits;
    Grid g = build_grid(spec, exits, errors);
    REQUIRE(errors.empty());
    int walls = 0, obstacles = 0;
    for (const Cell& c : g.cells) {
        walls += c.structure == Structure::Wall;
        obstacles += c.structure == Structure::Obstacle;
    }
    CHECK(walls == 4 * 10 - 4 - 2); // ring minus corners counted once, minus exit cells
    CHECK(obstacles == 1);
}
