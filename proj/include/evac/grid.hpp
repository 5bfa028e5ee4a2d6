#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace evac {

// One cell is 0.4 m x 0.4 m; one tick is the time a pedestrian needs to
// cross one cell.
inline constexpr double kCellSideMeters = 0.4;
inline constexpr double kTickSeconds = 0.3;

inline constexpr std::int32_t kNoAgent = -1;

struct Pos {
    int x = 0;
    int y = 0;

    bool operator==(const Pos& o) const { return x == o.x && y == o.y; }
    bool operator!=(const Pos& o) const { return !(*this == o); }
    bool operator<(const Pos& o) const { return y != o.y ? y < o.y : x < o.x; }
};

inline int chebyshev(Pos a, Pos b) {
    int dx = a.x > b.x ? a.x - b.x : b.x - a.x;
    int dy = a.y > b.y ? a.y - b.y : b.y - a.y;
    return dx > dy ? dx : dy;
}

enum class Structure : std::uint8_t {
    Wall,      // boundary ring, immutable
    Obstacle,  // interior barrier, immutable
    Floor,
    ExitFloor, // walkable boundary cell; stepping onto it evacuates the agent
};

// Projection of a cell onto the seven observable states.
enum class QState : std::uint8_t { W, E, P, O, S, SF, PS };

inline char q_char(QState q) {
    switch (q) {
        case QState::W: return 'W';
        case QState::E: return 'E';
        case QState::P: return 'P';
        case QState::O: return 'O';
        case QState::S: return 'S';
        case QState::SF: return 'F';
        case QState::PS: return 'X';
    }
    return '?';
}

struct Cell {
    Structure structure = Structure::Floor;
    std::uint8_t exit_id = 0;     // meaningful only for ExitFloor
    std::uint8_t smoke_level = 0; // 0..l_max
    std::uint8_t fire_level = 0;  // 0..l_max
    bool combustible = false;
    std::int32_t occupant = kNoAgent;

    bool walkable_structure() const {
        return structure == Structure::Floor || structure == Structure::ExitFloor;
    }
};

// state_of is total on valid cells: fire dominates smoke, a person in smoke
// is its own state, walls and obstacles never carry anything else.
inline QState state_of(const Cell& c) {
    if (c.structure == Structure::Wall) return QState::W;
    if (c.structure == Structure::Obstacle) return QState::O;
    if (c.fire_level > 0) return QState::SF;
    if (c.occupant != kNoAgent) return c.smoke_level > 0 ? QState::PS : QState::P;
    return c.smoke_level > 0 ? QState::S : QState::E;
}

struct Grid {
    int width = 0;
    int height = 0;
    std::vector<Cell> cells; // row-major, index = y * width + x

    Grid() = default;
    Grid(int w, int h) : width(w), height(h), cells(static_cast<std::size_t>(w) * h) {}

    bool in_bounds(Pos p) const { return p.x >= 0 && p.x < width && p.y >= 0 && p.y < height; }
    bool on_boundary(Pos p) const {
        return p.x == 0 || p.y == 0 || p.x == width - 1 || p.y == height - 1;
    }
    int index(Pos p) const { return p.y * width + p.x; }
    Pos pos_of(int idx) const { return Pos{idx % width, idx / width}; }

    Cell& at(Pos p) { return cells[static_cast<std::size_t>(index(p))]; }
    const Cell& at(Pos p) const { return cells[static_cast<std::size_t>(index(p))]; }

    std::size_t cell_count() const { return cells.size(); }
};

// Moore offsets in row-major order (top row left to right, then middle,
// then bottom). The fixed order makes every downstream tie-break and seeded
// random choice reproducible.
inline constexpr std::array<Pos, 8> kMooreOffsets = {{
    {-1, -1}, {0, -1}, {1, -1},
    {-1, 0},            {1, 0},
    {-1, 1},  {0, 1},  {1, 1},
}};

inline std::vector<Pos> moore_neighborhood(const Grid& grid, Pos pos) {
    if (!grid.in_bounds(pos)) {
        throw std::out_of_range("moore_neighborhood: position (" + std::to_string(pos.x) + "," +
                                std::to_string(pos.y) + ") is out of bounds");
    }
    std::vector<Pos> out;
    out.reserve(8);
    for (const Pos& d : kMooreOffsets) {
        Pos n{pos.x + d.x, pos.y + d.y};
        if (grid.in_bounds(n)) out.push_back(n);
    }
    return out;
}

struct ExitSpec {
    int id = 0;
    std::vector<Pos> cells; // contiguous run on the boundary ring

    int width_cells() const { return static_cast<int>(cells.size()); }
};

namespace detail {

inline bool exit_cells_contiguous(const ExitSpec& e) {
    if (e.cells.empty()) return false;
    bool same_x = true;
    bool same_y = true;
    for (const Pos& p : e.cells) {
        same_x = same_x && p.x == e.cells.front().x;
        same_y = same_y && p.y == e.cells.front().y;
    }
    if (!same_x && !same_y) return false;
    std::vector<int> run;
    run.reserve(e.cells.size());
    for (const Pos& p : e.cells) run.push_back(same_x ? p.y : p.x);
    std::sort(run.begin(), run.end());
    for (std::size_t i = 1; i < run.size(); ++i) {
        if (run[i] != run[i - 1] + 1) return false;
    }
    return true;
}

} // namespace detail

// Structural lint for a built grid. Returns human-readable violations and
// never mutates; an empty result means the geometry is usable.
inline std::vector<std::string> validate_geometry(const Grid& grid,
                                                  const std::vector<ExitSpec>& exits) {
    std::vector<std::string> violations;
    auto fail = [&](const std::string& msg) { violations.push_back(msg); };

    if (grid.width < 3 || grid.height < 3) {
        fail("grid too small: need at least 3x3 including the boundary ring");
        return violations;
    }

    std::vector<std::uint8_t> declared(grid.cell_count(), 0);
    for (const ExitSpec& e : exits) {
        for (const Pos& p : e.cells) {
            if (!grid.in_bounds(p)) {
                fail("exit " + std::to_string(e.id) + ": cell out of bounds");
                continue;
            }
            if (!grid.on_boundary(p)) fail("exit " + std::to_string(e.id) + ": cell not on boundary");
            if (declared[grid.index(p)]) fail("exit " + std::to_string(e.id) + ": cell shared with another exit");
            declared[grid.index(p)] = 1;
            if (grid.at(p).structure != Structure::ExitFloor)
                fail("exit " + std::to_string(e.id) + ": cell not marked as exit floor");
            else if (grid.at(p).exit_id != e.id)
                fail("exit " + std::to_string(e.id) + ": cell tagged with exit id " +
                     std::to_string(int(grid.at(p).exit_id)));
        }
        if (e.cells.empty()) fail("exit " + std::to_string(e.id) + ": empty");
        else if (!detail::exit_cells_contiguous(e)) fail("non-contiguous exit " + std::to_string(e.id));
    }
    for (std::size_t i = 0; i < exits.size(); ++i) {
        for (std::size_t j = i + 1; j < exits.size(); ++j) {
            if (exits[i].id == exits[j].id) fail("duplicate exit id " + std::to_string(exits[i].id));
        }
    }

    for (int y = 0; y < grid.height; ++y) {
        for (int x = 0; x < grid.width; ++x) {
            Pos p{x, y};
            const Cell& c = grid.at(p);
            if (grid.on_boundary(p)) {
                if (c.structure == Structure::ExitFloor) {
                    if (!declared[grid.index(p)])
                        fail("undeclared exit cell at (" + std::to_string(x) + "," + std::to_string(y) + ")");
                } else if (c.structure != Structure::Wall) {
                    fail("open boundary at (" + std::to_string(x) + "," + std::to_string(y) + ")");
                }
            } else if (c.structure == Structure::Wall) {
                fail("interior wall at (" + std::to_string(x) + "," + std::to_string(y) +
                     "): use obstacles for interior barriers");
            }
            if (c.structure == Structure::Wall || c.structure == Structure::Obstacle) {
                if (c.occupant != kNoAgent)
                    fail("occupant on wall/obstacle at (" + std::to_string(x) + "," + std::to_string(y) + ")");
                if (c.smoke_level != 0 || c.fire_level != 0)
                    fail("hazard level on wall/obstacle at (" + std::to_string(x) + "," + std::to_string(y) + ")");
            }
        }
    }

    // Every declared exit must be reachable from some floor cell through
    // walkable structure (hazards are dynamic and do not count here).
    for (const ExitSpec& e : exits) {
        bool reachable = false;
        for (const Pos& p : e.cells) {
            if (!grid.in_bounds(p)) continue;
            for (const Pos& d : kMooreOffsets) {
                Pos n{p.x + d.x, p.y + d.y};
                if (grid.in_bounds(n) && grid.at(n).structure == Structure::Floor) {
                    reachable = true;
                    break;
                }
            }
            if (reachable) break;
        }
        if (!reachable && !e.cells.empty())
            fail("exit " + std::to_string(e.id) + " unreachable from any floor cell");
    }

    return violations;
}

} // namespace evac
