#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "evac/agent.hpp"
#include "evac/grid.hpp"
#include "evac/hazard.hpp"

namespace evac {

// ---------------------------------------------------------------------------
// Scenario description (mirrors the on-disk format; see README for grammar)
// ---------------------------------------------------------------------------

struct RectSpec {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};

struct ExitDecl {
    int id = 0;
    std::string wall; // left | right | top | bottom
    int start = 0;    // first cell along the wall (y for left/right, x for top/bottom)
    int length = 1;
};

struct AgentGroup {
    int count = 0;
    Behavior behavior = Behavior::NearestExit;
    bool explicit_placement = false;
    Pos cell{}; // for explicit placement (count must be 1)
    int speed_min = 1, speed_max = 1;
    int damage_min = 0, damage_max = 0;
    double stress_min = 50.0, stress_max = 50.0;
};

struct SimDefaults {
    long max_ticks = 4000;
    int replications = 50;
};

struct ScenarioSpec {
    std::string name = "unnamed";
    double width_m = 0.0;
    double height_m = 0.0;

    std::vector<RectSpec> obstacle_rects;
    std::vector<Pos> obstacle_cells;

    std::vector<ExitDecl> exits;

    bool combustible_all_floor = false;
    std::vector<RectSpec> combustible_rects;
    std::vector<Pos> combustible_cells;

    std::vector<Pos> fire_seeds;

    std::vector<AgentGroup> groups;

    HazardParams hazard;
    BehaviorParams behavior;
    SimDefaults sim;

    int width_cells() const { return static_cast<int>(std::llround(width_m / kCellSideMeters)); }
    int height_cells() const { return static_cast<int>(std::llround(height_m / kCellSideMeters)); }

    int population() const {
        int n = 0;
        for (const AgentGroup& g : groups) n += g.count;
        return n;
    }

    bool mixed_behaviors() const {
        bool ne = false, bpe = false;
        for (const AgentGroup& g : groups) {
            if (g.count == 0) continue;
            (g.behavior == Behavior::NearestExit ? ne : bpe) = true;
        }
        return ne && bpe;
    }
};

// ---------------------------------------------------------------------------
// Grid construction
// ---------------------------------------------------------------------------

namespace detail {

inline void mark_rect(std::vector<Pos>& out, const RectSpec& r) {
    for (int y = r.y0; y <= r.y1; ++y) {
        for (int x = r.x0; x <= r.x1; ++x) out.push_back({x, y});
    }
}

} // namespace detail

// Builds the static grid (structure, combustibility, fire seeds) and the exit
// list. Geometry errors are appended to `errors`; the result is only usable
// when none were added.
inline Grid build_grid(const ScenarioSpec& spec, std::vector<ExitSpec>& exits,
                       std::vector<std::string>& errors) {
    const int w = spec.width_cells();
    const int h = spec.height_cells();
    Grid grid(std::max(w, 0), std::max(h, 0));
    if (w < 3 || h < 3) {
        errors.push_back("grid too small: " + std::to_string(w) + "x" + std::to_string(h));
        return grid;
    }

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (grid.on_boundary({x, y})) grid.at({x, y}).structure = Structure::Wall;
        }
    }

    exits.clear();
    for (const ExitDecl& d : spec.exits) {
        if (d.id < 1 || d.id > 255) {
            errors.push_back("exit id " + std::to_string(d.id) + " out of range 1..255");
            continue;
        }
        ExitSpec e;
        e.id = d.id;
        for (int i = 0; i < d.length; ++i) {
            Pos p;
            if (d.wall == "left") p = {0, d.start + i};
            else if (d.wall == "right") p = {w - 1, d.start + i};
            else if (d.wall == "top") p = {d.start + i, 0};
            else if (d.wall == "bottom") p = {d.start + i, h - 1};
            else {
                errors.push_back("exit " + std::to_string(d.id) + ": unknown wall '" + d.wall + "'");
                break;
            }
            if (!grid.in_bounds(p) || !grid.on_boundary(p)) {
                errors.push_back("exit " + std::to_string(d.id) + ": cell off the boundary");
                continue;
            }
            bool corner = (p.x == 0 || p.x == w - 1) && (p.y == 0 || p.y == h - 1);
            if (corner) {
                errors.push_back("exit " + std::to_string(d.id) + ": corner cells cannot be exits");
                continue;
            }
            grid.at(p).structure = Structure::ExitFloor;
            grid.at(p).exit_id = static_cast<std::uint8_t>(d.id);
            e.cells.push_back(p);
        }
        exits.push_back(std::move(e));
    }

    std::vector<Pos> obstacle;
    for (const RectSpec& r : spec.obstacle_rects) detail::mark_rect(obstacle, r);
    obstacle.insert(obstacle.end(), spec.obstacle_cells.begin(), spec.obstacle_cells.end());
    for (const Pos& p : obstacle) {
        if (!grid.in_bounds(p)) {
            errors.push_back("obstacle cell out of bounds (" + std::to_string(p.x) + "," +
                             std::to_string(p.y) + ")");
            continue;
        }
        if (grid.on_boundary(p)) {
            errors.push_back("obstacle on the boundary ring (" + std::to_string(p.x) + "," +
                             std::to_string(p.y) + ")");
            continue;
        }
        grid.at(p).structure = Structure::Obstacle;
    }

    auto mark_combustible = [&](Pos p) {
        if (!grid.in_bounds(p)) {
            errors.push_back("combustible cell out of bounds (" + std::to_string(p.x) + "," +
                             std::to_string(p.y) + ")");
            return;
        }
        Cell& c = grid.at(p);
        if (c.walkable_structure()) c.combustible = true;
    };
    if (spec.combustible_all_floor) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) mark_combustible({x, y});
        }
    }
    std::vector<Pos> comb;
    for (const RectSpec& r : spec.combustible_rects) detail::mark_rect(comb, r);
    comb.insert(comb.end(), spec.combustible_cells.begin(), spec.combustible_cells.end());
    for (const Pos& p : comb) mark_combustible(p);

    for (const Pos& p : spec.fire_seeds) {
        if (!grid.in_bounds(p) || !grid.at(p).walkable_structure()) {
            errors.push_back("fire seed not on walkable floor (" + std::to_string(p.x) + "," +
                             std::to_string(p.y) + ")");
            continue;
        }
        Cell& c = grid.at(p);
        c.fire_level = 1;
        c.smoke_level = 1;
        c.combustible = true;
    }

    return grid;
}

// Full semantic validation: geometry plus placement feasibility.
inline std::vector<std::string> validate_scenario(const ScenarioSpec& spec) {
    std::vector<std::string> errors;

    auto check_divisible = [&](double meters, const char* which) {
        double cells = meters / kCellSideMeters;
        if (meters <= 0.0 || std::fabs(cells - std::llround(cells)) > 1e-9) {
            errors.push_back(std::string(which) + " " + std::to_string(meters) +
                             " m not divisible by cell size 0.4 m");
        }
    };
    check_divisible(spec.width_m, "width");
    check_divisible(spec.height_m, "height");
    if (!errors.empty()) return errors;

    if (!spec.hazard.valid()) errors.push_back("hazard parameters out of range");
    if (spec.behavior.growth_divisor < 1) errors.push_back("growth_divisor must be >= 1");
    if (spec.behavior.prudential_limit < 1) errors.push_back("prudential_limit must be >= 1");
    if (spec.sim.max_ticks < 1) errors.push_back("max_ticks must be >= 1");

    std::vector<ExitSpec> exits;
    Grid grid = build_grid(spec, exits, errors);
    if (!errors.empty()) return errors;

    std::vector<std::string> geo = validate_geometry(grid, exits);
    errors.insert(errors.end(), geo.begin(), geo.end());
    if (spec.exits.empty()) errors.push_back("scenario declares no exits");

    int eligible = 0;
    std::vector<std::uint8_t> heat = heat_mask(grid, spec.hazard);
    for (int i = 0; i < static_cast<int>(grid.cell_count()); ++i) {
        const Cell& c = grid.cells[i];
        if (c.structure == Structure::Floor && c.fire_level == 0 && c.smoke_level == 0 && !heat[i])
            ++eligible;
    }
    int uniform_count = 0;
    for (const AgentGroup& g : spec.groups) {
        if (g.count < 0) errors.push_back("agent group with negative count");
        if (g.speed_min < 1 || g.speed_max < g.speed_min)
            errors.push_back("agent group speed range invalid");
        if (g.damage_min < 0 || g.damage_max < g.damage_min)
            errors.push_back("agent group damage range invalid");
        if (g.stress_min <= 0 || g.stress_max < g.stress_min)
            errors.push_back("agent group stress tolerance range invalid");
        if (g.explicit_placement) {
            if (g.count != 1) errors.push_back("explicit placement groups must have count 1");
            if (!grid.in_bounds(g.cell) || grid.at(g.cell).structure != Structure::Floor)
                errors.push_back("explicit agent cell not on interior floor (" +
                                 std::to_string(g.cell.x) + "," + std::to_string(g.cell.y) + ")");
        } else {
            uniform_count += g.count;
        }
    }
    if (uniform_count > eligible) {
        errors.push_back("population " + std::to_string(uniform_count) +
                         " exceeds placeable floor cells " + std::to_string(eligible));
    }
    return errors;
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

struct ParseResult {
    std::optional<ScenarioSpec> spec;
    std::vector<std::string> errors;

    bool ok() const { return spec.has_value() && errors.empty(); }
};

namespace detail {

inline std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> toks;
    std::istringstream in(line);
    std::string t;
    while (in >> t) toks.push_back(t);
    return toks;
}

inline bool parse_int(const std::string& s, int& out) {
    try {
        std::size_t used = 0;
        long v = std::stol(s, &used);
        if (used != s.size()) return false;
        out = static_cast<int>(v);
        return true;
    } catch (...) {
        return false;
    }
}

inline bool parse_long(const std::string& s, long& out) {
    try {
        std::size_t used = 0;
        out = std::stol(s, &used);
        return used == s.size();
    } catch (...) {
        return false;
    }
}

inline bool parse_double(const std::string& s, double& out) {
    try {
        std::size_t used = 0;
        out = std::stod(s, &used);
        return used == s.size();
    } catch (...) {
        return false;
    }
}

} // namespace detail

// Line-oriented scenario parser. Unknown sections and keys are errors, never
// silently skipped; every error carries its line number.
inline ParseResult parse_scenario(const std::string& text) {
    ParseResult result;
    ScenarioSpec spec;
    std::vector<std::string>& errors = result.errors;

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    bool saw_header = false;
    std::string section;

    auto err = [&](const std::string& msg) {
        errors.push_back("line " + std::to_string(lineno) + ": " + msg);
    };

    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::vector<std::string> toks = detail::tokenize(line);
        if (toks.empty()) continue;

        if (!saw_header) {
            if (toks.size() == 2 && toks[0] == "evacsim" && toks[1] == "v1") {
                saw_header = true;
                continue;
            }
            err("expected header 'evacsim v1'");
            return result;
        }

        if (toks[0].front() == '[') {
            if (toks.size() != 1 || toks[0].back() != ']') {
                err("malformed section header");
                continue;
            }
            section = toks[0].substr(1, toks[0].size() - 2);
            const char* known[] = {"scenario", "exits",  "obstacles", "combustible",
                                   "fire",     "hazard", "behavior",  "agents",
                                   "sim"};
            bool ok = false;
            for (const char* k : known) ok = ok || section == k;
            if (!ok) {
                err("unknown section [" + section + "]");
                section.clear();
            }
            continue;
        }
        if (section.empty()) {
            err("directive outside any section: '" + toks[0] + "'");
            continue;
        }

        const std::string& key = toks[0];
        auto want_args = [&](std::size_t n) {
            if (toks.size() == n + 1) return true;
            err("'" + key + "' expects " + std::to_string(n) + " argument(s)");
            return false;
        };
        auto as_int = [&](const std::string& s, int& v) {
            if (detail::parse_int(s, v)) return true;
            err("'" + key + "': not an integer: '" + s + "'");
            return false;
        };
        auto as_double = [&](const std::string& s, double& v) {
            if (detail::parse_double(s, v)) return true;
            err("'" + key + "': not a number: '" + s + "'");
            return false;
        };

        if (section == "scenario") {
            if (key == "name") {
                if (want_args(1)) spec.name = toks[1];
            } else if (key == "width_m") {
                if (want_args(1)) as_double(toks[1], spec.width_m);
            } else if (key == "height_m") {
                if (want_args(1)) as_double(toks[1], spec.height_m);
            } else {
                err("unknown key '" + key + "' in [scenario]");
            }
        } else if (section == "exits") {
            if (key == "exit") {
                if (!want_args(4)) continue;
                ExitDecl d;
                if (!as_int(toks[1], d.id)) continue;
                d.wall = toks[2];
                if (d.wall != "left" && d.wall != "right" && d.wall != "top" && d.wall != "bottom") {
                    err("exit wall must be left|right|top|bottom, got '" + d.wall + "'");
                    continue;
                }
                if (!as_int(toks[3], d.start) || !as_int(toks[4], d.length)) continue;
                if (d.length < 1) {
                    err("exit length must be >= 1");
                    continue;
                }
                spec.exits.push_back(d);
            } else {
                err("unknown key '" + key + "' in [exits]");
            }
        } else if (section == "obstacles" || section == "combustible" || section == "fire") {
            if (key == "cell") {
                if (!want_args(2)) continue;
                Pos p;
                if (!as_int(toks[1], p.x) || !as_int(toks[2], p.y)) continue;
                if (section == "obstacles") spec.obstacle_cells.push_back(p);
                else if (section == "combustible") spec.combustible_cells.push_back(p);
                else spec.fire_seeds.push_back(p);
            } else if (key == "rect" && section != "fire") {
                if (!want_args(4)) continue;
                RectSpec r;
                if (!as_int(toks[1], r.x0) || !as_int(toks[2], r.y0) || !as_int(toks[3], r.x1) ||
                    !as_int(toks[4], r.y1))
                    continue;
                if (r.x1 < r.x0 || r.y1 < r.y0) {
                    err("rect corners must be ordered x0<=x1, y0<=y1");
                    continue;
                }
                if (section == "obstacles") spec.obstacle_rects.push_back(r);
                else spec.combustible_rects.push_back(r);
            } else if (key == "all_floor" && section == "combustible") {
                if (want_args(0)) spec.combustible_all_floor = true;
            } else {
                err("unknown key '" + key + "' in [" + section + "]");
            }
        } else if (section == "hazard") {
            if (key == "beta_smoke") { if (want_args(1)) as_double(toks[1], spec.hazard.beta_smoke); }
            else if (key == "beta_fire") { if (want_args(1)) as_double(toks[1], spec.hazard.beta_fire); }
            else if (key == "l_max") { if (want_args(1)) as_int(toks[1], spec.hazard.l_max); }
            else if (key == "heat_radius") { if (want_args(1)) as_int(toks[1], spec.hazard.heat_radius); }
            else if (key == "smoke_weight") { if (want_args(1)) as_double(toks[1], spec.hazard.smoke_weight); }
            else err("unknown key '" + key + "' in [hazard]");
        } else if (section == "behavior") {
            if (key == "sight_range") { if (want_args(1)) as_int(toks[1], spec.behavior.sight_range); }
            else if (key == "sight_range_smoke") { if (want_args(1)) as_int(toks[1], spec.behavior.sight_range_smoke); }
            else if (key == "base_period") { if (want_args(1)) as_int(toks[1], spec.behavior.base_period); }
            else if (key == "growth_divisor") { if (want_args(1)) as_int(toks[1], spec.behavior.growth_divisor); }
            else if (key == "prudential_limit") { if (want_args(1)) as_int(toks[1], spec.behavior.prudential_limit); }
            else if (key == "transition") {
                if (!want_args(3)) continue;
                auto from = behavior_from_name(toks[1]);
                auto event = event_from_name(toks[2]);
                auto to = behavior_from_name(toks[3]);
                if (!from) { err("unknown behavior '" + toks[1] + "'"); continue; }
                if (!event) { err("unknown event '" + toks[2] + "'"); continue; }
                if (!to) { err("unknown behavior '" + toks[3] + "'"); continue; }
                spec.behavior.transitions.rules.push_back({*from, *event, *to});
            } else {
                err("unknown key '" + key + "' in [behavior]");
            }
        } else if (section == "agents") {
            if (key == "group") {
                if (toks.size() < 4) {
                    err("group needs at least: group <count> <NE|BPE> <uniform | at x y>");
                    continue;
                }
                AgentGroup g;
                if (!as_int(toks[1], g.count)) continue;
                auto b = behavior_from_name(toks[2]);
                if (!b) {
                    err("unknown behavior '" + toks[2] + "' (expected NE or BPE)");
                    continue;
                }
                g.behavior = *b;
                std::size_t i = 3;
                if (toks[3] == "uniform") {
                    i = 4;
                } else if (toks[3] == "at") {
                    if (toks.size() < 6) {
                        err("'at' placement needs two coordinates");
                        continue;
                    }
                    g.explicit_placement = true;
                    if (!as_int(toks[4], g.cell.x) || !as_int(toks[5], g.cell.y)) continue;
                    i = 6;
                } else {
                    err("unknown placement '" + toks[3] + "' (expected uniform or at)");
                    continue;
                }
                bool bad = false;
                while (i < toks.size() && !bad) {
                    const std::string& clause = toks[i];
                    if (clause == "speed" && i + 2 < toks.size()) {
                        bad = !as_int(toks[i + 1], g.speed_min) || !as_int(toks[i + 2], g.speed_max);
                        i += 3;
                    } else if (clause == "damage" && i + 2 < toks.size()) {
                        bad = !as_int(toks[i + 1], g.damage_min) || !as_int(toks[i + 2], g.damage_max);
                        i += 3;
                    } else if (clause == "stress" && i + 2 < toks.size()) {
                        bad = !as_double(toks[i + 1], g.stress_min) || !as_double(toks[i + 2], g.stress_max);
                        i += 3;
                    } else {
                        err("unknown group clause '" + clause + "'");
                        bad = true;
                    }
                }
                if (!bad) spec.groups.push_back(g);
            } else {
                err("unknown key '" + key + "' in [agents]");
            }
        } else if (section == "sim") {
            if (key == "max_ticks") {
                long v;
                if (want_args(1) && detail::parse_long(toks[1], v)) spec.sim.max_ticks = v;
                else if (toks.size() == 2) err("'max_ticks': not an integer: '" + toks[1] + "'");
            } else if (key == "replications") {
                if (want_args(1)) as_int(toks[1], spec.sim.replications);
            } else {
                err("unknown key '" + key + "' in [sim]");
            }
        }
    }

    if (!saw_header) {
        errors.push_back("line 1: empty scenario (missing 'evacsim v1' header)");
        return result;
    }

    // Dimension sanity is a parse-level error so broken files fail fast.
    double wc = spec.width_m / kCellSideMeters;
    double hc = spec.height_m / kCellSideMeters;
    if (spec.width_m <= 0.0 || std::fabs(wc - std::llround(wc)) > 1e-9)
        errors.push_back("width_m " + std::to_string(spec.width_m) + " not divisible by cell size 0.4 m");
    if (spec.height_m <= 0.0 || std::fabs(hc - std::llround(hc)) > 1e-9)
        errors.push_back("height_m " + std::to_string(spec.height_m) + " not divisible by cell size 0.4 m");

    if (errors.empty()) result.spec = std::move(spec);
    return result;
}

// ---------------------------------------------------------------------------
// Emission (canonical form; parse(emit(s)) is the identity on the fields)
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

} // namespace detail

inline std::string emit_scenario(const ScenarioSpec& spec) {
    std::ostringstream out;
    out << "evacsim v1\n\n";
    out << "[scenario]\n";
    out << "name " << spec.name << "\n";
    out << "width_m " << detail::fmt_double(spec.width_m) << "\n";
    out << "height_m " << detail::fmt_double(spec.height_m) << "\n";

    out << "\n[exits]\n";
    for (const ExitDecl& d : spec.exits) {
        out << "exit " << d.id << " " << d.wall << " " << d.start << " " << d.length << "\n";
    }

    if (!spec.obstacle_rects.empty() || !spec.obstacle_cells.empty()) {
        out << "\n[obstacles]\n";
        for (const RectSpec& r : spec.obstacle_rects)
            out << "rect " << r.x0 << " " << r.y0 << " " << r.x1 << " " << r.y1 << "\n";
        for (const Pos& p : spec.obstacle_cells) out << "cell " << p.x << " " << p.y << "\n";
    }

    if (spec.combustible_all_floor || !spec.combustible_rects.empty() ||
        !spec.combustible_cells.empty()) {
        out << "\n[combustible]\n";
        if (spec.combustible_all_floor) out << "all_floor\n";
        for (const RectSpec& r : spec.combustible_rects)
            out << "rect " << r.x0 << " " << r.y0 << " " << r.x1 << " " << r.y1 << "\n";
        for (const Pos& p : spec.combustible_cells) out << "cell " << p.x << " " << p.y << "\n";
    }

    if (!spec.fire_seeds.empty()) {
        out << "\n[fire]\n";
        for (const Pos& p : spec.fire_seeds) out << "cell " << p.x << " " << p.y << "\n";
    }

    out << "\n[hazard]\n";
    out << "beta_smoke " << detail::fmt_double(spec.hazard.beta_smoke) << "\n";
    out << "beta_fire " << detail::fmt_double(spec.hazard.beta_fire) << "\n";
    out << "l_max " << spec.hazard.l_max << "\n";
    out << "heat_radius " << spec.hazard.heat_radius << "\n";
    out << "smoke_weight " << detail::fmt_double(spec.hazard.smoke_weight) << "\n";

    out << "\n[behavior]\n";
    out << "sight_range " << spec.behavior.sight_range << "\n";
    out << "sight_range_smoke " << spec.behavior.sight_range_smoke << "\n";
    out << "base_period " << spec.behavior.base_period << "\n";
    out << "growth_divisor " << spec.behavior.growth_divisor << "\n";
    out << "prudential_limit " << spec.behavior.prudential_limit << "\n";
    for (const TransitionTable::Rule& r : spec.behavior.transitions.rules) {
        out << "transition " << behavior_name(r.from) << " " << event_name(r.event) << " "
            << behavior_name(r.to) << "\n";
    }

    out << "\n[agents]\n";
    for (const AgentGroup& g : spec.groups) {
        out << "group " << g.count << " " << behavior_name(g.behavior);
        if (g.explicit_placement) out << " at " << g.cell.x << " " << g.cell.y;
        else out << " uniform";
        out << " speed " << g.speed_min << " " << g.speed_max;
        out << " damage " << g.damage_min << " " << g.damage_max;
        out << " stress " << detail::fmt_double(g.stress_min) << " "
            << detail::fmt_double(g.stress_max) << "\n";
    }

    out << "\n[sim]\n";
    out << "max_ticks " << spec.sim.max_ticks << "\n";
    out << "replications " << spec.sim.replications << "\n";
    return out.str();
}

} // namespace evac
