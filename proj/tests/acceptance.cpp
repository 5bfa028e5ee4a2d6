// Acceptance suite: runs every criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion. Exit status is the number of failures.

#include <chrono>
#include <cstdio>
#include <memory>
#include <mutex>
#include <set>

#include "evac/evac.hpp"
#include "test_support.hpp"

using namespace evac;

namespace {

int g_failures = 0;

void report(int number, bool pass, const std::string& text) {
    std::printf("[%2d] %s %s\n", number, pass ? "PASS" : "FAIL", text.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(double v, int prec = 2) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
    return buf;
}

// ---------------------------------------------------------------------------
// Structural invariant observer, attached to every replication of every
// preset run below: occupancy uniqueness, agent conservation, smoke/fire
// monotonicity, per-tick displacement <= 1, per-exit throughput <= width,
// wall immutability.
// ---------------------------------------------------------------------------

class InvariantMonitor {
public:
    void record(const std::string& msg) {
        std::lock_guard<std::mutex> lock(mutex_);
        if (violations_.size() < 20) violations_.push_back(msg);
        ++count_;
    }
    long count() const { return count_; }
    std::string first() const { return violations_.empty() ? "" : violations_.front(); }

private:
    mutable std::mutex mutex_;
    std::vector<std::string> violations_;
    std::atomic<long> count_{0};
};

struct InvariantState {
    std::vector<Structure> structures;
    std::vector<std::uint8_t> smoke, fire;
    std::vector<Pos> pos;
    std::vector<bool> live;
    std::map<int, int> exit_width;
    int initial_agents = 0;
    bool primed = false;
};

RunHooks invariant_hooks(std::shared_ptr<InvariantState> st, InvariantMonitor* monitor) {
    RunHooks hooks;
    auto prime = [st](const World& w) {
        st->structures.clear();
        st->smoke.assign(w.grid.cell_count(), 0);
        st->fire.assign(w.grid.cell_count(), 0);
        for (const Cell& c : w.grid.cells) st->structures.push_back(c.structure);
        for (std::size_t i = 0; i < w.grid.cell_count(); ++i) {
            st->smoke[i] = w.grid.cells[i].smoke_level;
            st->fire[i] = w.grid.cells[i].fire_level;
        }
        st->pos.clear();
        st->live.clear();
        for (const AgentState& a : w.agents) {
            st->pos.push_back(a.pos);
            st->live.push_back(a.active());
        }
        st->exit_width.clear();
        for (const ExitSpec& e : w.exits) st->exit_width[e.id] = e.width_cells();
        st->initial_agents = static_cast<int>(w.agents.size());
        st->primed = true;
    };
    hooks.on_start = prime;
    hooks.on_tick_end = [st, monitor, prime](const World& w) {
        if (!st->primed) prime(w);
        const Grid& g = w.grid;

        // Wall immutability and hazard monotonicity.
        for (std::size_t i = 0; i < g.cell_count(); ++i) {
            const Cell& c = g.cells[i];
            if (c.structure != st->structures[i]) {
                monitor->record("structure changed mid-run");
                break;
            }
            if (c.smoke_level < st->smoke[i] || c.fire_level < st->fire[i]) {
                monitor->record("hazard level receded");
                break;
            }
            if ((c.structure == Structure::Wall || c.structure == Structure::Obstacle) &&
                (c.smoke_level != 0 || c.fire_level != 0 || c.occupant != kNoAgent)) {
                monitor->record("wall or obstacle carries state");
                break;
            }
        }

        // Occupancy uniqueness and grid/agent agreement.
        int active = 0;
        std::set<int> seen_cells;
        bool occupancy_ok = true;
        for (std::size_t id = 0; id < w.agents.size(); ++id) {
            const AgentState& a = w.agents[id];
            if (!a.active()) continue;
            ++active;
            occupancy_ok = occupancy_ok && seen_cells.insert(g.index(a.pos)).second &&
                           g.at(a.pos).occupant == static_cast<int>(id);
        }
        int grid_occupants = 0;
        for (const Cell& c : g.cells) grid_occupants += c.occupant != kNoAgent;
        if (!occupancy_ok || grid_occupants != active) monitor->record("occupancy broken");

        // Conservation and displacement; throughput via evacuation stamps.
        int evacuated = 0;
        std::map<int, int> evacuated_now;
        for (std::size_t id = 0; id < w.agents.size(); ++id) {
            const AgentState& a = w.agents[id];
            if (a.evacuated_at) {
                ++evacuated;
                if (*a.evacuated_at == w.tick) evacuated_now[g.at(a.pos).exit_id] += 1;
            }
            if (st->live[id] && chebyshev(a.pos, st->pos[id]) > 1)
                monitor->record("agent moved more than one cell");
        }
        if (active + evacuated != st->initial_agents) monitor->record("agents not conserved");
        for (const auto& [exit_id, n] : evacuated_now) {
            if (n > st->exit_width[exit_id]) monitor->record("exit throughput above width");
        }

        for (std::size_t i = 0; i < g.cell_count(); ++i) {
            st->smoke[i] = g.cells[i].smoke_level;
            st->fire[i] = g.cells[i].fire_level;
        }
        st->pos.clear();
        st->live.clear();
        for (const AgentState& a : w.agents) {
            st->pos.push_back(a.pos);
            st->live.push_back(a.active());
        }
    };
    return hooks;
}

InvariantMonitor g_monitor;

std::function<RunHooks(int)> monitored() {
    return [](int) {
        return invariant_hooks(std::make_shared<InvariantState>(), &g_monitor);
    };
}

ReplicationStats replicate_preset(const std::string& name, std::uint64_t master) {
    ScenarioSpec spec = *builtin_preset(name);
    SimConfig config;
    config.seed = master;
    config.replications = 50;
    return replicate(spec, config, monitored());
}

bool disjoint_above(const MetricStats& hi, const MetricStats& lo) {
    return hi.interval.lower > lo.interval.upper;
}

} // namespace

int main() {
    const std::uint64_t master = 20260810;
    const int population = 625;

    // --- 1: caseA wall time, TET band, exit share band --------------------
    auto t0 = std::chrono::steady_clock::now();
    ReplicationStats a = replicate_preset("caseA", master);
    double case_a_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    {
        double share = a.exits.at(2).mean / population;
        bool time_ok = case_a_seconds < 300.0;
        bool tet_ok = a.tet.mean >= 99.2 * 0.75 && a.tet.mean <= 99.2 * 1.25;
        bool share_ok = share >= 0.50 && share <= 0.68;
        report(1, time_ok && tet_ok && share_ok,
               "caseA x50: " + fmt(case_a_seconds, 1) + " s wall (<300), mean TET " +
                   fmt(a.tet.mean) + " s in [74.40, 124.00], E2 share " + fmt(share, 3) +
                   " in [0.500, 0.680]");
    }

    // --- 2: caseB shifts flow to E1 and lengthens paths --------------------
    ReplicationStats b = replicate_preset("caseB", master);
    {
        bool e1_up = disjoint_above(b.exits.at(1), a.exits.at(1));
        bool md_up = disjoint_above(b.mdxi, a.mdxi);
        report(2, e1_up && md_up,
               "caseB vs caseA: #E1 " + fmt(b.exits.at(1).mean, 1) + " > " +
                   fmt(a.exits.at(1).mean, 1) + " and MDxI " + fmt(b.mdxi.mean) + " m > " +
                   fmt(a.mdxi.mean) + " m, both with disjoint 95% CIs");
    }

    // --- 3: caseC equilibrium ----------------------------------------------
    ReplicationStats c = replicate_preset("caseC", master);
    {
        double s1 = c.exits.at(1).mean / population;
        double s2 = c.exits.at(2).mean / population;
        bool ok = s1 >= 0.40 && s1 <= 0.60 && s2 >= 0.40 && s2 <= 0.60;
        report(3, ok,
               "caseC shares E1 " + fmt(s1, 3) + " / E2 " + fmt(s2, 3) + ", each in 0.50 +/- 0.10");
    }

    // --- 4: caseD drains E2 by 5-15 points of the population ---------------
    ReplicationStats d = replicate_preset("caseD", master);
    {
        double drop = c.exits.at(2).mean - d.exits.at(2).mean;
        bool ok = drop >= 0.05 * population && drop <= 0.15 * population;
        report(4, ok,
               "caseD vs caseC: mean #E2 drop " + fmt(drop, 1) + " agents in [31.25, 93.75]");
    }

    // --- 5: mixed-crowd severity trends ------------------------------------
    ReplicationStats e = replicate_preset("caseE", master);
    ReplicationStats f = replicate_preset("caseF", master);
    ReplicationStats g = replicate_preset("caseG", master);
    {
        double ne_e = e.exits_ne.at(1).mean, ne_f = f.exits_ne.at(1).mean,
               ne_g = g.exits_ne.at(1).mean;
        double bpe_e = e.exits_bpe.at(1).mean, bpe_f = f.exits_bpe.at(1).mean,
               bpe_g = g.exits_bpe.at(1).mean;
        bool ne_up = ne_e < ne_f && ne_f < ne_g;
        bool bpe_down = bpe_e > bpe_f && bpe_f > bpe_g;
        bool tet_up = e.tet.mean < g.tet.mean;
        bool md_up = e.mdxi.mean < g.mdxi.mean;
        report(5, ne_up && bpe_down && tet_up && md_up,
               "caseE->F->G: #E1 NE " + fmt(ne_e, 1) + " -> " + fmt(ne_f, 1) + " -> " +
                   fmt(ne_g, 1) + (ne_up ? " (up)" : " (NOT increasing)") + "; #E1 BPE " +
                   fmt(bpe_e, 1) + " -> " + fmt(bpe_f, 1) + " -> " + fmt(bpe_g, 1) +
                   (bpe_down ? " (down)" : " (NOT decreasing)") + "; TET " + fmt(e.tet.mean, 1) +
                   " -> " + fmt(g.tet.mean, 1) + "; MDxI " + fmt(e.mdxi.mean, 1) + " -> " +
                   fmt(g.mdxi.mean, 1));
    }

    // --- 6: Dijkstra equals a breadth-first oracle on a random corpus ------
    {
        Rng rng(987654321);
        int grids = 0, mismatches = 0;
        for (int trial = 0; trial < 140; ++trial) {
            ExitSpec exit;
            Grid grid = evac_test::random_walled_grid(rng, exit, 20);
            DistanceField field = compute_field(grid, exit, HazardParams{});
            std::vector<double> oracle = evac_test::bfs_unit_distances(grid, exit);
            for (std::size_t i = 0; i < grid.cell_count(); ++i) {
                if (field.dist[i] != oracle[i]) ++mismatches;
            }
            ++grids;
        }
        report(6, grids >= 100 && mismatches == 0,
               std::to_string(grids) + " random grids up to 20x20: " +
                   std::to_string(mismatches) + " cells differ from the breadth-first oracle");
    }

    // --- 7: spread probability calibration ---------------------------------
    {
        const int trials = 10000;
        const double beta = 0.7;
        bool ok = true;
        std::string detail;
        Rng rng(13579);
        for (int k = 1; k <= 8; ++k) {
            int hits = 0;
            for (int t = 0; t < trials; ++t) {
                Grid grid(7, 7);
                for (int y = 0; y < 7; ++y) {
                    for (int x = 0; x < 7; ++x) {
                        if (grid.on_boundary({x, y})) grid.at({x, y}).structure = Structure::Wall;
                    }
                }
                grid.at({3, 3}).combustible = true;
                int placed = 0;
                for (const Pos& off : kMooreOffsets) {
                    if (placed == k) break;
                    Pos n{3 + off.x, 3 + off.y};
                    grid.at(n).fire_level = 1;
                    grid.at(n).smoke_level = 1;
                    grid.at(n).combustible = true;
                    ++placed;
                }
                HazardParams params;
                params.beta_fire = beta;
                step_fire(grid, params, rng);
                hits += grid.at({3, 3}).fire_level > 0;
            }
            double p = beta * k / 8.0;
            double sigma = std::sqrt(p * (1.0 - p) / trials);
            double freq = double(hits) / trials;
            if (std::fabs(freq - p) > 3.0 * sigma) {
                ok = false;
                detail += " k=" + std::to_string(k) + " off";
            }
        }
        report(7, ok, "ignition frequency within 3 sigma of beta*k/8 for k=1..8 (10000 trials each)" + detail);
    }

    // --- 8: structural invariants on every tick of every run above ---------
    report(8, g_monitor.count() == 0,
           "invariant monitor over all 350 replications: " + std::to_string(g_monitor.count()) +
               " violations" +
               (g_monitor.count() ? " (first: " + g_monitor.first() + ")" : ""));

    // --- 9: determinism of replicate and of frame dumps ---------------------
    {
        ScenarioSpec spec = *builtin_preset("caseA");
        SimConfig config;
        config.seed = master;
        config.replications = 50;
        std::string csv1 = emit_stats(replicate(spec, config), StatsFormat::Csv);
        std::string csv2 = emit_stats(replicate(spec, config), StatsFormat::Csv);

        ScenarioSpec fire_spec = *builtin_preset("caseB");
        auto frames_of = [&](std::uint64_t seed) {
            std::vector<std::string> frames;
            RunHooks hooks;
            hooks.on_tick_end = [&](const World& w) {
                if (w.tick % 50 == 0)
                    frames.push_back(render_frame(w.grid, w.tick, FrameFormat::Text).bytes);
            };
            run(fire_spec, SimConfig{}, seed, &hooks);
            return frames;
        };
        std::vector<std::string> fa = frames_of(5);
        std::vector<std::string> fb = frames_of(5);
        bool frames_ok = fa == fb && !fa.empty();
        report(9, csv1 == csv2 && frames_ok,
               std::string("replicate x50 twice: CSV byte-identical ") +
                   (csv1 == csv2 ? "yes" : "NO") + "; caseB frame dumps byte-identical " +
                   (frames_ok ? "yes" : "NO"));
    }

    // --- 10: cost function unit suite ---------------------------------------
    {
        bool ok = cost(10.0, 5.0, 20.0, 5.0) == 1000.0 && cost(3.0, 8.0, 10.0, 4.0) == 960.0 &&
                  cost(3.0, 3.0, 10.0, 4.0) == 120.0;
        Rng rng(24680);
        for (int i = 0; i < 10000 && ok; ++i) {
            double t = rng.next_in(0.0, 40.0), q = rng.next_in(0.0, 40.0);
            double dist = rng.next_in(0.0, 150.0), n = std::floor(rng.next_in(0.0, 300.0));
            double expect = t >= q ? t * dist * std::max(1.0, n) : q * t * dist * std::max(1.0, n);
            ok = cost(t, q, dist, n) == expect;
        }
        report(10, ok, "cost(): both branches and the boundary match the hand-computed products");
    }

    std::printf("%s: %d of 10 criteria failed\n", g_failures == 0 ? "OK" : "RESULT", g_failures);
    return g_failures;
}
