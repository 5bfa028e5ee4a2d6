#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "evac/behavior.hpp"
#include "evac/resolver.hpp"
#include "evac/world.hpp"

namespace evac {

struct SimConfig {
    std::uint64_t seed = 1; // master seed for replicate; run() takes its own
    long max_ticks = 0;     // 0 = use the scenario's value
    int replications = 0;   // 0 = use the scenario's value
    int jobs = 0;           // 0 = hardware concurrency
};

struct AgentOutcome {
    int id = 0;
    Behavior behavior = Behavior::NearestExit;
    std::optional<double> evac_seconds; // empty = trapped or still inside at cutoff
    double distance_m = 0.0;
    std::optional<int> exit_id;
};

struct RunResult {
    double tet_seconds = 0.0;
    double metxi_seconds = 0.0; // mean over evacuated agents
    double mdxi_meters = 0.0;   // mean over evacuated agents
    long ticks = 0;
    int trapped_count = 0;
    std::vector<AgentOutcome> per_agent;
    std::map<int, int> exit_counts;

    int exit_count_for(int exit_id, std::optional<Behavior> b = std::nullopt) const {
        int n = 0;
        for (const AgentOutcome& a : per_agent) {
            if (a.exit_id == exit_id && (!b || a.behavior == *b)) ++n;
        }
        return n;
    }
};

// Observation points for frame dumps and invariant checkers. on_tick_end
// fires after the full phase sequence of each tick, with world.tick still at
// the tick just completed.
struct RunHooks {
    std::function<void(const World&)> on_start;
    std::function<void(const World&)> on_tick_end;
};

namespace detail {

inline bool hazard_adjacent(const World& w, Pos pos) {
    for (const Pos& off : kMooreOffsets) {
        Pos p{pos.x + off.x, pos.y + off.y};
        if (!w.grid.in_bounds(p)) continue;
        int idx = w.grid.index(p);
        if (w.hz.fire[idx] || w.hz.smoke[idx] || w.hz.heat[idx]) return true;
    }
    return false;
}

inline bool all_active_trapped(const World& w) {
    for (std::size_t id = 0; id < w.agents.size(); ++id) {
        const AgentState& a = w.agents[id];
        if (!a.active()) continue;
        for (const DistanceField& f : w.fields.fields) {
            if (f.at(a.pos) != kUnreachable) return false;
        }
    }
    return true;
}

} // namespace detail

// One seeded run. Phase order within a tick is fixed: agents nominate moves
// against a frozen world, conflicts resolve and apply, smoke spreads, fire
// spreads, fields refresh if any traversal cost changed, then bookkeeping.
// The run ends when everyone is out, everyone left is provably trapped
// (hazards only grow, so unreachable never heals), or max_ticks elapse.
inline RunResult run(const ScenarioSpec& scenario, const SimConfig& config, std::uint64_t seed,
                     const RunHooks* hooks = nullptr) {
    World w = build_world(scenario, seed);
    const long max_ticks = config.max_ticks > 0 ? config.max_ticks : scenario.sim.max_ticks;

    if (hooks && hooks->on_start) hooks->on_start(w);

    std::vector<MoveIntent> intents;
    intents.reserve(w.agents.size());
    std::vector<std::uint8_t> moved_tick(w.agents.size(), 0);
    std::vector<std::uint8_t> had_intent(w.agents.size(), 0);

    while (w.active_count > 0 && w.tick < max_ticks && !detail::all_active_trapped(w)) {
        rebuild_orientation(w);

        intents.clear();
        std::fill(had_intent.begin(), had_intent.end(), 0);
        for (std::size_t id = 0; id < w.agents.size(); ++id) {
            if (!w.agents[id].active()) continue;
            if (auto mi = control_step(w, static_cast<int>(id))) {
                intents.push_back(*mi);
                had_intent[id] = 1;
            }
        }

        ResolutionOutcome outcome = resolve(intents, w.grid, w.profiles, w.rng, &w.fields.costs);
        apply(outcome, w.grid, w.agents, w.tick);

        std::fill(moved_tick.begin(), moved_tick.end(), 0);
        for (const auto& [id, to] : outcome.moved) moved_tick[id] = 1;
        for (const auto& [id, to] : outcome.evacuated) {
            moved_tick[id] = 1;
            --w.active_count;
        }

        for (std::size_t id = 0; id < w.agents.size(); ++id) {
            AgentState& a = w.agents[id];
            if (!a.active()) continue;
            if (!had_intent[id]) a.blocked_steps += 1; // standing still is not advancing
            if (!moved_tick[id] || detail::hazard_adjacent(w, a.pos)) a.stress += 1.0;
        }

        std::vector<Pos> fresh;
        step_smoke(w.grid, w.hazard, w.rng, &fresh);
        std::vector<Pos> new_fire;
        step_fire(w.grid, w.hazard, w.rng, &new_fire);
        // New heat cells come from new fire, diffed against the old mask.
        const int r = w.hazard.heat_radius;
        for (const Pos& f : new_fire) {
            fresh.push_back(f);
            for (int dy = -r; dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    Pos p{f.x + dx, f.y + dy};
                    if (!w.grid.in_bounds(p) || !w.grid.at(p).walkable_structure()) continue;
                    if (!w.hz.heat[w.grid.index(p)]) fresh.push_back(p);
                }
            }
        }
        if (refresh_fields(w.fields, w.grid, w.exits, w.hazard, w.tick + 1)) {
            w.refresh_hazard_caches();
        }
        w.fresh_hazards = std::move(fresh);

        if (hooks && hooks->on_tick_end) hooks->on_tick_end(w);
        ++w.tick;
    }

    RunResult r;
    r.ticks = w.tick;
    long last_evac = -1;
    double evac_time_sum = 0.0, evac_dist_sum = 0.0;
    int evac_n = 0;
    for (std::size_t id = 0; id < w.agents.size(); ++id) {
        const AgentState& a = w.agents[id];
        AgentOutcome o;
        o.id = static_cast<int>(id);
        o.behavior = w.profiles[id].initial_behavior;
        o.distance_m = a.distance_moves * kCellSideMeters;
        if (a.evacuated_at) {
            o.evac_seconds = (*a.evacuated_at + 1) * kTickSeconds;
            o.exit_id = w.grid.at(a.pos).exit_id;
            last_evac = std::max(last_evac, *a.evacuated_at);
            evac_time_sum += *o.evac_seconds;
            evac_dist_sum += o.distance_m;
            ++evac_n;
            r.exit_counts[*o.exit_id] += 1;
        } else {
            ++r.trapped_count;
        }
        r.per_agent.push_back(std::move(o));
    }
    r.tet_seconds = last_evac >= 0 ? (last_evac + 1) * kTickSeconds : 0.0;
    r.metxi_seconds = evac_n > 0 ? evac_time_sum / evac_n : 0.0;
    r.mdxi_meters = evac_n > 0 ? evac_dist_sum / evac_n : 0.0;
    return r;
}

// ---------------------------------------------------------------------------
// Replication statistics
// ---------------------------------------------------------------------------

struct Ci {
    double lower = 0.0;
    double mean = 0.0;
    double upper = 0.0;
};

// Student-t confidence interval: mean +- t(1-(1-level)/2, n-1) * s / sqrt(n).
inline Ci ci(const std::vector<double>& samples, double level = 0.95) {
    const std::size_t n = samples.size();
    if (n < 2) throw std::invalid_argument("ci: need at least 2 samples");
    double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : samples) ss += (v - mean) * (v - mean);
    double sd = std::sqrt(ss / (n - 1));
    boost::math::students_t dist(static_cast<double>(n - 1));
    double t = boost::math::quantile(dist, 0.5 + level / 2.0);
    double half = t * sd / std::sqrt(static_cast<double>(n));
    return Ci{mean - half, mean, mean + half};
}

struct MetricStats {
    double mean = 0.0;
    double stddev = 0.0;
    Ci interval{};
    std::vector<double> samples;
};

inline MetricStats make_metric(std::vector<double> samples, double level = 0.95) {
    MetricStats m;
    m.interval = ci(samples, level);
    m.mean = m.interval.mean;
    double ss = 0.0;
    for (double v : samples) ss += (v - m.mean) * (v - m.mean);
    m.stddev = std::sqrt(ss / (samples.size() - 1));
    m.samples = std::move(samples);
    return m;
}

struct ReplicationStats {
    std::string scenario_name;
    int replications = 0;
    bool mixed_behaviors = false;
    MetricStats tet, metxi, mdxi, trapped;
    std::vector<int> exit_ids; // ascending
    std::map<int, MetricStats> exits;
    std::map<int, MetricStats> exits_ne;
    std::map<int, MetricStats> exits_bpe;
};

// Runs n independent replications; replication i uses
// replication_seed(master, i), so any one of them can be reproduced alone.
// Runs execute on a small thread pool; results aggregate in index order, so
// the statistics are identical however the pool schedules.
inline ReplicationStats replicate(const ScenarioSpec& scenario, const SimConfig& config,
                                  const std::function<RunHooks(int)>& hooks_for = nullptr) {
    const int n = config.replications > 0 ? config.replications : scenario.sim.replications;
    if (n < 2) throw std::invalid_argument("replicate: need at least 2 replications");

    std::vector<RunResult> results(static_cast<std::size_t>(n));
    const unsigned hw = std::thread::hardware_concurrency();
    const int jobs = config.jobs > 0 ? config.jobs : static_cast<int>(hw > 0 ? hw : 1);

    std::atomic<int> next{0};
    std::exception_ptr first_error = nullptr;
    std::mutex error_mutex;
    auto worker = [&]() {
        while (true) {
            int i = next.fetch_add(1);
            if (i >= n) break;
            try {
                RunHooks hooks;
                const RunHooks* hp = nullptr;
                if (hooks_for) {
                    hooks = hooks_for(i);
                    hp = &hooks;
                }
                results[static_cast<std::size_t>(i)] =
                    run(scenario, config, replication_seed(config.seed, static_cast<std::uint64_t>(i)), hp);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                next.store(n);
                break;
            }
        }
    };
    if (jobs <= 1 || n <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < std::min(jobs, n); ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    ReplicationStats stats;
    stats.scenario_name = scenario.name;
    stats.replications = n;
    stats.mixed_behaviors = scenario.mixed_behaviors();

    auto gather = [&](auto&& f) {
        std::vector<double> v(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = f(results[static_cast<std::size_t>(i)]);
        return v;
    };
    stats.tet = make_metric(gather([](const RunResult& r) { return r.tet_seconds; }));
    stats.metxi = make_metric(gather([](const RunResult& r) { return r.metxi_seconds; }));
    stats.mdxi = make_metric(gather([](const RunResult& r) { return r.mdxi_meters; }));
    stats.trapped = make_metric(gather([](const RunResult& r) { return double(r.trapped_count); }));

    for (const ExitDecl& d : scenario.exits) stats.exit_ids.push_back(d.id);
    std::sort(stats.exit_ids.begin(), stats.exit_ids.end());
    for (int id : stats.exit_ids) {
        stats.exits[id] = make_metric(gather([id](const RunResult& r) {
            auto it = r.exit_counts.find(id);
            return it == r.exit_counts.end() ? 0.0 : double(it->second);
        }));
        stats.exits_ne[id] = make_metric(gather(
            [id](const RunResult& r) { return double(r.exit_count_for(id, Behavior::NearestExit)); }));
        stats.exits_bpe[id] = make_metric(gather([id](const RunResult& r) {
            return double(r.exit_count_for(id, Behavior::BestPredictedExit));
        }));
    }
    return stats;
}

} // namespace evac
