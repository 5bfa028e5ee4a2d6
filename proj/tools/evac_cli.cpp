// evacsim command line: validate scenarios, run single seeded simulations
// with optional frame dumps, and aggregate replication statistics.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "evac/evac.hpp"

namespace {

namespace fs = std::filesystem;

// A scenario argument is either a file path or the name of a bundled preset.
evac::ScenarioSpec load_scenario(const std::string& arg) {
    if (fs::exists(arg)) {
        std::ifstream in(arg);
        if (!in) throw std::runtime_error("cannot open scenario file: " + arg);
        std::stringstream buf;
        buf << in.rdbuf();
        evac::ParseResult parsed = evac::parse_scenario(buf.str());
        if (!parsed.ok()) {
            std::string msg = "scenario '" + arg + "' has errors:";
            for (const std::string& e : parsed.errors) msg += "\n  " + e;
            throw std::invalid_argument(msg);
        }
        return *parsed.spec;
    }
    if (auto preset = evac::builtin_preset(arg)) return *preset;
    std::string names;
    for (const std::string& n : evac::builtin_preset_names()) names += " " + n;
    throw std::invalid_argument("no such scenario file or preset: '" + arg +
                                "' (presets:" + names + ")");
}

std::string frame_path(const std::string& dir, long tick, evac::FrameFormat fmt) {
    char name[64];
    std::snprintf(name, sizeof(name), "frame_%06ld.%s", tick,
                  fmt == evac::FrameFormat::Text ? "txt" : "pgm");
    return (fs::path(dir) / name).string();
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << bytes;
}

int cmd_preset(const std::string& name, const std::string& out_path) {
    auto spec = evac::builtin_preset(name);
    if (!spec) {
        std::string names;
        for (const std::string& n : evac::builtin_preset_names()) names += " " + n;
        throw std::invalid_argument("unknown preset '" + name + "' (presets:" + names + ")");
    }
    std::string text = evac::emit_scenario(*spec);
    if (out_path.empty()) std::cout << text;
    else write_file(out_path, text);
    return 0;
}

int cmd_validate(const std::string& scenario_arg) {
    evac::ScenarioSpec spec = load_scenario(scenario_arg);
    std::vector<std::string> errors = evac::validate_scenario(spec);
    if (errors.empty()) {
        std::cout << "ok: " << spec.name << " (" << spec.width_cells() << "x" << spec.height_cells()
                  << " cells, " << spec.population() << " agents, " << spec.exits.size()
                  << " exits)\n";
        return 0;
    }
    for (const std::string& e : errors) std::cerr << "error: " << e << "\n";
    return 1;
}

struct RunOptions {
    std::string scenario;
    std::uint64_t seed = 1;
    long max_ticks = 0;
    std::string frames_dir;
    long frame_every = 0;
    std::string frame_format = "text";
    std::string dump_fields_dir;
};

int cmd_run(const RunOptions& opt) {
    evac::ScenarioSpec spec = load_scenario(opt.scenario);
    evac::SimConfig config;
    config.max_ticks = opt.max_ticks;

    evac::FrameFormat ffmt =
        opt.frame_format == "graymap" ? evac::FrameFormat::Graymap : evac::FrameFormat::Text;
    evac::RunHooks hooks;
    if (!opt.frames_dir.empty()) {
        fs::create_directories(opt.frames_dir);
        long every = opt.frame_every > 0 ? opt.frame_every : 1;
        hooks.on_start = [&](const evac::World& w) {
            evac::FrameDump f = evac::render_frame(w.grid, 0, ffmt);
            write_file(frame_path(opt.frames_dir, 0, ffmt), f.bytes);
        };
        hooks.on_tick_end = [&, every](const evac::World& w) {
            long t = w.tick + 1; // frames count completed ticks
            if (t % every == 0) {
                evac::FrameDump f = evac::render_frame(w.grid, t, ffmt);
                write_file(frame_path(opt.frames_dir, t, ffmt), f.bytes);
            }
        };
    }
    if (!opt.dump_fields_dir.empty()) {
        auto prev = hooks.on_start;
        hooks.on_start = [&, prev](const evac::World& w) {
            if (prev) prev(w);
            fs::create_directories(opt.dump_fields_dir);
            for (const evac::DistanceField& f : w.fields.fields) {
                write_file((fs::path(opt.dump_fields_dir) / ("field_E" + std::to_string(f.exit_id) + ".txt"))
                               .string(),
                           evac::field_to_text(f));
            }
        };
    }

    bool use_hooks = !opt.frames_dir.empty() || !opt.dump_fields_dir.empty();
    evac::RunResult result = evac::run(spec, config, opt.seed, use_hooks ? &hooks : nullptr);
    std::cout << evac::run_summary(result, spec.name);
    return 0;
}

struct ReplicateOptions {
    std::string scenario;
    std::uint64_t master_seed = 1;
    int replications = 0;
    int jobs = 0;
    std::string out_path;
    std::string format = "table";
};

int cmd_replicate(const ReplicateOptions& opt) {
    evac::ScenarioSpec spec = load_scenario(opt.scenario);
    evac::SimConfig config;
    config.seed = opt.master_seed;
    config.replications = opt.replications;
    config.jobs = opt.jobs;

    evac::ReplicationStats stats = evac::replicate(spec, config);
    evac::StatsFormat fmt = opt.format == "csv" ? evac::StatsFormat::Csv : evac::StatsFormat::Table;
    std::string text = evac::emit_stats(stats, fmt);
    if (opt.out_path.empty()) std::cout << text;
    else write_file(opt.out_path, text);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"evacsim - grid-based evacuation simulator"};
    app.require_subcommand(1);

    std::string validate_arg;
    CLI::App* validate = app.add_subcommand("validate", "lint a scenario file or preset");
    validate->add_option("scenario", validate_arg, "scenario file or preset name")->required();

    RunOptions run_opt;
    CLI::App* run = app.add_subcommand("run", "single seeded run");
    run->add_option("scenario", run_opt.scenario, "scenario file or preset name")->required();
    run->add_option("--seed", run_opt.seed, "run seed (default 1)");
    run->add_option("--max-ticks", run_opt.max_ticks, "override the scenario tick limit");
    run->add_option("--frames", run_opt.frames_dir, "directory for frame dumps");
    run->add_option("--frame-every", run_opt.frame_every, "dump a frame every N ticks (default 1)");
    run->add_option("--frame-format", run_opt.frame_format, "text | graymap")
        ->check(CLI::IsMember({"text", "graymap"}));
    run->add_option("--dump-fields", run_opt.dump_fields_dir,
                    "directory for initial distance-field matrices");

    std::string preset_name, preset_out;
    CLI::App* preset = app.add_subcommand("preset", "write a bundled preset as a scenario file");
    preset->add_option("name", preset_name, "preset name (caseA..caseG)")->required();
    preset->add_option("--out", preset_out, "output path (default: stdout)");

    ReplicateOptions rep_opt;
    CLI::App* rep = app.add_subcommand("replicate", "seeded replications with statistics");
    rep->add_option("scenario", rep_opt.scenario, "scenario file or preset name")->required();
    rep->add_option("-n,--replications", rep_opt.replications, "replication count (default: scenario)");
    rep->add_option("--master-seed", rep_opt.master_seed, "master seed (default 1)");
    rep->add_option("--jobs", rep_opt.jobs, "worker threads (default: hardware)");
    rep->add_option("--out", rep_opt.out_path, "write statistics to this file");
    rep->add_option("--format", rep_opt.format, "table | csv")
        ->check(CLI::IsMember({"table", "csv"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(validate_arg);
        if (run->parsed()) return cmd_run(run_opt);
        if (rep->parsed()) return cmd_replicate(rep_opt);
        if (preset->parsed()) return cmd_preset(preset_name, preset_out);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
