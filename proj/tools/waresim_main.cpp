#include "waresim/cli_commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"waresim - lifelong multi-robot warehouse transport simulator"};
    app.require_subcommand(1);

    // validate
    std::string map_path;
    int robots_flag = -1;
    auto* validate = app.add_subcommand(
        "validate", "Check a map against the well-formedness and partition criteria");
    validate->add_option("map", map_path, "map file")->required();
    validate->add_option("--robots", robots_flag,
                         "robot count for the station-count criterion "
                         "(default: number of robot stations)");

    // run
    waresim::cli::RunOptions run_opts;
    uint64_t seed_flag = 0;
    bool seed_set = false;
    auto* run = app.add_subcommand("run", "Run one scenario");
    run->add_option("scenario", run_opts.scenario_path, "scenario file")
        ->required();
    run->add_option("--out-dir", run_opts.out_dir, "output directory")
        ->default_val("out");
    run->add_flag("--no-trace", run_opts.no_trace, "skip trace.csv");
    run->add_option("--render-every", run_opts.render_every,
                    "write a heat-map raster every T ticks");
    run->add_option("--trials", run_opts.trials,
                    "repeat with derived sub-seeds and append mean/stddev rows");
    run->add_option("--seed", seed_flag, "override the scenario seed")
        ->each([&](const std::string&) { seed_set = true; });

    // sweep
    waresim::cli::SweepOptions sweep_opts;
    auto* sweep = app.add_subcommand(
        "sweep", "Run a parameter sweep and aggregate metrics");
    sweep->add_option("scenario", sweep_opts.scenario_path, "base scenario")
        ->required();
    sweep->add_option("--variable", sweep_opts.variable,
                      "task-frequency or uncertainty-level")
        ->required();
    sweep->add_option("--values", sweep_opts.values, "swept values")
        ->required()
        ->delimiter(',');
    sweep->add_option("--trials", sweep_opts.trials, "trials per value")
        ->default_val(1);
    sweep->add_option("--out-dir", sweep_opts.out_dir, "output directory")
        ->default_val("sweep_out");

    // gen-map
    waresim::cli::GenMapOptions gen_opts;
    bool small = false;
    auto* gen = app.add_subcommand(
        "gen-map", "Generate a warehouse map, task list and scenario");
    gen->add_option("--out-dir", gen_opts.out_dir, "output directory")
        ->default_val("generated");
    gen->add_flag("--small", small,
                  "use the custom block parameters instead of the full-scale "
                  "environment");
    gen->add_option("--nx", gen_opts.nx, "intersection columns");
    gen->add_option("--ny", gen_opts.ny, "intersection rows");
    gen->add_option("--pitch-x", gen_opts.pitch_x, "horizontal road pitch");
    gen->add_option("--alpha", gen_opts.alpha, "sector capacity factor");
    gen->add_option("--robot-stations", gen_opts.robot_stations, "");
    gen->add_option("--pickup-stations", gen_opts.pickup_stations, "");
    gen->add_option("--working-stations", gen_opts.working_stations, "");
    gen->add_option("--width", gen_opts.width, "pad map to this width");
    gen->add_option("--height", gen_opts.height, "pad map to this height");
    gen->add_option("--robots", gen_opts.robots,
                    "robot count in the scenario (default: every station)");
    gen->add_option("--tasks", gen_opts.tasks, "task count");
    gen->add_option("--frequency", gen_opts.frequency, "tasks per tick");
    gen->add_option("--seed", gen_opts.seed, "task generation / run seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : waresim::cli::kExitUsage;
    }

    try {
        if (validate->parsed()) {
            std::optional<int> robots;
            if (robots_flag >= 0)
                robots = robots_flag;
            return waresim::cli::cmd_validate(map_path, robots, std::cout,
                                              std::cerr);
        }
        if (run->parsed()) {
            if (seed_set)
                run_opts.seed_override = seed_flag;
            return waresim::cli::cmd_run(run_opts, std::cout, std::cerr);
        }
        if (sweep->parsed())
            return waresim::cli::cmd_sweep(sweep_opts, std::cout, std::cerr);
        if (gen->parsed()) {
            gen_opts.full_scale = !small;
            return waresim::cli::cmd_gen_map(gen_opts, std::cout, std::cerr);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return waresim::cli::kExitDomain;
    }
    return waresim::cli::kExitUsage;
}
