#include "waresim/cli_commands.hpp"

#include "waresim/map_gen.hpp"
#include "waresim/map_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace fs = std::filesystem;

namespace waresim::cli {

namespace {

struct LoadedScenario {
    Scenario scenario;
    WarehouseMap map;
    SectorIndex index;
    std::vector<TaskSpec> tasks;
};

LoadedScenario load_bundle(const std::string& scenario_path)
{
    LoadedScenario bundle;
    bundle.scenario = load_scenario(scenario_path);
    bundle.map = load_map(bundle.scenario.map_path);
    auto partition = validate_partition(bundle.map);
    if (!partition.all_pass())
        throw std::runtime_error("map fails partition validation:\n" +
                                 partition.to_text());
    auto well_formed =
        validate_well_formed(bundle.map, bundle.scenario.config.robot_count);
    if (!well_formed.all_pass())
        throw std::runtime_error("map fails well-formedness validation:\n" +
                                 well_formed.to_text());
    bundle.index = SectorIndex::build(bundle.map);
    bundle.tasks = load_task_csv(bundle.scenario.task_path);
    check_tasks_against_map(bundle.tasks, bundle.map);
    return bundle;
}

std::string csv_header_with(const std::string& prefix)
{
    std::string header = prefix;
    for (const auto& col : MetricsReport::csv_columns())
        header += "," + col;
    return header + ",complete";
}

struct Accumulator {
    std::vector<std::vector<double>> rows;

    void add(const MetricsReport& m)
    {
        rows.push_back({static_cast<double>(m.makespan), m.ave_cal_time,
                        m.ave_delay, m.ave_lost, m.ave_task_waiting_time,
                        m.ave_task_finish_time, m.max_max_heat, m.ave_max_heat,
                        m.ave_ave_heat});
    }
    std::vector<double> mean() const
    {
        std::vector<double> out(rows.empty() ? 0 : rows[0].size(), 0.0);
        for (const auto& row : rows)
            for (size_t i = 0; i < row.size(); ++i)
                out[i] += row[i];
        for (double& v : out)
            v /= static_cast<double>(rows.size());
        return out;
    }
    std::vector<double> stddev() const
    {
        auto m = mean();
        std::vector<double> out(m.size(), 0.0);
        if (rows.size() < 2)
            return out;
        for (const auto& row : rows)
            for (size_t i = 0; i < row.size(); ++i)
                out[i] += (row[i] - m[i]) * (row[i] - m[i]);
        for (double& v : out)
            v = std::sqrt(v / static_cast<double>(rows.size() - 1));
        return out;
    }
};

std::string format_values(const std::vector<double>& values)
{
    std::string out;
    char buf[64];
    for (size_t i = 0; i < values.size(); ++i) {
        if (i == 0 && values[i] == std::floor(values[i]) &&
            std::abs(values[i]) < 1e15)
            std::snprintf(buf, sizeof(buf), "%lld",
                          static_cast<long long>(values[i]));
        else
            std::snprintf(buf, sizeof(buf), "%.6f", values[i]);
        out += ",";
        out += buf;
    }
    return out;
}

} // namespace

int cmd_validate(const std::string& map_path, std::optional<int> robot_count,
                 std::ostream& out, std::ostream& err)
{
    WarehouseMap map;
    try {
        map = load_map(map_path);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    int robots = robot_count.value_or(
        static_cast<int>(map.stations_of_kind(CellKind::RobotStation).size()));
    auto well_formed = validate_well_formed(map, robots);
    auto partition = validate_partition(map);
    out << well_formed.to_text() << partition.to_text();
    bool ok = well_formed.all_pass() && partition.all_pass();
    out << (ok ? "map valid\n" : "map invalid\n");
    return ok ? kExitOk : kExitDomain;
}

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err)
{
    LoadedScenario bundle;
    try {
        bundle = load_bundle(options.scenario_path);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    if (options.trials < 1) {
        err << "error: trials must be >= 1\n";
        return kExitUsage;
    }

    fs::create_directories(options.out_dir);
    std::ofstream metrics(options.out_dir + "/metrics.csv");
    metrics << csv_header_with("trial,seed") << "\n";

    Accumulator accum;
    bool all_complete = true;
    for (int trial = 0; trial < options.trials; ++trial) {
        ScenarioConfig cfg = bundle.scenario.config;
        if (options.seed_override)
            cfg.faults.seed = *options.seed_override;
        if (trial > 0)
            cfg.faults.seed = derive_subseed(cfg.faults.seed, 0, trial);

        std::string suffix =
            options.trials == 1 ? "" : "_" + std::to_string(trial);
        std::ofstream trace, heat, tasks;
        RunSinks sinks;
        if (!options.no_trace) {
            trace.open(options.out_dir + "/trace" + suffix + ".csv");
            sinks.trace = &trace;
        }
        heat.open(options.out_dir + "/heat" + suffix + ".csv");
        sinks.heat = &heat;
        tasks.open(options.out_dir + "/tasks" + suffix + ".csv");
        sinks.task_report = &tasks;

        if (options.render_every > 0) {
            sinks.on_tick = [&](const Simulation& s) {
                if (s.tick() % options.render_every != 0)
                    return;
                char name[64];
                std::snprintf(name, sizeof(name), "/heat_%06lld.pgm",
                              static_cast<long long>(s.tick()));
                std::ofstream pgm(options.out_dir + name, std::ios::binary);
                pgm << render_heat_pgm(bundle.map, s.traffic());
            };
        }

        Simulation sim(bundle.map, bundle.index, bundle.tasks, cfg);
        RunResult result = sim.run(sinks);

        metrics << trial << ',' << cfg.faults.seed << ','
                << result.metrics.csv_row() << ','
                << (result.complete ? 1 : 0) << "\n";
        accum.add(result.metrics);
        all_complete = all_complete && result.complete;
        if (!result.complete)
            err << "trial " << trial << " incomplete: " << result.pending_tasks
                << " tasks pending at tick cap\n";
    }
    if (options.trials > 1) {
        metrics << "mean," << format_values(accum.mean()).substr(1) << ",\n";
        metrics << "stddev," << format_values(accum.stddev()).substr(1) << ",\n";
    }
    out << "metrics written to " << options.out_dir << "/metrics.csv\n";
    return all_complete ? kExitOk : kExitDomain;
}

int cmd_sweep(const SweepOptions& options, std::ostream& out, std::ostream& err)
{
    if (options.values.empty()) {
        err << "error: sweep values must be non-empty\n";
        return kExitUsage;
    }
    if (options.variable != "task-frequency" &&
        options.variable != "uncertainty-level") {
        err << "error: unknown sweep variable '" << options.variable << "'\n";
        return kExitUsage;
    }
    if (options.variable == "uncertainty-level") {
        for (int64_t v : options.values)
            if (v < 1 || v > 5) {
                err << "error: uncertainty level must be 1..5\n";
                return kExitUsage;
            }
    }
    LoadedScenario bundle;
    try {
        bundle = load_bundle(options.scenario_path);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    fs::create_directories(options.out_dir);
    std::ofstream agg(options.out_dir + "/sweep.csv");
    agg << csv_header_with("variable,value,trial,seed,f_m,f_c") << "\n";

    bool all_ok = true;
    char buf[64];
    for (int64_t value : options.values) {
        Accumulator accum;
        for (int trial = 0; trial < options.trials; ++trial) {
            ScenarioConfig cfg = bundle.scenario.config;
            std::vector<TaskSpec> tasks = bundle.tasks;
            if (options.variable == "task-frequency")
                tasks = reschedule_tasks(tasks, static_cast<int>(value));
            else {
                auto preset = uncertainty_preset(static_cast<int>(value));
                cfg.faults.f_m = preset.f_m;
                cfg.faults.f_c = preset.f_c;
            }
            cfg.faults.seed = derive_subseed(bundle.scenario.config.faults.seed,
                                             static_cast<uint64_t>(value),
                                             static_cast<uint64_t>(trial));

            bool complete = false;
            MetricsReport m;
            try {
                Simulation sim(bundle.map, bundle.index, tasks, cfg);
                RunResult result = sim.run();
                complete = result.complete;
                m = result.metrics;
            } catch (const std::exception& e) {
                err << "value " << value << " trial " << trial
                    << " failed: " << e.what() << "\n";
            }
            std::snprintf(buf, sizeof(buf), "%.6g,%.6g", cfg.faults.f_m,
                          cfg.faults.f_c);
            agg << options.variable << ',' << value << ',' << trial << ','
                << cfg.faults.seed << ',' << buf << ',' << m.csv_row() << ','
                << (complete ? 1 : 0) << "\n";
            if (complete)
                accum.add(m);
            all_ok = all_ok && complete;
        }
        if (!accum.rows.empty()) {
            agg << options.variable << ',' << value << ",mean,,,"
                << format_values(accum.mean()).substr(1) << ",\n";
            agg << options.variable << ',' << value << ",stddev,,,"
                << format_values(accum.stddev()).substr(1) << ",\n";
        }
    }
    out << "sweep written to " << options.out_dir << "/sweep.csv\n";
    return all_ok ? kExitOk : kExitDomain;
}

int cmd_gen_map(const GenMapOptions& options, std::ostream& out, std::ostream& err)
{
    try {
        MapGenParams params;
        if (options.full_scale) {
            params = full_scale_params();
        } else {
            params.nx = options.nx;
            params.ny = options.ny;
            params.pitch_x = options.pitch_x;
            params.alpha = options.alpha;
            params.width = options.width;
            params.height = options.height;
            params.robot_stations = options.robot_stations;
            params.pickup_stations = options.pickup_stations;
            params.working_stations = options.working_stations;
        }
        WarehouseMap map = generate_map(params);

        fs::create_directories(options.out_dir);
        save_map(map, options.out_dir + "/map.txt");

        auto tasks = generate_tasks(map, options.tasks, options.frequency,
                                    options.seed);
        std::ofstream task_file(options.out_dir + "/tasks.csv");
        task_file << serialize_task_csv(tasks);

        Scenario scenario;
        scenario.map_path = "map.txt";
        scenario.task_path = "tasks.csv";
        scenario.config.robot_count =
            options.robots > 0 ? options.robots : params.robot_stations;
        scenario.config.k_steps = 3;
        scenario.config.weights = {10.0, 50.0};
        auto preset = uncertainty_preset(1);
        scenario.config.faults.f_m = preset.f_m;
        scenario.config.faults.f_c = preset.f_c;
        scenario.config.faults.seed = options.seed;
        std::ofstream scen_file(options.out_dir + "/scenario.txt");
        scen_file << serialize_scenario(scenario);

        out << "map " << map.width() << "x" << map.height() << ", "
            << map.stations_of_kind(CellKind::RobotStation).size()
            << " robot stations, "
            << map.stations_of_kind(CellKind::PickupStation).size()
            << " pickup stations, "
            << map.stations_of_kind(CellKind::WorkingStation).size()
            << " working stations, " << map.sector_count() << " sectors\n";
        out << "wrote " << options.out_dir << "/{map.txt,tasks.csv,scenario.txt}\n";
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

std::string render_heat_pgm(const WarehouseMap& map, const TrafficState& traffic)
{
    std::ostringstream out;
    out << "P5\n" << map.width() << " " << map.height() << "\n255\n";
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) {
            Coord c{x, y};
            unsigned char pixel = 0;
            if (map.passable(c)) {
                double h = 0.0;
                int32_t s = map.sector_of(c);
                if (s != kNoSector && s < static_cast<int32_t>(traffic.heat.size()))
                    h = std::min(traffic.heat[s], 1.0);
                pixel = static_cast<unsigned char>(255.0 - std::round(195.0 * h));
            }
            out.put(static_cast<char>(pixel));
        }
    }
    return out.str();
}

} // namespace waresim::cli
