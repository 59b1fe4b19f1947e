#pragma once

#include "waresim/scenario.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace waresim::cli {

// Exit codes shared by every subcommand:
//   0  success
//   1  domain failure (validation fail, incomplete run)
//   2  usage or parse error
constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

int cmd_validate(const std::string& map_path, std::optional<int> robot_count,
                 std::ostream& out, std::ostream& err);

struct RunOptions {
    std::string scenario_path;
    std::string out_dir;
    bool no_trace = false;
    int render_every = 0;
    int trials = 1;
    std::optional<uint64_t> seed_override;
};

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);

struct SweepOptions {
    std::string scenario_path;
    std::string variable; // "task-frequency" or "uncertainty-level"
    std::vector<int64_t> values;
    int trials = 1;
    std::string out_dir;
};

int cmd_sweep(const SweepOptions& options, std::ostream& out, std::ostream& err);

struct GenMapOptions {
    std::string out_dir;
    bool full_scale = true; // false: use the explicit fields below
    int nx = 4, ny = 3;
    int pitch_x = 8;
    double alpha = 0.5;
    int robot_stations = 56, pickup_stations = 28, working_stations = 28;
    int width = 0, height = 0;
    int robots = 0; // 0 = one per robot station
    int tasks = 3000;
    int frequency = 5;
    uint64_t seed = 1;
};

int cmd_gen_map(const GenMapOptions& options, std::ostream& out,
                std::ostream& err);

// Grayscale raster of the sector heat field, binary PGM. Walls are black;
// passable cells shade darker as their sector gets hotter (255 at heat 0
// down to 60 at heat >= 1).
std::string render_heat_pgm(const WarehouseMap& map, const TrafficState& traffic);

} // namespace waresim::cli
