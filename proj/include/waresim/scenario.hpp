#pragma once

#include "waresim/sim.hpp"

#include <string>
#include <vector>

namespace waresim {

// Scenario file: one "key value" pair per line, '#' comments allowed.
// Keys: map, robots, task_file, K, k_h, k_l, f_m, f_c, preset, seed,
// tick_cap, cbs_budget, fm_exact. Relative paths resolve against the
// scenario file's directory.
struct Scenario {
    std::string map_path;
    std::string task_path;
    ScenarioConfig config;
};

Scenario parse_scenario(const std::string& text, const std::string& base_dir);
Scenario load_scenario(const std::string& path);
std::string serialize_scenario(const Scenario& scenario);

// Task CSV: "publish_tick,pickup_x,pickup_y,work_x,work_y[,priority]" with
// an optional header row.
std::vector<TaskSpec> parse_task_csv(const std::string& text);
std::vector<TaskSpec> load_task_csv(const std::string& path);
std::string serialize_task_csv(const std::vector<TaskSpec>& tasks);

// Station-kind checks for every task endpoint; throws std::runtime_error
// with the offending task index on mismatch.
void check_tasks_against_map(const std::vector<TaskSpec>& tasks,
                             const WarehouseMap& map);

// Uniform random tasks over the map's stations, `frequency` publishes per
// tick starting at tick 1.
std::vector<TaskSpec> generate_tasks(const WarehouseMap& map, int count,
                                     int frequency, uint64_t seed);

// Reassigns publish ticks of an existing task list to `frequency` per tick,
// preserving order. Used by task-frequency sweeps.
std::vector<TaskSpec> reschedule_tasks(const std::vector<TaskSpec>& tasks,
                                       int frequency);

} // namespace waresim
