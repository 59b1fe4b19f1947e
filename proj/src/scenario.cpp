#include "waresim/scenario.hpp"

#include "waresim/map_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace waresim {

namespace {

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string dir_of(const std::string& path)
{
    auto pos = path.find_last_of('/');
    return pos == std::string::npos ? std::string(".") : path.substr(0, pos);
}

std::string join_path(const std::string& base, const std::string& rel)
{
    if (rel.empty() || rel.front() == '/')
        return rel;
    return base + "/" + rel;
}

} // namespace

Scenario parse_scenario(const std::string& text, const std::string& base_dir)
{
    Scenario scenario;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool have_map = false, have_robots = false, have_tasks = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream tokens(line);
        std::string key, value;
        if (!(tokens >> key >> value))
            throw std::runtime_error("scenario line " + std::to_string(line_no) +
                                     ": expected 'key value'");
        ScenarioConfig& cfg = scenario.config;
        try {
            if (key == "map") {
                scenario.map_path = join_path(base_dir, value);
                have_map = true;
            } else if (key == "task_file") {
                scenario.task_path = join_path(base_dir, value);
                have_tasks = true;
            } else if (key == "robots") {
                cfg.robot_count = std::stoi(value);
                have_robots = true;
            } else if (key == "K") {
                cfg.k_steps = std::stoi(value);
            } else if (key == "k_h") {
                cfg.weights.k_h = std::stod(value);
            } else if (key == "k_l") {
                cfg.weights.k_l = std::stod(value);
            } else if (key == "f_m") {
                cfg.faults.f_m = std::stod(value);
            } else if (key == "f_c") {
                cfg.faults.f_c = std::stod(value);
            } else if (key == "preset") {
                if (value.rfind("level", 0) != 0)
                    throw std::runtime_error("preset must be level1..level5");
                auto preset = uncertainty_preset(std::stoi(value.substr(5)));
                cfg.faults.f_m = preset.f_m;
                cfg.faults.f_c = preset.f_c;
            } else if (key == "seed") {
                cfg.faults.seed = std::stoull(value);
            } else if (key == "tick_cap") {
                cfg.tick_cap = std::stoll(value);
            } else if (key == "cbs_budget") {
                cfg.cbs_budget = std::stoi(value);
            } else if (key == "fm_exact") {
                cfg.faults.exact_motion_count = std::stoi(value) != 0;
            } else {
                throw std::runtime_error("unknown key '" + key + "'");
            }
        } catch (const std::invalid_argument&) {
            throw std::runtime_error("scenario line " + std::to_string(line_no) +
                                     ": bad value for '" + key + "'");
        }
    }
    if (!have_map || !have_robots || !have_tasks)
        throw std::runtime_error(
            "scenario must define 'map', 'robots' and 'task_file'");
    return scenario;
}

Scenario load_scenario(const std::string& path)
{
    return parse_scenario(read_file(path), dir_of(path));
}

std::string serialize_scenario(const Scenario& scenario)
{
    std::ostringstream out;
    char buf[64];
    auto fmt = [&](double v) {
        auto res = std::to_chars(buf, buf + sizeof(buf), v);
        return std::string(buf, res.ptr);
    };
    const ScenarioConfig& cfg = scenario.config;
    out << "map " << scenario.map_path << "\n";
    out << "robots " << cfg.robot_count << "\n";
    out << "task_file " << scenario.task_path << "\n";
    out << "K " << cfg.k_steps << "\n";
    out << "k_h " << fmt(cfg.weights.k_h) << "\n";
    out << "k_l " << fmt(cfg.weights.k_l) << "\n";
    out << "f_m " << fmt(cfg.faults.f_m) << "\n";
    out << "f_c " << fmt(cfg.faults.f_c) << "\n";
    out << "seed " << cfg.faults.seed << "\n";
    if (cfg.tick_cap > 0)
        out << "tick_cap " << cfg.tick_cap << "\n";
    if (cfg.cbs_budget > 0)
        out << "cbs_budget " << cfg.cbs_budget << "\n";
    if (cfg.faults.exact_motion_count)
        out << "fm_exact 1\n";
    return out.str();
}

std::vector<TaskSpec> parse_task_csv(const std::string& text)
{
    std::vector<TaskSpec> tasks;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line_no == 1 && line.rfind("publish_tick", 0) == 0)
            continue; // header
        std::istringstream fields(line);
        std::string field;
        std::vector<long long> values;
        while (std::getline(fields, field, ','))
            values.push_back(std::stoll(field));
        if (values.size() != 5 && values.size() != 6)
            throw std::runtime_error("task csv line " + std::to_string(line_no) +
                                     ": expected 5 or 6 fields");
        TaskSpec spec;
        spec.publish_tick = values[0];
        spec.pickup = {static_cast<int>(values[1]), static_cast<int>(values[2])};
        spec.working = {static_cast<int>(values[3]), static_cast<int>(values[4])};
        if (values.size() == 6)
            spec.priority = values[5];
        tasks.push_back(spec);
    }
    return tasks;
}

std::vector<TaskSpec> load_task_csv(const std::string& path)
{
    return parse_task_csv(read_file(path));
}

std::string serialize_task_csv(const std::vector<TaskSpec>& tasks)
{
    std::ostringstream out;
    out << "publish_tick,pickup_x,pickup_y,work_x,work_y\n";
    for (const TaskSpec& t : tasks) {
        out << t.publish_tick << ',' << t.pickup.x << ',' << t.pickup.y << ','
            << t.working.x << ',' << t.working.y;
        if (t.priority)
            out << ',' << *t.priority;
        out << "\n";
    }
    return out.str();
}

void check_tasks_against_map(const std::vector<TaskSpec>& tasks,
                             const WarehouseMap& map)
{
    for (size_t i = 0; i < tasks.size(); ++i) {
        const TaskSpec& t = tasks[i];
        if (!map.in_bounds(t.pickup) ||
            map.kind(t.pickup) != CellKind::PickupStation)
            throw std::runtime_error("task " + std::to_string(i) + ": " +
                                     to_string(t.pickup) +
                                     " is not a pickup station");
        if (!map.in_bounds(t.working) ||
            map.kind(t.working) != CellKind::WorkingStation)
            throw std::runtime_error("task " + std::to_string(i) + ": " +
                                     to_string(t.working) +
                                     " is not a working station");
    }
}

std::vector<TaskSpec> generate_tasks(const WarehouseMap& map, int count,
                                     int frequency, uint64_t seed)
{
    auto pickups = map.stations_of_kind(CellKind::PickupStation);
    auto workings = map.stations_of_kind(CellKind::WorkingStation);
    if (pickups.empty() || workings.empty())
        throw std::runtime_error("map has no pickup or working stations");
    if (frequency < 1)
        throw std::runtime_error("task frequency must be >= 1");
    std::mt19937_64 rng(seed);
    std::vector<TaskSpec> tasks;
    tasks.reserve(count);
    for (int i = 0; i < count; ++i) {
        TaskSpec t;
        t.publish_tick = 1 + i / frequency;
        t.pickup = pickups[rng() % pickups.size()];
        t.working = workings[rng() % workings.size()];
        tasks.push_back(t);
    }
    return tasks;
}

std::vector<TaskSpec> reschedule_tasks(const std::vector<TaskSpec>& tasks,
                                       int frequency)
{
    if (frequency < 1)
        throw std::runtime_error("task frequency must be >= 1");
    std::vector<TaskSpec> out = tasks;
    for (size_t i = 0; i < out.size(); ++i) {
        out[i].publish_tick = 1 + static_cast<Tick>(i) / frequency;
        out[i].priority.reset();
    }
    return out;
}

} // namespace waresim
