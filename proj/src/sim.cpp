#include "waresim/sim.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cstdio>
#include <ostream>
#include <queue>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace waresim {

const char* robot_mode_name(RobotMode m)
{
    switch (m) {
    case RobotMode::Idle: return "idle";
    case RobotMode::ToPickup: return "to_pickup";
    case RobotMode::Carrying: return "carrying";
    case RobotMode::ToStation: return "to_station";
    case RobotMode::Stopped: return "stopped";
    }
    return "?";
}

const char* trace_flag(const RobotState& r)
{
    if (r.comm_failed)
        return "comm_failed";
    if (r.stopped())
        return "stopped";
    if (r.delayed)
        return "delayed";
    return "ok";
}

const std::vector<std::string>& MetricsReport::csv_columns()
{
    static const std::vector<std::string> cols = {
        "makespan",          "ave_cal_time",  "ave_delay",
        "ave_lost",          "ave_task_waiting_time",
        "ave_task_finish_time", "max_max_heat", "ave_max_heat",
        "ave_ave_heat"};
    return cols;
}

std::string MetricsReport::csv_row() const
{
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "%lld,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f",
                  static_cast<long long>(makespan), ave_cal_time, ave_delay,
                  ave_lost, ave_task_waiting_time, ave_task_finish_time,
                  max_max_heat, ave_max_heat, ave_ave_heat);
    return buf;
}

Simulation::Simulation(const WarehouseMap& map, const SectorIndex& index,
                       std::vector<TaskSpec> tasks, const ScenarioConfig& config)
    : map_(map),
      index_(index),
      config_(config),
      task_specs_(std::move(tasks)),
      injector_(config.faults),
      station_reserved_(map.cell_count(), 0)
{
    if (config_.faults.f_m < 0.0 || config_.faults.f_m > 1.0 ||
        config_.faults.f_c < 0.0 || config_.faults.f_c > 1.0)
        throw std::invalid_argument("fault probabilities must lie in [0,1]");
    if (config_.k_steps < 0)
        throw std::invalid_argument("K must be non-negative");

    std::stable_sort(task_specs_.begin(), task_specs_.end(),
                     [](const TaskSpec& a, const TaskSpec& b) {
                         return a.publish_tick < b.publish_tick;
                     });

    auto stations = map_.stations_of_kind(CellKind::RobotStation);
    if (config_.robot_count > static_cast<int>(stations.size()))
        throw std::invalid_argument(
            "robot_count " + std::to_string(config_.robot_count) + " exceeds " +
            std::to_string(stations.size()) + " robot stations");
    robots_.resize(config_.robot_count);
    for (int i = 0; i < config_.robot_count; ++i) {
        RobotState& r = robots_[i];
        r.id = i;
        r.cell = stations[i];
        r.sector = map_.sector_of(r.cell);
        r.home_station = r.cell;
        r.leg_goal = r.cell;
    }

    for (const auto& sector : index_.sectors) {
        for (const Crossing& c : sector.entryways) {
            if (!authority_index_.count(c.entry_cell)) {
                authority_index_[c.entry_cell] =
                    static_cast<int>(authorities_.size());
                authorities_.push_back({c.entry_cell, sector.id, std::nullopt,
                                        false, {}});
            }
        }
    }

    tick_cap_ = config_.tick_cap > 0
                    ? config_.tick_cap
                    : 50 * static_cast<Tick>(task_specs_.size() +
                                             robots_.size());
    refresh_traffic();
}

bool Simulation::finished() const
{
    return next_task_spec_ == task_specs_.size() &&
           queues_.unfinished_count() == 0;
}

EntrywayAuthority* Simulation::authority_at(Coord cell)
{
    auto it = authority_index_.find(cell);
    return it == authority_index_.end() ? nullptr : &authorities_[it->second];
}

const EntrywayAuthority* Simulation::authority_at(Coord cell) const
{
    auto it = authority_index_.find(cell);
    return it == authority_index_.end() ? nullptr : &authorities_[it->second];
}

std::optional<Coord> Simulation::exit_cell_towards(int32_t from, int32_t to) const
{
    for (const Crossing& c : index_.sectors[from].exitways)
        if (c.to == to)
            return c.exit_cell;
    return std::nullopt;
}

std::optional<Coord> Simulation::entry_cell_towards(int32_t from, int32_t to) const
{
    for (const Crossing& c : index_.sectors[to].entryways)
        if (c.from == from)
            return c.entry_cell;
    return std::nullopt;
}

bool Simulation::at_own_exitway(const RobotState& r) const
{
    for (const Crossing& c : index_.sectors[r.sector].exitways)
        if (c.exit_cell == r.cell)
            return true;
    return false;
}

bool Simulation::cell_closed_for(Coord cell, RobotId robot) const
{
    for (const auto& region : closures_) {
        if (region.owner == robot)
            continue;
        for (Coord c : region.cells)
            if (c == cell)
                return true;
    }
    return false;
}

void Simulation::rebuild_frozen_counts()
{
    for (auto& r : robots_)
        r.frozen_by = 0;
    for (const auto& region : closures_) {
        for (auto& r : robots_) {
            if (r.id == region.owner)
                continue;
            for (Coord c : region.cells)
                if (c == r.cell) {
                    ++r.frozen_by;
                    break;
                }
        }
    }
}

int Simulation::plan_horizon(int32_t sector_id) const
{
    return std::max(2 * index_.roads[sector_id].diameter, 8);
}

// ---------------------------------------------------------------------------
// Fault handling
// ---------------------------------------------------------------------------

ClosureRegion Simulation::handle_comm_failure(RobotId robot)
{
    RobotState& r = robots_[robot];
    r.comm_failed = true;
    r.halted = false;
    r.fail_moves_done = 0;
    ++stats_.comm_failures;

    // Locate the robot on its previously planned path. It executed either
    // zero or one step of it.
    size_t cursor = 0;
    if (r.last_plan.cells.size() > 1 && r.last_plan.cells[1] == r.cell &&
        r.last_plan.cells[1] != r.last_plan.cells[0])
        cursor = 1;
    if (r.last_plan.cells.empty() ||
        r.last_plan.cells[cursor] != r.cell)
        r.last_plan.cells.clear(); // stale or missing plan: stop in place

    ClosureRegion region;
    region.owner = robot;
    region.cells.push_back(r.cell);

    if (at_own_exitway(r)) {
        // Stops immediately at the exitway.
        r.halted = true;
        r.fail_cursor = 0;
        r.fail_entries_left = 0;
    } else {
        int budget = config_.k_steps;
        size_t next = cursor + 1;
        int included = 0;
        while (budget > 0 && next < r.last_plan.cells.size()) {
            Coord c = r.last_plan.cells[next];
            // Onboard sensing: never roll into a foreign closed area.
            if (cell_closed_for(c, robot))
                break;
            region.cells.push_back(c);
            ++included;
            --budget;
            ++next;
            bool is_exit = false;
            for (const Crossing& cr : index_.sectors[r.sector].exitways)
                if (cr.exit_cell == c)
                    is_exit = true;
            if (is_exit)
                break; // will stop there
        }
        r.fail_cursor = cursor + 1;
        r.fail_entries_left = included;
        if (included == 0)
            r.halted = true;
    }

    // Deduplicate while preserving order (wait entries repeat cells).
    std::vector<Coord> unique_cells;
    for (Coord c : region.cells)
        if (std::find(unique_cells.begin(), unique_cells.end(), c) ==
            unique_cells.end())
            unique_cells.push_back(c);
    region.cells = std::move(unique_cells);

    closures_.push_back(region);
    rebuild_frozen_counts();
    return region;
}

void Simulation::handle_recovery(RobotId robot)
{
    RobotState& r = robots_[robot];
    r.comm_failed = false;
    r.halted = false;
    r.fail_cursor = 0;
    r.fail_entries_left = 0;
    r.fail_moves_done = 0;
    r.last_plan = TimedPath{};
    ++stats_.recoveries;
    closures_.erase(std::remove_if(closures_.begin(), closures_.end(),
                                   [&](const ClosureRegion& c) {
                                       return c.owner == robot;
                                   }),
                    closures_.end());
    rebuild_frozen_counts();
}

void Simulation::force_comm_failure(RobotId robot)
{
    if (!robots_[robot].comm_failed)
        handle_comm_failure(robot);
}

void Simulation::force_recovery(RobotId robot)
{
    if (robots_[robot].comm_failed)
        handle_recovery(robot);
}

void Simulation::sample_faults()
{
    // Draw order: motion delays (robots in id order), then recoveries, then
    // the new failure.
    std::vector<RobotId> active;
    for (const auto& r : robots_)
        if (!r.idle_without_task())
            active.push_back(r.id);
    auto delayed = injector_.sample_motion_delays(active);
    for (auto& r : robots_)
        r.delayed = false;
    for (RobotId id : delayed)
        robots_[id].delayed = true;

    std::vector<RobotId> normal, failed;
    for (const auto& r : robots_)
        (r.comm_failed ? failed : normal).push_back(r.id);
    auto comm = injector_.step_comm_failures(normal, failed);
    for (RobotId id : comm.recovered)
        handle_recovery(id);
    if (comm.newly_failed)
        handle_comm_failure(*comm.newly_failed);
}

// ---------------------------------------------------------------------------
// Traffic and task planning
// ---------------------------------------------------------------------------

void Simulation::refresh_traffic()
{
    std::vector<RobotTrafficInfo> infos;
    infos.reserve(robots_.size());
    for (const auto& r : robots_)
        infos.push_back(
            {r.sector, r.idle_without_task(), r.delayed, r.comm_failed});
    traffic_ = update_traffic(index_.sectors, index_.graph, infos,
                              config_.weights, tick_);
}

std::vector<FreeRobot> Simulation::free_pool() const
{
    std::vector<FreeRobot> pool;
    for (const auto& r : robots_) {
        if (r.comm_failed || r.frozen_by > 0)
            continue;
        if (r.idle_without_task() || r.just_finished)
            pool.push_back({r.id, r.cell});
    }
    return pool;
}

void Simulation::recompute_route(RobotId id)
{
    RobotState& r = robots_[id];
    int32_t dest = map_.sector_of(r.leg_goal);
    auto route = plan_sector_route(index_.graph, traffic_, r.sector, dest);
    if (!route)
        throw SimulationError("robot " + std::to_string(id) +
                              ": sector " + std::to_string(r.sector) +
                              " cannot reach sector " + std::to_string(dest));
    r.route = route->sectors;
    r.route_dirty = false;
}

void Simulation::assign_task(RobotId id, TaskId task_id)
{
    RobotState& r = robots_[id];
    queues_.mark_assigned(task_id, id, tick_);
    r.task = task_id;
    r.mode = RobotMode::ToPickup;
    r.priority_tick = tick_;
    r.leg_goal = queues_.task(task_id).pickup;
    r.just_finished = false;
    recompute_route(id);
}

std::vector<Coord> Simulation::free_return_stations() const
{
    std::unordered_set<int> occupied;
    for (const auto& r : robots_)
        occupied.insert(map_.idx(r.cell));
    std::vector<Coord> out;
    for (int y = 0; y < map_.height(); ++y)
        for (int x = 0; x < map_.width(); ++x) {
            Coord c{x, y};
            if (map_.kind(c) != CellKind::RobotStation)
                continue;
            if (station_reserved_[map_.idx(c)] || occupied.count(map_.idx(c)))
                continue;
            out.push_back(c);
        }
    return out;
}

void Simulation::start_return_leg(RobotId id)
{
    RobotState& r = robots_[id];
    auto candidates = free_return_stations();
    if (candidates.empty())
        throw SimulationError("no free robot station for robot " +
                              std::to_string(id));

    // One forward Dijkstra from the robot's sector prices every candidate.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(index_.graph.vertex_count, inf);
    using Item = std::pair<double, int32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    dist[r.sector] = 0.0;
    open.push({0.0, r.sector});
    while (!open.empty()) {
        auto [d, v] = open.top();
        open.pop();
        if (d > dist[v])
            continue;
        for (int ei : index_.graph.out_edges[v]) {
            const SectorEdge& e = index_.graph.edges[ei];
            double nd = d + traffic_.weights[ei];
            if (nd < dist[e.to]) {
                dist[e.to] = nd;
                open.push({nd, e.to});
            }
        }
    }

    bool found = false;
    Coord best{};
    double best_cost = inf;
    for (Coord c : candidates) {
        int32_t s = map_.sector_of(c);
        if (dist[s] == inf)
            continue;
        if (!found || dist[s] < best_cost || (dist[s] == best_cost && c < best)) {
            found = true;
            best = c;
            best_cost = dist[s];
        }
    }
    if (!found)
        throw SimulationError("robot " + std::to_string(id) +
                              " cannot reach any free robot station");

    r.mode = RobotMode::ToStation;
    r.task.reset();
    r.leg_goal = best;
    r.home_station = best;
    station_reserved_[map_.idx(best)] = 1;
    recompute_route(id);
}

void Simulation::run_task_planning()
{
    // Ingest tasks published by now.
    while (next_task_spec_ < task_specs_.size() &&
           task_specs_[next_task_spec_].publish_tick <= tick_) {
        const TaskSpec& spec = task_specs_[next_task_spec_];
        Task task;
        task.id = static_cast<TaskId>(next_task_spec_);
        task.publish_tick = spec.publish_tick;
        task.pickup = spec.pickup;
        task.working = spec.working;
        task.priority = spec.priority;
        queues_.enqueue_task(task);
        ++next_task_spec_;
    }

    for (auto& r : robots_)
        if (r.route_dirty && !r.comm_failed)
            recompute_route(r.id);

    auto pool = free_pool();
    if (!pool.empty()) {
        auto assignments = allocate(queues_, pool, map_);
        for (const auto& a : assignments)
            assign_task(a.robot, a.task);
    }

    // Finishers that stayed unassigned head back to a station.
    for (auto& r : robots_) {
        if (r.just_finished) {
            r.just_finished = false;
            if (!r.task)
                start_return_leg(r.id);
        }
    }
}

// ---------------------------------------------------------------------------
// Sector planning
// ---------------------------------------------------------------------------

Coord Simulation::current_goal(const RobotState& r) const
{
    if (r.route.size() >= 2) {
        auto exit = exit_cell_towards(r.route[0], r.route[1]);
        if (exit)
            return *exit;
    }
    return r.leg_goal;
}

std::map<RobotId, RobotAction> Simulation::plan_sector_step(int32_t sector_id)
{
    std::map<RobotId, RobotAction> actions;
    const RoadGraph& road = index_.roads[sector_id];

    std::vector<RobotId> planners;
    for (const auto& r : robots_) {
        if (r.sector != sector_id)
            continue;
        if (r.comm_failed)
            continue; // beyond command reach; the engine moves it
        if (r.frozen_by > 0) {
            actions[r.id] = {ActionType::Stop, r.cell};
            continue;
        }
        if (r.mode == RobotMode::Idle) {
            actions[r.id] = {ActionType::Wait, r.cell};
            continue;
        }
        planners.push_back(r.id);
    }

    ReservationTable table(tick_, plan_horizon(sector_id));
    table.bind(map_);
    for (const auto& region : closures_)
        for (Coord c : region.cells)
            table.close_cell(c, region.owner);
    for (const auto& auth : authorities_)
        if (auth.holder)
            table.close_cell(auth.cell, *auth.holder);
    for (const auto& r : robots_) {
        if (r.sector != sector_id)
            continue;
        bool is_static = r.comm_failed || r.frozen_by > 0 ||
                         r.mode == RobotMode::Idle;
        if (is_static)
            table.close_cell(r.cell, r.id);
    }

    // Priority order mirrors the task assignment order.
    std::sort(planners.begin(), planners.end(), [&](RobotId a, RobotId b) {
        const RobotState& ra = robots_[a];
        const RobotState& rb = robots_[b];
        if (ra.priority_tick != rb.priority_tick)
            return ra.priority_tick < rb.priority_tick;
        return a < b;
    });

    auto first_step_action = [](const TimedPath& path) {
        if (path.cells.size() >= 2 && path.cells[1] != path.cells[0])
            return RobotAction{ActionType::MoveTo, path.cells[1]};
        return RobotAction{ActionType::Wait, path.cells.empty()
                                                 ? Coord{}
                                                 : path.cells[0]};
    };

    // Phase 1: prioritized cooperative A* against the accumulating table.
    std::vector<TimedPath> phase1(planners.size());
    for (size_t i = 0; i < planners.size(); ++i) {
        RobotState& r = robots_[planners[i]];
        Coord goal = current_goal(r);
        std::optional<TimedPath> path;
        if (r.cell == goal) {
            TimedPath sit;
            sit.start_tick = tick_;
            sit.cells = {r.cell};
            path = sit;
        } else {
            PlanQuery query;
            query.start = r.cell;
            query.goal = goal;
            query.start_tick = tick_;
            query.robot = r.id;
            query.sit_at_goal = true;
            path = space_time_astar(road, map_, query, table);
        }
        if (!path) {
            // Blocked: wait in place and retry next tick.
            TimedPath sit;
            sit.start_tick = tick_;
            sit.cells = {r.cell};
            path = sit;
        }
        table.reserve_path(*path, r.id, true);
        phase1[i] = std::move(*path);
    }

    // Phase 2: bounded conflict-based refinement of the same instance.
    bool used_cbs = false;
    if (config_.cbs_budget > 0 && planners.size() >= 2) {
        ReservationTable static_table(tick_, plan_horizon(sector_id));
        static_table.bind(map_);
        for (const auto& region : closures_)
            for (Coord c : region.cells)
                static_table.close_cell(c, region.owner);
        for (const auto& auth : authorities_)
            if (auth.holder)
                static_table.close_cell(auth.cell, *auth.holder);
        for (const auto& r : robots_) {
            if (r.sector != sector_id)
                continue;
            if (r.comm_failed || r.frozen_by > 0 || r.mode == RobotMode::Idle)
                static_table.close_cell(r.cell, r.id);
        }
        std::vector<CbsAgent> agents;
        for (RobotId id : planners)
            agents.push_back({id, robots_[id].cell, current_goal(robots_[id])});
        auto result = cbs_plan(road, map_, agents, tick_, static_table,
                               config_.cbs_budget);
        if (result) {
            used_cbs = true;
            ++stats_.cbs_solved;
            for (size_t i = 0; i < planners.size(); ++i) {
                RobotState& r = robots_[planners[i]];
                actions[r.id] = first_step_action(result->paths[i]);
                r.last_plan = result->paths[i];
            }
        } else {
            ++stats_.cbs_fallbacks;
        }
    }

    if (!used_cbs) {
        for (size_t i = 0; i < planners.size(); ++i) {
            RobotState& r = robots_[planners[i]];
            actions[r.id] = first_step_action(phase1[i]);
            r.last_plan = phase1[i];
        }
    }
    return actions;
}

void Simulation::plan_all_sectors()
{
    pending_actions_.clear();
    std::vector<char> sector_has_robots(index_.sectors.size(), 0);
    for (const auto& r : robots_)
        sector_has_robots[r.sector] = 1;
    for (size_t s = 0; s < index_.sectors.size(); ++s) {
        if (!sector_has_robots[s])
            continue;
        auto actions = plan_sector_step(static_cast<int32_t>(s));
        pending_actions_.insert(actions.begin(), actions.end());
    }
}

// ---------------------------------------------------------------------------
// Entryway reservation
// ---------------------------------------------------------------------------

Simulation::EntryDecision Simulation::request_entry(RobotId robot,
                                                    int32_t from_sector,
                                                    int32_t to_sector)
{
    RobotState& r = robots_[robot];
    auto exit = exit_cell_towards(from_sector, to_sector);
    auto entry = entry_cell_towards(from_sector, to_sector);
    if (!exit || !entry || r.cell != *exit)
        throw std::logic_error("request_entry: robot " + std::to_string(robot) +
                               " is not at the exitway toward sector " +
                               std::to_string(to_sector));
    EntrywayAuthority* auth = authority_at(*entry);
    if (!auth)
        throw std::logic_error("no authority at " + to_string(*entry));
    if (auth->holder == robot)
        return EntryDecision::Granted;

    bool occupied = false;
    for (const auto& other : robots_)
        if (other.cell == *entry)
            occupied = true;

    if (!auth->holder && !occupied && !cell_closed_for(*entry, robot) &&
        (auth->queue.empty() || auth->queue.front() == robot)) {
        if (!auth->queue.empty())
            auth->queue.pop_front();
        auth->holder = robot;
        auth->holder_crossed = false;
        ++stats_.entry_grants;
        return EntryDecision::Granted;
    }
    if (std::find(auth->queue.begin(), auth->queue.end(), robot) ==
        auth->queue.end())
        auth->queue.push_back(robot);
    return EntryDecision::Queued;
}

void Simulation::release_entry(RobotId robot, Coord entry_cell)
{
    EntrywayAuthority* auth = authority_at(entry_cell);
    if (!auth || auth->holder != robot)
        throw std::logic_error("release_entry: robot " + std::to_string(robot) +
                               " does not hold " + to_string(entry_cell));
    auth->holder.reset();
    auth->holder_crossed = false;
}

void Simulation::resolve_entries()
{
    // Authorities freed in earlier ticks admit their queue head first.
    for (auto& auth : authorities_) {
        if (auth.holder || auth.queue.empty())
            continue;
        RobotId head = auth.queue.front();
        bool occupied = false;
        for (const auto& other : robots_)
            if (other.cell == auth.cell)
                occupied = true;
        if (!occupied && !cell_closed_for(auth.cell, head)) {
            auth.queue.pop_front();
            auth.holder = head;
            auth.holder_crossed = false;
            ++stats_.entry_grants;
        }
    }

    for (auto& r : robots_) {
        if (r.comm_failed || r.stopped() || r.delayed)
            continue;
        if (r.route.size() < 2)
            continue;
        auto exit = exit_cell_towards(r.route[0], r.route[1]);
        if (!exit || r.cell != *exit)
            continue;
        auto entry = entry_cell_towards(r.route[0], r.route[1]);
        EntrywayAuthority* auth = authority_at(*entry);
        bool granted = auth && auth->holder == r.id;
        if (!granted)
            granted = request_entry(r.id, r.route[0], r.route[1]) ==
                      EntryDecision::Granted;
        if (granted) {
            bool occupied = false;
            for (const auto& other : robots_)
                if (other.cell == *entry)
                    occupied = true;
            if (!occupied)
                pending_actions_[r.id] = {ActionType::MoveTo, *entry};
        }
    }
}

// ---------------------------------------------------------------------------
// Action application
// ---------------------------------------------------------------------------

void Simulation::apply_actions()
{
    const size_t n = robots_.size();
    std::vector<Coord> proposal(n);
    std::vector<char> fail_move(n, 0); // autonomous failed-plan move this tick

    for (size_t i = 0; i < n; ++i) {
        RobotState& r = robots_[i];
        proposal[i] = r.cell;
        if (r.comm_failed) {
            if (!r.halted && r.fail_entries_left > 0 &&
                r.fail_cursor < r.last_plan.cells.size()) {
                Coord next = r.last_plan.cells[r.fail_cursor];
                if (next == r.cell) {
                    // Scheduled wait entry: consume it in place.
                    ++r.fail_cursor;
                    --r.fail_entries_left;
                    if (r.fail_entries_left == 0 ||
                        r.fail_cursor >= r.last_plan.cells.size())
                        r.halted = true;
                } else if (!cell_closed_for(next, r.id)) {
                    proposal[i] = next;
                    fail_move[i] = 1;
                } else {
                    r.halted = true; // sensor stop at a foreign closed area
                }
            }
            continue;
        }
        if (r.stopped() || r.delayed)
            continue;
        auto it = pending_actions_.find(r.id);
        if (it != pending_actions_.end() && it->second.type == ActionType::MoveTo)
            proposal[i] = it->second.target;
    }

    // Demotion fixpoint: a move is cancelled when its target is claimed by a
    // higher-priority mover, occupied by a robot that stays, would swap, or
    // would enter a foreign closure.
    auto better = [&](size_t a, size_t b) {
        if (robots_[a].priority_tick != robots_[b].priority_tick)
            return robots_[a].priority_tick < robots_[b].priority_tick;
        return robots_[a].id < robots_[b].id;
    };
    std::unordered_map<int, int> occupant; // current cell -> robot
    for (size_t i = 0; i < n; ++i)
        occupant[map_.idx(robots_[i].cell)] = static_cast<int>(i);

    bool changed = true;
    while (changed) {
        changed = false;
        std::unordered_map<int, size_t> claims;
        for (size_t i = 0; i < n; ++i) {
            if (proposal[i] == robots_[i].cell)
                continue;
            // Closure guard.
            if (cell_closed_for(proposal[i], robots_[i].id)) {
                proposal[i] = robots_[i].cell;
                fail_move[i] = 0;
                changed = true;
                continue;
            }
            int tgt = map_.idx(proposal[i]);
            auto [it, inserted] = claims.try_emplace(tgt, i);
            if (!inserted) {
                size_t loser = better(it->second, i) ? i : it->second;
                size_t winner = loser == i ? it->second : i;
                proposal[loser] = robots_[loser].cell;
                fail_move[loser] = 0;
                it->second = winner;
                changed = true;
            }
        }
        for (size_t i = 0; i < n; ++i) {
            if (proposal[i] == robots_[i].cell)
                continue;
            auto occ = occupant.find(map_.idx(proposal[i]));
            if (occ == occupant.end())
                continue;
            size_t j = static_cast<size_t>(occ->second);
            bool j_stays = proposal[j] == robots_[j].cell;
            bool swap = proposal[j] == robots_[i].cell;
            if (j_stays || swap) {
                proposal[i] = robots_[i].cell;
                fail_move[i] = 0;
                changed = true;
            }
        }
    }

    // Execute.
    std::vector<Coord> prev(n);
    for (size_t i = 0; i < n; ++i) {
        RobotState& r = robots_[i];
        prev[i] = r.cell;
        if (proposal[i] == r.cell)
            continue;
        r.cell = proposal[i];
        int32_t new_sector = map_.sector_of(r.cell);
        if (new_sector != r.sector) {
            // Boundary crossing: advance the route and replan next tick.
            r.sector = new_sector;
            if (r.route.size() >= 2 && r.route[1] == new_sector)
                r.route.erase(r.route.begin());
            r.route_dirty = true;
        }
        if (fail_move[i]) {
            ++r.fail_cursor;
            --r.fail_entries_left;
            ++r.fail_moves_done;
            stats_.max_post_failure_displacement =
                std::max(stats_.max_post_failure_displacement, r.fail_moves_done);
            if (r.fail_moves_done > config_.k_steps)
                throw SimulationError("robot " + std::to_string(r.id) +
                                      " exceeded the K-step bound");
            if (r.fail_entries_left == 0 ||
                r.fail_cursor >= r.last_plan.cells.size() || at_own_exitway(r))
                r.halted = true;
        }
    }

    // Safety oracle: distinct cells, no swaps, no closure entries.
    std::unordered_map<int, int> occupied_now;
    for (size_t i = 0; i < n; ++i) {
        auto [it, inserted] = occupied_now.try_emplace(map_.idx(robots_[i].cell),
                                                       static_cast<int>(i));
        if (!inserted) {
            std::ostringstream dump;
            dump << "vertex conflict at tick " << tick_ << ": robots "
                 << it->second << " and " << i << " share "
                 << to_string(robots_[i].cell) << "\n";
            dump_state(dump);
            throw SimulationError(dump.str());
        }
    }
    for (size_t i = 0; i < n; ++i) {
        if (robots_[i].cell == prev[i])
            continue;
        auto it = occupied_now.find(map_.idx(prev[i]));
        if (it == occupied_now.end())
            continue;
        size_t j = static_cast<size_t>(it->second);
        if (j != i && prev[j] == robots_[i].cell && robots_[j].cell == prev[i]) {
            std::ostringstream dump;
            dump << "edge conflict at tick " << tick_ << ": robots " << i
                 << " and " << j << " swapped " << to_string(prev[i]) << " <-> "
                 << to_string(prev[j]) << "\n";
            dump_state(dump);
            throw SimulationError(dump.str());
        }
    }
    for (size_t i = 0; i < n; ++i) {
        if (robots_[i].cell != prev[i] &&
            cell_closed_for(robots_[i].cell, robots_[i].id))
            throw SimulationError("robot " + std::to_string(i) +
                                  " entered a closed region at tick " +
                                  std::to_string(tick_));
    }

    // Robots newly inside regions stay frozen; ones that moved out thaw.
    rebuild_frozen_counts();

    // Entry occupancy bookkeeping and releases.
    for (auto& auth : authorities_) {
        if (!auth.holder)
            continue;
        const RobotState& holder = robots_[*auth.holder];
        if (holder.cell == auth.cell)
            auth.holder_crossed = true;
        else if (auth.holder_crossed)
            release_entry(holder.id, auth.cell);
    }
}

void Simulation::record_lifecycle_events()
{
    for (auto& r : robots_) {
        if (r.comm_failed)
            continue;
        if (r.mode == RobotMode::ToPickup && r.task &&
            r.cell == queues_.task(*r.task).pickup) {
            queues_.mark_picked_up(*r.task, tick_);
            r.mode = RobotMode::Carrying;
            r.leg_goal = queues_.task(*r.task).working;
            r.route_dirty = true;
        } else if (r.mode == RobotMode::Carrying && r.task &&
                   r.cell == queues_.task(*r.task).working) {
            queues_.mark_done(*r.task, tick_);
            last_finish_tick_ = tick_;
            r.task.reset();
            r.mode = RobotMode::ToStation;
            r.leg_goal = r.cell;
            r.route = {r.sector};
            r.just_finished = true;
        } else if (r.mode == RobotMode::ToStation && !r.just_finished &&
                   r.cell == r.home_station) {
            r.mode = RobotMode::Idle;
            r.priority_tick = kIdlePriority;
            station_reserved_[map_.idx(r.cell)] = 0;
        }
    }
}

void Simulation::accumulate_metrics(double cal_seconds)
{
    ++ticks_run_;
    cal_time_accum_ += cal_seconds;
    int delayed = 0, lost = 0;
    for (const auto& r : robots_) {
        if (r.delayed)
            ++delayed;
        if (r.comm_failed)
            ++lost;
    }
    delayed_accum_ += delayed;
    lost_accum_ += lost;
    if (!traffic_.heat.empty()) {
        double mx = 0.0, sum = 0.0;
        for (double h : traffic_.heat) {
            mx = std::max(mx, h);
            sum += h;
        }
        max_max_heat_ = std::max(max_max_heat_, mx);
        max_heat_accum_ += mx;
        ave_heat_accum_ += sum / static_cast<double>(traffic_.heat.size());
    }
}

void Simulation::write_trace_rows()
{
    if (!trace_)
        return;
    char buf[160];
    for (const auto& r : robots_) {
        const char* mode = r.stopped() ? robot_mode_name(RobotMode::Stopped)
                                       : robot_mode_name(r.mode);
        std::snprintf(buf, sizeof(buf), "%lld,%d,%d,%d,%s,%d,%s\n",
                      static_cast<long long>(tick_), r.id, r.cell.x, r.cell.y,
                      mode, r.sector, trace_flag(r));
        *trace_ << buf;
    }
}

void Simulation::step()
{
    ++tick_;
    sample_faults();

    auto t0 = std::chrono::steady_clock::now();
    refresh_traffic();
    run_task_planning();
    plan_all_sectors();
    resolve_entries();
    double cal_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    apply_actions();
    record_lifecycle_events();
    accumulate_metrics(cal_seconds);
    write_trace_rows();
    if (heat_)
        write_heat_csv_rows(*heat_, traffic_);

    for (auto& r : robots_)
        r.delayed = false;
}

RunResult Simulation::run(const RunSinks& sinks)
{
    trace_ = sinks.trace;
    heat_ = sinks.heat;
    if (trace_)
        *trace_ << "tick,robot_id,x,y,mode,sector,flags\n";
    if (heat_)
        *heat_ << "tick,sector_id,heat,abnormal\n";

    while (!finished() && tick_ < tick_cap_) {
        step();
        if (sinks.on_tick)
            sinks.on_tick(*this);
    }

    RunResult result;
    result.complete = finished();
    result.pending_tasks = static_cast<int>(queues_.unfinished_count()) +
                           static_cast<int>(task_specs_.size() - next_task_spec_);
    result.stats = stats_;

    MetricsReport& m = result.metrics;
    m.makespan = last_finish_tick_;
    if (ticks_run_ > 0) {
        m.ave_cal_time = cal_time_accum_ / static_cast<double>(ticks_run_);
        m.ave_delay = static_cast<double>(delayed_accum_) /
                      static_cast<double>(ticks_run_);
        m.ave_lost = static_cast<double>(lost_accum_) /
                     static_cast<double>(ticks_run_);
        m.ave_max_heat = max_heat_accum_ / static_cast<double>(ticks_run_);
        m.ave_ave_heat = ave_heat_accum_ / static_cast<double>(ticks_run_);
        m.max_max_heat = max_max_heat_;
    }
    int64_t done = 0;
    int64_t wait_sum = 0, finish_sum = 0;
    for (const Task& t : queues_.all_tasks()) {
        if (t.status != TaskStatus::Done)
            continue;
        ++done;
        wait_sum += t.pickup_tick - t.publish_tick;
        finish_sum += t.finish_tick - t.publish_tick;
    }
    if (done > 0) {
        m.ave_task_waiting_time =
            static_cast<double>(wait_sum) / static_cast<double>(done);
        m.ave_task_finish_time =
            static_cast<double>(finish_sum) / static_cast<double>(done);
    }

    if (sinks.task_report) {
        *sinks.task_report << "id,T_O,T_A,T_B,T_F,robot_id\n";
        for (const Task& t : queues_.all_tasks()) {
            *sinks.task_report << t.id << ',' << t.publish_tick << ','
                               << t.assign_tick << ',' << t.pickup_tick << ','
                               << t.finish_tick << ',' << t.assigned_robot
                               << "\n";
        }
    }

    trace_ = nullptr;
    heat_ = nullptr;
    return result;
}

void Simulation::dump_state(std::ostream& out) const
{
    out << "tick " << tick_ << "\n";
    for (const auto& r : robots_) {
        out << "robot " << r.id << " cell " << to_string(r.cell) << " sector "
            << r.sector << " mode " << robot_mode_name(r.mode) << " flags "
            << trace_flag(r) << "\n";
    }
    for (const auto& region : closures_) {
        out << "closure owner " << region.owner << " cells";
        for (Coord c : region.cells)
            out << " " << to_string(c);
        out << "\n";
    }
}

} // namespace waresim
