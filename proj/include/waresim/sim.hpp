#pragma once

#include "waresim/cbs.hpp"
#include "waresim/fault.hpp"
#include "waresim/grid.hpp"
#include "waresim/sectors.hpp"
#include "waresim/space_time.hpp"
#include "waresim/task_planner.hpp"
#include "waresim/tasks.hpp"
#include "waresim/traffic.hpp"
#include "waresim/validate.hpp"

#include <deque>
#include <functional>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace waresim {

enum class RobotMode : uint8_t { Idle, ToPickup, Carrying, ToStation, Stopped };

const char* robot_mode_name(RobotMode m);

constexpr Tick kIdlePriority = std::numeric_limits<Tick>::max();

struct RobotState {
    RobotId id = kNoRobot;
    Coord cell;
    int32_t sector = kNoSector;
    RobotMode mode = RobotMode::Idle;
    std::optional<TaskId> task;
    Tick priority_tick = kIdlePriority; // assignment tick of current mission
    Coord home_station;                 // return target while ToStation

    bool delayed = false;     // motion delay sampled this tick
    bool comm_failed = false;
    bool halted = false;      // failed robot done with autonomous motion
    int frozen_by = 0;        // number of active closure regions covering it

    TimedPath last_plan;      // plan issued in the previous tick
    size_t fail_cursor = 0;   // next entry of the frozen plan
    int fail_entries_left = 0;
    int fail_moves_done = 0;

    std::vector<int32_t> route; // remaining sector route; front = current sector
    Coord leg_goal;
    bool route_dirty = false;
    bool just_finished = false; // finished dropoff this tick

    bool stopped() const { return halted || frozen_by > 0; }
    bool idle_without_task() const
    {
        return mode == RobotMode::Idle && !task.has_value();
    }
};

struct EntrywayAuthority {
    Coord cell;                    // the contested entry cell
    int32_t into_sector = kNoSector;
    std::optional<RobotId> holder;
    bool holder_crossed = false;   // holder has occupied the cell
    std::deque<RobotId> queue;
};

struct ClosureRegion {
    RobotId owner = kNoRobot;
    std::vector<Coord> cells;
};

enum class ActionType : uint8_t { MoveTo, Wait, Stop };

struct RobotAction {
    ActionType type = ActionType::Wait;
    Coord target;
};

struct TaskSpec {
    Tick publish_tick = 1;
    Coord pickup;
    Coord working;
    std::optional<int64_t> priority;
};

struct ScenarioConfig {
    int robot_count = 0;
    int k_steps = 3;
    WeightParams weights;
    FaultParams faults;
    Tick tick_cap = 0;  // 0 = 50 * (tasks + robots)
    int cbs_budget = 0; // 0 = prioritized planning only
};

struct MetricsReport {
    Tick makespan = 0;
    double ave_cal_time = 0.0; // seconds per tick, steps 3-6
    double ave_delay = 0.0;
    double ave_lost = 0.0;
    double ave_task_waiting_time = 0.0; // mean(T_B - T_O)
    double ave_task_finish_time = 0.0;  // mean(T_F - T_O)
    double max_max_heat = 0.0;
    double ave_max_heat = 0.0;
    double ave_ave_heat = 0.0;

    static const std::vector<std::string>& csv_columns();
    std::string csv_row() const;
};

struct RunStats {
    int max_post_failure_displacement = 0;
    int64_t comm_failures = 0;
    int64_t recoveries = 0;
    int64_t entry_grants = 0;
    int64_t cbs_solved = 0;
    int64_t cbs_fallbacks = 0;
};

struct RunResult {
    MetricsReport metrics;
    RunStats stats;
    bool complete = false;
    int pending_tasks = 0;
};

struct RunSinks {
    std::ostream* trace = nullptr;
    std::ostream* heat = nullptr;
    std::ostream* task_report = nullptr;
    std::function<void(const class Simulation&)> on_tick;
};

// Raised when a world invariant breaks mid-run; carries a diagnostic dump.
class SimulationError : public std::runtime_error {
public:
    explicit SimulationError(const std::string& what) : std::runtime_error(what) {}
};

class Simulation {
public:
    Simulation(const WarehouseMap& map, const SectorIndex& index,
               std::vector<TaskSpec> tasks, const ScenarioConfig& config);

    // One full tick of the orchestration pipeline.
    void step();

    RunResult run(const RunSinks& sinks = {});

    bool finished() const;
    Tick tick() const { return tick_; }
    Tick tick_cap() const { return tick_cap_; }

    const std::vector<RobotState>& robots() const { return robots_; }
    RobotState& robot(RobotId id) { return robots_[id]; }
    const TaskQueues& queues() const { return queues_; }
    const TrafficState& traffic() const { return traffic_; }
    const std::vector<ClosureRegion>& closures() const { return closures_; }
    const std::vector<EntrywayAuthority>& authorities() const
    {
        return authorities_;
    }
    const RunStats& stats() const { return stats_; }
    const WarehouseMap& map() const { return map_; }
    const SectorIndex& index() const { return index_; }

    // Decentralized per-sector planning: plans every plannable robot of the
    // sector against an accumulating reservation table (prioritized phase;
    // optional conflict-based refinement) and returns one action per robot.
    std::map<RobotId, RobotAction> plan_sector_step(int32_t sector_id);

    enum class EntryDecision { Granted, Queued };
    EntryDecision request_entry(RobotId robot, int32_t from_sector,
                                int32_t to_sector);
    void release_entry(RobotId robot, Coord entry_cell);

    ClosureRegion handle_comm_failure(RobotId robot);
    void handle_recovery(RobotId robot);

    // Test hooks.
    void force_comm_failure(RobotId robot);
    void force_recovery(RobotId robot);
    bool cell_closed_for(Coord cell, RobotId robot) const;

private:
    struct SectorPlanContext {
        ReservationTable table;
        std::vector<RobotId> planned;
    };

    void sample_faults();
    void apply_fault_events(const std::vector<RobotId>& newly_failed,
                            const std::vector<RobotId>& recovered);
    void refresh_traffic();
    void run_task_planning();
    void plan_all_sectors();
    void resolve_entries();
    void apply_actions();
    void record_lifecycle_events();
    void accumulate_metrics(double cal_seconds);
    void write_trace_rows();

    std::vector<FreeRobot> free_pool() const;
    void assign_task(RobotId robot, TaskId task);
    void start_return_leg(RobotId robot);
    void recompute_route(RobotId robot);
    Coord current_goal(const RobotState& r) const;
    std::optional<Coord> exit_cell_towards(int32_t from, int32_t to) const;
    std::optional<Coord> entry_cell_towards(int32_t from, int32_t to) const;
    bool at_own_exitway(const RobotState& r) const;
    EntrywayAuthority* authority_at(Coord cell);
    const EntrywayAuthority* authority_at(Coord cell) const;
    void rebuild_frozen_counts();
    int plan_horizon(int32_t sector_id) const;
    std::vector<Coord> free_return_stations() const;
    void dump_state(std::ostream& out) const;

    const WarehouseMap& map_;
    const SectorIndex& index_;
    ScenarioConfig config_;
    std::vector<TaskSpec> task_specs_; // sorted by (publish_tick, file order)
    size_t next_task_spec_ = 0;

    Tick tick_ = 0;
    Tick tick_cap_ = 0;
    std::vector<RobotState> robots_;
    TaskQueues queues_;
    TrafficState traffic_;
    FaultInjector injector_;
    std::vector<EntrywayAuthority> authorities_;
    std::map<Coord, int> authority_index_;
    std::vector<ClosureRegion> closures_;
    std::vector<char> station_reserved_; // by cell index
    std::map<RobotId, RobotAction> pending_actions_;

    RunStats stats_;
    // metric accumulators
    int64_t ticks_run_ = 0;
    int64_t delayed_accum_ = 0;
    int64_t lost_accum_ = 0;
    double cal_time_accum_ = 0.0;
    double max_heat_accum_ = 0.0;
    double ave_heat_accum_ = 0.0;
    double max_max_heat_ = 0.0;
    Tick last_finish_tick_ = 0;

    std::ostream* trace_ = nullptr;
    std::ostream* heat_ = nullptr;
};

// Trace flag column value for a robot, one of ok/delayed/comm_failed/stopped.
const char* trace_flag(const RobotState& r);

} // namespace waresim
