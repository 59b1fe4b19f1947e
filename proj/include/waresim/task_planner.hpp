#pragma once

#include "waresim/grid.hpp"
#include "waresim/sectors.hpp"
#include "waresim/tasks.hpp"
#include "waresim/traffic.hpp"

#include <optional>
#include <vector>

namespace waresim {

struct FreeRobot {
    RobotId id = kNoRobot;
    Coord cell;
};

struct Assignment {
    TaskId task = 0;
    RobotId robot = kNoRobot;
};

// Greedy matching: tasks in priority order, each to the free robot with the
// smallest static road distance to the pickup cell (tie: lower robot id).
// Matched robots leave the pool; unmatched tasks stay queued.
std::vector<Assignment> allocate(const TaskQueues& queues,
                                 const std::vector<FreeRobot>& free_robots,
                                 const WarehouseMap& map);

struct SectorRoute {
    std::vector<int32_t> sectors; // from current to destination, inclusive
    double cost = 0.0;            // accumulated w_ij
};

// Minimum-total-weight route under the given traffic state. Among routes of
// equal cost the lexicographically smallest sector-id sequence is returned.
// Returns nullopt when the destination is unreachable.
std::optional<SectorRoute> plan_sector_route(const SectorGraph& graph,
                                             const TrafficState& traffic,
                                             int32_t from_sector,
                                             int32_t to_sector);

struct MissionPlan {
    SectorRoute to_pickup;
    SectorRoute to_working;
    SectorRoute to_station;
    Coord return_station;
};

// Plans the three legs of a full task mission. The return leg targets the
// candidate robot station with the cheapest weighted route (tie: lowest
// station coordinate); callers replace it when the robot is re-tasked at
// the dropoff instant.
std::optional<MissionPlan>
plan_full_mission(const WarehouseMap& map, const SectorIndex& index,
                  const TrafficState& traffic, Coord robot_cell,
                  const Task& task, const std::vector<Coord>& free_stations);

} // namespace waresim
