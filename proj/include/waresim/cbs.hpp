#pragma once

#include "waresim/space_time.hpp"

#include <optional>
#include <vector>

namespace waresim {

enum class ConflictKind : uint8_t { Vertex, Edge };

struct Conflict {
    ConflictKind kind = ConflictKind::Vertex;
    Tick tick = 0;   // vertex: occupation tick; edge: departure tick
    int robot_a = 0; // indices into the path list
    int robot_b = 0;
    Coord cell_a;    // vertex: the shared cell; edge: robot_a's source cell
    Coord cell_b;    // edge: robot_a's destination cell
};

// All vertex and edge conflicts between the given paths, earliest tick
// first. Shorter paths are extended by sitting at their final cell.
std::vector<Conflict> detect_conflicts(const std::vector<TimedPath>& paths);

struct CbsAgent {
    RobotId robot = kNoRobot;
    Coord start;
    Coord goal;
};

struct CbsResult {
    std::vector<TimedPath> paths; // one per agent, conflict-free
    int sum_of_costs = 0;
    int nodes_expanded = 0;
};

// Conflict-based search over one sector's road graph. Static reservations in
// `table` (closed cells, entry holds) constrain every agent. Best-first on
// sum of path costs, branching on the earliest conflict; gives the optimal
// sum of costs when it returns before exhausting `node_budget`, otherwise
// nullopt (callers fall back to the prioritized plan).
std::optional<CbsResult> cbs_plan(const RoadGraph& road, const WarehouseMap& map,
                                  const std::vector<CbsAgent>& agents,
                                  Tick start_tick, const ReservationTable& table,
                                  int node_budget);

} // namespace waresim
