#pragma once

#include "waresim/grid.hpp"
#include "waresim/sectors.hpp"
#include "waresim/tasks.hpp"

#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace waresim {

// Path in space-time: cell i is occupied at tick start_tick + i. Consecutive
// cells are either identical (wait) or road-graph adjacent (move).
struct TimedPath {
    Tick start_tick = 0;
    std::vector<Coord> cells;

    bool empty() const { return cells.empty(); }
    Tick arrival_tick() const
    {
        return start_tick + static_cast<Tick>(cells.size()) - 1;
    }
    int cost() const { return static_cast<int>(cells.size()) - 1; }
    // Occupied cell at an absolute tick, extending by goal-sitting.
    Coord at(Tick tick) const
    {
        if (tick <= start_tick)
            return cells.front();
        size_t i = static_cast<size_t>(tick - start_tick);
        return i < cells.size() ? cells[i] : cells.back();
    }
};

// Space-time claims for one planning round. Ticks are stored relative to
// the round's base tick; closed cells block every tick.
class ReservationTable {
public:
    ReservationTable(Tick base_tick, int horizon)
        : base_(base_tick), horizon_(horizon)
    {
    }

    Tick base_tick() const { return base_; }
    int horizon() const { return horizon_; }

    void reserve_vertex(Coord cell, Tick tick, RobotId robot);
    void reserve_edge(Coord from, Coord to, Tick tick, RobotId robot);
    void close_cell(Coord cell, RobotId owner);

    // Reserves every vertex and edge of the path; when sit_at_goal is set
    // the final cell is additionally reserved through the horizon.
    void reserve_path(const TimedPath& path, RobotId robot, bool sit_at_goal);

    bool vertex_blocked(Coord cell, Tick tick, RobotId robot) const;
    bool move_blocked(Coord from, Coord to, Tick depart_tick, RobotId robot) const;
    bool cell_closed(Coord cell, RobotId robot) const;
    // Latest relative tick at which another robot holds the cell (-1 none).
    int latest_other_claim(Coord cell, RobotId robot) const;

    bool double_booked() const { return double_booked_; }

private:
    int64_t vkey(int cell, int dt) const
    {
        return (static_cast<int64_t>(cell) << 20) | dt;
    }
    int64_t ekey(int from, int to, int dt) const
    {
        return (static_cast<int64_t>(from) << 42) |
               (static_cast<int64_t>(to) << 20) | dt;
    }

    Tick base_;
    int horizon_;
    bool double_booked_ = false;
    std::unordered_map<int64_t, RobotId> vertices_;
    std::unordered_map<int64_t, RobotId> edges_;
    std::unordered_map<int, RobotId> closed_;
    std::unordered_map<int, int> latest_claim_;
    const WarehouseMap* map_ = nullptr;

public:
    void bind(const WarehouseMap& map) { map_ = &map; }
};

// Per-robot constraints used by the conflict-based refinement.
struct ConstraintSet {
    std::unordered_set<int64_t> vertex; // (cell idx << 20) | relative tick
    std::unordered_set<int64_t> edge;   // (from << 42) | (to << 20) | rel tick

    void forbid_vertex(const WarehouseMap& map, Coord cell, int dt)
    {
        vertex.insert((static_cast<int64_t>(map.idx(cell)) << 20) | dt);
    }
    void forbid_edge(const WarehouseMap& map, Coord from, Coord to, int dt)
    {
        edge.insert((static_cast<int64_t>(map.idx(from)) << 42) |
                    (static_cast<int64_t>(map.idx(to)) << 20) | dt);
    }
    bool vertex_forbidden(const WarehouseMap& map, Coord cell, int dt) const
    {
        return vertex.count((static_cast<int64_t>(map.idx(cell)) << 20) | dt) != 0;
    }
    bool edge_forbidden(const WarehouseMap& map, Coord from, Coord to, int dt) const
    {
        return edge.count((static_cast<int64_t>(map.idx(from)) << 42) |
                          (static_cast<int64_t>(map.idx(to)) << 20) | dt) != 0;
    }
    int latest_vertex_on(const WarehouseMap& map, Coord cell) const;
};

struct PlanQuery {
    Coord start;
    Coord goal;
    Tick start_tick = 0;
    RobotId robot = kNoRobot;
    bool sit_at_goal = true;
    const ConstraintSet* constraints = nullptr;
};

// Minimum-makespan space-time A* over one sector's road graph, avoiding all
// reservations in `table` (vertex: same cell same tick; edge: opposing
// traversals of one edge in the same step). Wait moves are allowed.
// Expansion order is (f, h, cell index, tick). Returns nullopt when no path
// reaches the goal within the table horizon.
std::optional<TimedPath> space_time_astar(const RoadGraph& road,
                                          const WarehouseMap& map,
                                          const PlanQuery& query,
                                          const ReservationTable& table);

} // namespace waresim
