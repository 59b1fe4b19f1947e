#include "waresim/space_time.hpp"

#include <algorithm>
#include <deque>
#include <queue>

namespace waresim {

void ReservationTable::reserve_vertex(Coord cell, Tick tick, RobotId robot)
{
    int dt = static_cast<int>(tick - base_);
    if (dt < 0 || dt > horizon_)
        return;
    int idx = map_->idx(cell);
    auto [it, inserted] = vertices_.try_emplace(vkey(idx, dt), robot);
    if (!inserted && it->second != robot)
        double_booked_ = true;
    auto [lit, fresh] = latest_claim_.try_emplace(idx, dt);
    if (!fresh)
        lit->second = std::max(lit->second, dt);
}

void ReservationTable::reserve_edge(Coord from, Coord to, Tick tick, RobotId robot)
{
    int dt = static_cast<int>(tick - base_);
    if (dt < 0 || dt > horizon_)
        return;
    edges_.try_emplace(ekey(map_->idx(from), map_->idx(to), dt), robot);
}

void ReservationTable::close_cell(Coord cell, RobotId owner)
{
    closed_.try_emplace(map_->idx(cell), owner);
}

void ReservationTable::reserve_path(const TimedPath& path, RobotId robot,
                                    bool sit_at_goal)
{
    for (size_t i = 0; i < path.cells.size(); ++i) {
        Tick t = path.start_tick + static_cast<Tick>(i);
        reserve_vertex(path.cells[i], t, robot);
        if (i + 1 < path.cells.size() && path.cells[i] != path.cells[i + 1]) {
            reserve_edge(path.cells[i], path.cells[i + 1], t, robot);
            reserve_vertex(path.cells[i + 1], t + 1, robot);
        }
    }
    if (sit_at_goal && !path.cells.empty()) {
        for (Tick t = path.arrival_tick() + 1; t <= base_ + horizon_; ++t)
            reserve_vertex(path.cells.back(), t, robot);
    }
}

bool ReservationTable::vertex_blocked(Coord cell, Tick tick, RobotId robot) const
{
    int idx = map_->idx(cell);
    auto cit = closed_.find(idx);
    if (cit != closed_.end() && cit->second != robot)
        return true;
    int dt = static_cast<int>(tick - base_);
    if (dt < 0 || dt > horizon_)
        return false;
    auto it = vertices_.find(vkey(idx, dt));
    return it != vertices_.end() && it->second != robot;
}

bool ReservationTable::move_blocked(Coord from, Coord to, Tick depart_tick,
                                    RobotId robot) const
{
    int dt = static_cast<int>(depart_tick - base_);
    if (dt < 0 || dt > horizon_)
        return false;
    // Swap conflict: someone traverses the same edge the opposite way.
    auto it = edges_.find(ekey(map_->idx(to), map_->idx(from), dt));
    return it != edges_.end() && it->second != robot;
}

bool ReservationTable::cell_closed(Coord cell, RobotId robot) const
{
    auto it = closed_.find(map_->idx(cell));
    return it != closed_.end() && it->second != robot;
}

int ReservationTable::latest_other_claim(Coord cell, RobotId robot) const
{
    int idx = map_->idx(cell);
    auto it = latest_claim_.find(idx);
    if (it == latest_claim_.end())
        return -1;
    // The cached maximum may belong to `robot` itself; fall back to a scan
    // only in that case.
    auto vit = vertices_.find(vkey(idx, it->second));
    if (vit != vertices_.end() && vit->second != robot)
        return it->second;
    int latest = -1;
    for (int dt = it->second; dt >= 0; --dt) {
        auto v = vertices_.find(vkey(idx, dt));
        if (v != vertices_.end() && v->second != robot) {
            latest = dt;
            break;
        }
    }
    return latest;
}

int ConstraintSet::latest_vertex_on(const WarehouseMap& map, Coord cell) const
{
    int latest = -1;
    int64_t prefix = static_cast<int64_t>(map.idx(cell)) << 20;
    for (int64_t key : vertex)
        if ((key & ~int64_t(0xFFFFF)) == prefix)
            latest = std::max(latest, static_cast<int>(key & 0xFFFFF));
    return latest;
}

namespace {

struct OpenItem {
    int f;
    int h;
    int cell_idx; // global row-major index, deterministic tie-break
    int dt;
    int local;

    bool operator>(const OpenItem& other) const
    {
        if (f != other.f)
            return f > other.f;
        if (h != other.h)
            return h > other.h;
        if (cell_idx != other.cell_idx)
            return cell_idx > other.cell_idx;
        return dt > other.dt;
    }
};

} // namespace

std::optional<TimedPath> space_time_astar(const RoadGraph& road,
                                          const WarehouseMap& map,
                                          const PlanQuery& query,
                                          const ReservationTable& table)
{
    const int start_local = road.index(query.start);
    const int goal_local = road.index(query.goal);
    if (start_local < 0 || goal_local < 0)
        return std::nullopt;

    const int horizon = table.horizon();
    const int n = static_cast<int>(road.cells.size());

    // Static in-sector distance to goal (reverse directed BFS): admissible
    // and consistent.
    std::vector<int> h(n, -1);
    {
        std::deque<int> queue{goal_local};
        h[goal_local] = 0;
        while (!queue.empty()) {
            int cur = queue.front();
            queue.pop_front();
            for (int pred : road.in[cur]) {
                if (h[pred] < 0) {
                    h[pred] = h[cur] + 1;
                    queue.push_back(pred);
                }
            }
        }
    }
    if (h[start_local] < 0)
        return std::nullopt;

    // The goal must stay free after arrival for sitters.
    int goal_free_after = -1;
    if (query.sit_at_goal) {
        goal_free_after = table.latest_other_claim(query.goal, query.robot);
        if (query.constraints)
            goal_free_after = std::max(
                goal_free_after, query.constraints->latest_vertex_on(map, query.goal));
    }

    std::vector<char> closed(static_cast<size_t>(n) * (horizon + 1), 0);
    std::vector<int32_t> parent(static_cast<size_t>(n) * (horizon + 1), -1);
    auto state_id = [&](int local, int dt) { return local * (horizon + 1) + dt; };

    std::priority_queue<OpenItem, std::vector<OpenItem>, std::greater<>> open;
    open.push({h[start_local], h[start_local], map.idx(query.start), 0, start_local});

    while (!open.empty()) {
        OpenItem item = open.top();
        open.pop();
        if (closed[state_id(item.local, item.dt)])
            continue;
        closed[state_id(item.local, item.dt)] = 1;

        if (item.local == goal_local && item.dt > goal_free_after) {
            TimedPath path;
            path.start_tick = query.start_tick;
            path.cells.resize(item.dt + 1);
            int local = item.local;
            int dt = item.dt;
            while (true) {
                path.cells[dt] = road.cells[local];
                if (dt == 0)
                    break;
                int32_t p = parent[state_id(local, dt)];
                local = p / (horizon + 1);
                dt = p % (horizon + 1);
            }
            return path;
        }

        if (item.dt >= horizon)
            continue;

        Coord from = road.cells[item.local];
        int next_dt = item.dt + 1;
        Tick next_tick = query.start_tick + next_dt;

        auto try_push = [&](int next_local) {
            Coord to = road.cells[next_local];
            if (closed[state_id(next_local, next_dt)])
                return;
            if (table.vertex_blocked(to, next_tick, query.robot))
                return;
            if (query.constraints &&
                query.constraints->vertex_forbidden(map, to, next_dt))
                return;
            if (next_local != item.local) {
                if (table.move_blocked(from, to, next_tick - 1, query.robot))
                    return;
                if (query.constraints &&
                    query.constraints->edge_forbidden(map, from, to, item.dt))
                    return;
            }
            if (parent[state_id(next_local, next_dt)] < 0)
                parent[state_id(next_local, next_dt)] =
                    state_id(item.local, item.dt);
            open.push({next_dt + h[next_local], h[next_local], map.idx(to), next_dt,
                       next_local});
        };

        for (int succ : road.out[item.local])
            try_push(succ);
        try_push(item.local); // wait
    }
    return std::nullopt;
}

} // namespace waresim
