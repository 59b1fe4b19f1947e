#include "waresim/task_planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace waresim {

std::vector<Assignment> allocate(const TaskQueues& queues,
                                 const std::vector<FreeRobot>& free_robots,
                                 const WarehouseMap& map)
{
    std::vector<Assignment> out;
    if (free_robots.empty())
        return out;

    std::vector<FreeRobot> pool = free_robots;
    std::sort(pool.begin(), pool.end(),
              [](const FreeRobot& a, const FreeRobot& b) { return a.id < b.id; });

    for (TaskId task_id : queues.queued()) {
        if (pool.empty())
            break;
        const Task& task = queues.task(task_id);
        // One reverse BFS from the pickup gives every robot's distance.
        auto dist = bfs_distances_to(map, task.pickup);
        int best = -1;
        int32_t best_dist = std::numeric_limits<int32_t>::max();
        for (size_t i = 0; i < pool.size(); ++i) {
            int32_t d = dist[map.idx(pool[i].cell)];
            if (d >= 0 && d < best_dist) {
                best_dist = d;
                best = static_cast<int>(i);
            }
        }
        if (best < 0)
            continue; // pickup unreachable from every free robot
        out.push_back({task_id, pool[best].id});
        pool.erase(pool.begin() + best);
    }
    return out;
}

std::optional<SectorRoute> plan_sector_route(const SectorGraph& graph,
                                             const TrafficState& traffic,
                                             int32_t from_sector, int32_t to_sector)
{
    SectorRoute route;
    if (from_sector == to_sector) {
        route.sectors = {from_sector};
        route.cost = 0.0;
        return route;
    }

    // Dijkstra towards the goal over reversed edges, then a forward greedy
    // walk that always picks the smallest next sector id among optimal
    // successors. That yields the lexicographically smallest minimum-cost
    // sector sequence.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist_to_goal(graph.vertex_count, inf);
    using Item = std::pair<double, int32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    dist_to_goal[to_sector] = 0.0;
    open.push({0.0, to_sector});
    while (!open.empty()) {
        auto [d, v] = open.top();
        open.pop();
        if (d > dist_to_goal[v])
            continue;
        for (int ei : graph.in_edges[v]) {
            const SectorEdge& e = graph.edges[ei];
            double nd = d + traffic.weights[ei];
            if (nd < dist_to_goal[e.from]) {
                dist_to_goal[e.from] = nd;
                open.push({nd, e.from});
            }
        }
    }
    if (dist_to_goal[from_sector] == inf)
        return std::nullopt;

    route.cost = dist_to_goal[from_sector];
    int32_t cur = from_sector;
    route.sectors.push_back(cur);
    while (cur != to_sector) {
        int32_t next = -1;
        double next_weight = 0.0;
        for (int ei : graph.out_edges[cur]) {
            const SectorEdge& e = graph.edges[ei];
            if (dist_to_goal[e.to] == inf)
                continue;
            if (traffic.weights[ei] + dist_to_goal[e.to] == dist_to_goal[cur]) {
                if (next < 0 || e.to < next) {
                    next = e.to;
                    next_weight = traffic.weights[ei];
                }
            }
        }
        if (next < 0)
            return std::nullopt; // cannot happen on a consistent Dijkstra result
        (void)next_weight;
        route.sectors.push_back(next);
        cur = next;
    }
    return route;
}

std::optional<MissionPlan>
plan_full_mission(const WarehouseMap& map, const SectorIndex& index,
                  const TrafficState& traffic, Coord robot_cell,
                  const Task& task, const std::vector<Coord>& free_stations)
{
    int32_t robot_sector = map.sector_of(robot_cell);
    int32_t pickup_sector = map.sector_of(task.pickup);
    int32_t working_sector = map.sector_of(task.working);
    if (robot_sector == kNoSector || pickup_sector == kNoSector ||
        working_sector == kNoSector || free_stations.empty())
        return std::nullopt;

    MissionPlan plan;
    auto leg1 = plan_sector_route(index.graph, traffic, robot_sector, pickup_sector);
    auto leg2 = plan_sector_route(index.graph, traffic, pickup_sector, working_sector);
    if (!leg1 || !leg2)
        return std::nullopt;
    plan.to_pickup = *leg1;
    plan.to_working = *leg2;

    bool found = false;
    double best_cost = 0.0;
    for (Coord station : free_stations) {
        int32_t s = map.sector_of(station);
        if (s == kNoSector)
            continue;
        auto leg = plan_sector_route(index.graph, traffic, working_sector, s);
        if (!leg)
            continue;
        if (!found || leg->cost < best_cost ||
            (leg->cost == best_cost && station < plan.return_station)) {
            found = true;
            best_cost = leg->cost;
            plan.to_station = *leg;
            plan.return_station = station;
        }
    }
    if (!found)
        return std::nullopt;
    return plan;
}

} // namespace waresim
