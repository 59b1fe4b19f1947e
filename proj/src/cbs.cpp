#include "waresim/cbs.hpp"

#include <algorithm>
#include <memory>
#include <queue>

namespace waresim {

std::vector<Conflict> detect_conflicts(const std::vector<TimedPath>& paths)
{
    std::vector<Conflict> conflicts;
    if (paths.size() < 2)
        return conflicts;

    Tick first = paths[0].start_tick;
    Tick last = paths[0].arrival_tick();
    for (const auto& p : paths) {
        first = std::min(first, p.start_tick);
        last = std::max(last, p.arrival_tick());
    }

    for (size_t a = 0; a < paths.size(); ++a) {
        for (size_t b = a + 1; b < paths.size(); ++b) {
            for (Tick t = first; t <= last; ++t) {
                Coord pa = paths[a].at(t);
                Coord pb = paths[b].at(t);
                if (pa == pb)
                    conflicts.push_back({ConflictKind::Vertex, t,
                                         static_cast<int>(a), static_cast<int>(b),
                                         pa, pa});
                if (t < last) {
                    Coord na = paths[a].at(t + 1);
                    Coord nb = paths[b].at(t + 1);
                    if (pa != na && na == pb && nb == pa)
                        conflicts.push_back({ConflictKind::Edge, t,
                                             static_cast<int>(a),
                                             static_cast<int>(b), pa, na});
                }
            }
        }
    }
    std::sort(conflicts.begin(), conflicts.end(),
              [](const Conflict& x, const Conflict& y) {
                  if (x.tick != y.tick)
                      return x.tick < y.tick;
                  if (x.kind != y.kind)
                      return x.kind < y.kind;
                  if (x.robot_a != y.robot_a)
                      return x.robot_a < y.robot_a;
                  return x.robot_b < y.robot_b;
              });
    return conflicts;
}

namespace {

struct CtNode {
    std::vector<ConstraintSet> constraints;
    std::vector<TimedPath> paths;
    int sum_of_costs = 0;
    int conflict_count = 0;
    int64_t seq = 0;
};

struct CtOrder {
    bool operator()(const std::shared_ptr<CtNode>& a,
                    const std::shared_ptr<CtNode>& b) const
    {
        if (a->sum_of_costs != b->sum_of_costs)
            return a->sum_of_costs > b->sum_of_costs;
        if (a->conflict_count != b->conflict_count)
            return a->conflict_count > b->conflict_count;
        return a->seq > b->seq;
    }
};

} // namespace

std::optional<CbsResult> cbs_plan(const RoadGraph& road, const WarehouseMap& map,
                                  const std::vector<CbsAgent>& agents,
                                  Tick start_tick, const ReservationTable& table,
                                  int node_budget)
{
    if (agents.empty())
        return CbsResult{};

    auto plan_agent = [&](const CbsAgent& agent,
                          const ConstraintSet& cs) -> std::optional<TimedPath> {
        PlanQuery query;
        query.start = agent.start;
        query.goal = agent.goal;
        query.start_tick = start_tick;
        query.robot = agent.robot;
        query.sit_at_goal = true;
        query.constraints = &cs;
        return space_time_astar(road, map, query, table);
    };

    auto root = std::make_shared<CtNode>();
    root->constraints.resize(agents.size());
    root->paths.resize(agents.size());
    for (size_t i = 0; i < agents.size(); ++i) {
        auto path = plan_agent(agents[i], root->constraints[i]);
        if (!path)
            return std::nullopt;
        root->sum_of_costs += path->cost();
        root->paths[i] = std::move(*path);
    }
    root->conflict_count = static_cast<int>(detect_conflicts(root->paths).size());

    std::priority_queue<std::shared_ptr<CtNode>,
                        std::vector<std::shared_ptr<CtNode>>, CtOrder>
        open;
    open.push(root);
    int expanded = 0;
    int64_t seq = 0;

    while (!open.empty()) {
        auto node = open.top();
        open.pop();
        auto conflicts = detect_conflicts(node->paths);
        if (conflicts.empty()) {
            CbsResult result;
            result.paths = node->paths;
            result.sum_of_costs = node->sum_of_costs;
            result.nodes_expanded = expanded;
            return result;
        }
        if (++expanded > node_budget)
            return std::nullopt;

        const Conflict& c = conflicts.front();
        for (int side = 0; side < 2; ++side) {
            int agent = side == 0 ? c.robot_a : c.robot_b;
            auto child = std::make_shared<CtNode>(*node);
            child->seq = ++seq;
            int dt = static_cast<int>(c.tick - start_tick);
            if (c.kind == ConflictKind::Vertex) {
                child->constraints[agent].forbid_vertex(map, c.cell_a, dt);
            } else if (side == 0) {
                child->constraints[agent].forbid_edge(map, c.cell_a, c.cell_b, dt);
            } else {
                child->constraints[agent].forbid_edge(map, c.cell_b, c.cell_a, dt);
            }
            auto path = plan_agent(agents[agent], child->constraints[agent]);
            if (!path)
                continue;
            child->sum_of_costs += path->cost() - child->paths[agent].cost();
            child->paths[agent] = std::move(*path);
            child->conflict_count =
                static_cast<int>(detect_conflicts(child->paths).size());
            open.push(child);
        }
    }
    return std::nullopt;
}

} // namespace waresim
