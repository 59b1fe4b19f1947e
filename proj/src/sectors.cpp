#include "waresim/sectors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace waresim {

const SectorEdge* SectorGraph::find_edge(int32_t from, int32_t to) const
{
    for (int ei : out_edges[from])
        if (edges[ei].to == to)
            return &edges[ei];
    return nullptr;
}

bool RoadGraph::has_edge(int from, int to) const
{
    const auto& succ = out[from];
    return std::find(succ.begin(), succ.end(), to) != succ.end();
}

std::map<std::pair<int32_t, int32_t>, std::vector<Crossing>>
scan_crossings(const WarehouseMap& map)
{
    std::map<std::pair<int32_t, int32_t>, std::vector<Crossing>> crossings;
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) {
            Coord a{x, y};
            if (!map.passable(a))
                continue;
            for (int di = 0; di < 4; ++di) {
                Dir d = static_cast<Dir>(di);
                Coord b = map.step(a, d);
                if (!map.in_bounds(b) || !map.edge_allowed(a, d))
                    continue;
                int32_t sa = map.sector_of(a);
                int32_t sb = map.sector_of(b);
                if (sa == sb || sa == kNoSector || sb == kNoSector)
                    continue;
                crossings[{sa, sb}].push_back({sa, sb, a, b});
            }
        }
    }
    return crossings;
}

int sector_capacity(double alpha, int road_cells)
{
    int cap = static_cast<int>(std::ceil(alpha * road_cells));
    return std::max(cap, 1);
}

namespace {

// Road-graph 1-center: the Road cell minimizing the maximum undirected
// in-sector distance to every passable cell of the sector. Lexicographic
// (x, y) tie-break.
Coord compute_center(const WarehouseMap& map, const std::vector<Coord>& cells)
{
    Coord best{};
    long best_ecc = -1;
    bool found = false;
    std::unordered_map<Coord, int> dist;
    for (Coord start : cells) {
        if (map.kind(start) != CellKind::Road)
            continue;
        dist.clear();
        std::deque<Coord> queue;
        dist[start] = 0;
        queue.push_back(start);
        long ecc = 0;
        while (!queue.empty()) {
            Coord c = queue.front();
            queue.pop_front();
            for (int di = 0; di < 4; ++di) {
                Coord n = map.step(c, static_cast<Dir>(di));
                if (!map.in_bounds(n) || !map.passable(n))
                    continue;
                if (map.sector_of(n) != map.sector_of(start) || dist.count(n))
                    continue;
                dist[n] = dist[c] + 1;
                ecc = std::max(ecc, static_cast<long>(dist[n]));
                queue.push_back(n);
            }
        }
        if (dist.size() != cells.size())
            ecc = static_cast<long>(cells.size()) + 1000; // disconnected from some cells
        Coord cand = start;
        if (!found || ecc < best_ecc ||
            (ecc == best_ecc && std::pair(cand.x, cand.y) < std::pair(best.x, best.y))) {
            best = cand;
            best_ecc = ecc;
            found = true;
        }
    }
    if (!found)
        return cells.front(); // sector with no Road cell; degenerate but tolerated
    return best;
}

} // namespace

std::vector<Sector> build_sectors(const WarehouseMap& map)
{
    std::vector<Sector> sectors(map.sector_count());
    for (int s = 0; s < map.sector_count(); ++s)
        sectors[s].id = s;
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) {
            Coord c{x, y};
            int32_t s = map.sector_of(c);
            if (s == kNoSector)
                continue;
            sectors[s].cells.push_back(c);
            if (map.kind(c) == CellKind::Road)
                ++sectors[s].road_cell_count;
        }
    }
    for (auto& sector : sectors) {
        if (sector.cells.empty())
            throw std::runtime_error("sector " + std::to_string(sector.id) +
                                     " has no cells");
        sector.capacity = sector_capacity(map.alpha(), sector.road_cell_count);
        sector.center = compute_center(map, sector.cells);
    }
    auto crossings = scan_crossings(map);
    for (const auto& [pair, list] : crossings) {
        if (list.size() != 1)
            throw std::runtime_error(
                "map not partition-valid: " + std::to_string(list.size()) +
                " crossings from sector " + std::to_string(pair.first) + " to " +
                std::to_string(pair.second));
        sectors[pair.first].exitways.push_back(list.front());
        sectors[pair.second].entryways.push_back(list.front());
    }
    return sectors;
}

RoadGraph build_road_graph(const WarehouseMap& map, int32_t sector_id)
{
    RoadGraph road;
    road.sector_id = sector_id;
    for (int y = 0; y < map.height(); ++y)
        for (int x = 0; x < map.width(); ++x)
            if (map.sector_of({x, y}) == sector_id)
                road.cells.push_back({x, y});
    road.index_of.reserve(road.cells.size());
    for (size_t i = 0; i < road.cells.size(); ++i)
        road.index_of[road.cells[i]] = static_cast<int>(i);
    road.out.resize(road.cells.size());
    road.in.resize(road.cells.size());
    for (size_t i = 0; i < road.cells.size(); ++i) {
        Coord c = road.cells[i];
        for (int di = 0; di < 4; ++di) {
            Dir d = static_cast<Dir>(di);
            Coord n = map.step(c, d);
            if (!map.in_bounds(n) || map.sector_of(n) != sector_id)
                continue;
            if (!map.edge_allowed(c, d))
                continue;
            int j = road.index(n);
            road.out[i].push_back(j);
            road.in[j].push_back(static_cast<int>(i));
        }
    }

    // Adjacent in-sector pairs severed in both directions by mono
    // annotations are tolerated only when the cells stay mutually reachable
    // around the severed edge; otherwise the annotations are inconsistent.
    for (size_t i = 0; i < road.cells.size(); ++i) {
        Coord c = road.cells[i];
        for (int di = 0; di < 2; ++di) { // E and S cover each pair once
            Dir d = static_cast<Dir>(di);
            Coord n = map.step(c, d);
            if (!map.in_bounds(n) || map.sector_of(n) != sector_id)
                continue;
            if (!map.passable(n))
                continue;
            int j = road.index(n);
            if (road.has_edge(static_cast<int>(i), j) ||
                road.has_edge(j, static_cast<int>(i)))
                continue;
            std::vector<char> seen(road.cells.size(), 0);
            std::deque<int> queue{static_cast<int>(i)};
            seen[i] = 1;
            while (!queue.empty()) {
                int cur = queue.front();
                queue.pop_front();
                for (int succ : road.out[cur])
                    if (!seen[succ]) {
                        seen[succ] = 1;
                        queue.push_back(succ);
                    }
            }
            if (!seen[j])
                throw std::runtime_error(
                    "direction annotation conflict in sector " +
                    std::to_string(sector_id) + ": cells " + to_string(c) + " and " +
                    to_string(n) + " are adjacent but disconnected");
        }
    }

    // Undirected in-sector diameter, used to size planning horizons.
    int diameter = 0;
    std::vector<int> dist(road.cells.size());
    for (size_t start = 0; start < road.cells.size(); ++start) {
        std::fill(dist.begin(), dist.end(), -1);
        std::deque<int> queue;
        dist[start] = 0;
        queue.push_back(static_cast<int>(start));
        while (!queue.empty()) {
            int cur = queue.front();
            queue.pop_front();
            diameter = std::max(diameter, dist[cur]);
            Coord c = road.cells[cur];
            for (int di = 0; di < 4; ++di) {
                Coord n = map.step(c, static_cast<Dir>(di));
                if (!map.in_bounds(n) || map.sector_of(n) != sector_id)
                    continue;
                if (!map.passable(n))
                    continue;
                int j = road.index(n);
                if (dist[j] < 0) {
                    dist[j] = dist[cur] + 1;
                    queue.push_back(j);
                }
            }
        }
    }
    road.diameter = diameter;
    return road;
}

SectorGraph build_sector_graph(const WarehouseMap& map,
                               const std::vector<Sector>& sectors)
{
    SectorGraph graph;
    graph.vertex_count = static_cast<int>(sectors.size());
    graph.out_edges.resize(sectors.size());
    graph.in_edges.resize(sectors.size());
    for (const auto& sector : sectors) {
        if (sector.exitways.empty())
            continue;
        auto dist = bfs_distances(map, sector.center);
        for (const Crossing& crossing : sector.exitways) {
            const Sector& target = sectors[crossing.to];
            int32_t d = dist[map.idx(target.center)];
            if (d < 0)
                throw std::runtime_error(
                    "unreachable neighboring sector center: " +
                    std::to_string(sector.id) + " -> " + std::to_string(target.id));
            int ei = static_cast<int>(graph.edges.size());
            graph.edges.push_back({sector.id, target.id, static_cast<double>(d)});
            graph.out_edges[sector.id].push_back(ei);
            graph.in_edges[target.id].push_back(ei);
        }
    }
    return graph;
}

SectorIndex SectorIndex::build(const WarehouseMap& map)
{
    SectorIndex index;
    index.sectors = build_sectors(map);
    index.roads.reserve(index.sectors.size());
    for (const auto& sector : index.sectors)
        index.roads.push_back(build_road_graph(map, sector.id));
    index.graph = build_sector_graph(map, index.sectors);
    return index;
}

} // namespace waresim
