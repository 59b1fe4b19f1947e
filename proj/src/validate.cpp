#include "waresim/validate.hpp"

#include "waresim/sectors.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

namespace waresim {

std::string ValidationReport::to_text() const
{
    std::ostringstream out;
    for (const auto& r : results) {
        out << r.criterion << (r.pass ? " pass" : " FAIL");
        if (!r.witness.empty())
            out << "  " << r.witness;
        out << "\n";
    }
    return out.str();
}

namespace {

using Mask = std::vector<uint64_t>;

void mask_or(Mask& a, const Mask& b)
{
    for (size_t i = 0; i < a.size(); ++i)
        a[i] |= b[i];
}

bool mask_intersects(const Mask& a, const Mask& b)
{
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] & b[i])
            return true;
    return false;
}

// Iterative Tarjan over the road-only (passable, non-station) subgraph.
// Emits components sinks-first, so a single pass in emission order computes
// reachability sets.
struct SccResult {
    std::vector<int32_t> comp; // cell idx -> component id, -1 outside subgraph
    int count = 0;
    std::vector<std::vector<int32_t>> members;
};

SccResult road_only_sccs(const WarehouseMap& map)
{
    const int n = map.cell_count();
    SccResult res;
    res.comp.assign(n, -1);
    std::vector<int32_t> index(n, -1), lowlink(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<int32_t> stack;
    int next_index = 0;

    auto road_only = [&](Coord c) {
        return map.passable(c) && !map.station(c);
    };

    struct Frame {
        int32_t v;
        int edge;
    };
    std::vector<Frame> call_stack;

    for (int start = 0; start < n; ++start) {
        if (index[start] >= 0 || !road_only(map.coord(start)))
            continue;
        call_stack.push_back({start, 0});
        index[start] = lowlink[start] = next_index++;
        stack.push_back(start);
        on_stack[start] = 1;
        while (!call_stack.empty()) {
            Frame& frame = call_stack.back();
            Coord c = map.coord(frame.v);
            if (frame.edge < 4) {
                Dir d = static_cast<Dir>(frame.edge++);
                Coord nc = map.step(c, d);
                if (!map.in_bounds(nc) || !road_only(nc) || !map.edge_allowed(c, d))
                    continue;
                int w = map.idx(nc);
                if (index[w] < 0) {
                    index[w] = lowlink[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call_stack.push_back({w, 0});
                } else if (on_stack[w]) {
                    lowlink[frame.v] = std::min(lowlink[frame.v], index[w]);
                }
            } else {
                if (lowlink[frame.v] == index[frame.v]) {
                    res.members.emplace_back();
                    int32_t w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        res.comp[w] = res.count;
                        res.members.back().push_back(w);
                    } while (w != frame.v);
                    ++res.count;
                }
                int32_t v = frame.v;
                call_stack.pop_back();
                if (!call_stack.empty())
                    lowlink[call_stack.back().v] =
                        std::min(lowlink[call_stack.back().v], lowlink[v]);
            }
        }
    }
    return res;
}

// Directed station-free path search for witness construction.
bool station_free_path(const WarehouseMap& map, Coord from, Coord to)
{
    if (from == to)
        return true;
    std::vector<char> seen(map.cell_count(), 0);
    std::deque<Coord> queue{from};
    seen[map.idx(from)] = 1;
    while (!queue.empty()) {
        Coord c = queue.front();
        queue.pop_front();
        for (int di = 0; di < 4; ++di) {
            Dir d = static_cast<Dir>(di);
            Coord nc = map.step(c, d);
            if (!map.in_bounds(nc) || seen[map.idx(nc)] || !map.edge_allowed(c, d))
                continue;
            if (nc == to)
                return true;
            if (map.station(nc))
                continue; // intermediates must be non-station
            seen[map.idx(nc)] = 1;
            queue.push_back(nc);
        }
    }
    return false;
}

std::string blocking_stations_witness(const WarehouseMap& map, Coord from, Coord to)
{
    // Unrestricted directed path, then name the stations sitting on it.
    std::vector<int32_t> parent(map.cell_count(), -2);
    std::deque<Coord> queue{from};
    parent[map.idx(from)] = -1;
    bool reached = false;
    while (!queue.empty() && !reached) {
        Coord c = queue.front();
        queue.pop_front();
        for (int di = 0; di < 4; ++di) {
            Dir d = static_cast<Dir>(di);
            Coord nc = map.step(c, d);
            if (!map.in_bounds(nc) || parent[map.idx(nc)] != -2 ||
                !map.edge_allowed(c, d))
                continue;
            parent[map.idx(nc)] = map.idx(c);
            if (nc == to) {
                reached = true;
                break;
            }
            queue.push_back(nc);
        }
    }
    std::ostringstream out;
    out << "no station-free path " << to_string(from) << " -> " << to_string(to);
    if (reached) {
        std::vector<Coord> blockers;
        for (int cur = parent[map.idx(to)]; cur >= 0; cur = parent[cur]) {
            Coord c = map.coord(cur);
            if (c != from && map.station(c))
                blockers.push_back(c);
        }
        std::reverse(blockers.begin(), blockers.end());
        if (!blockers.empty()) {
            out << "; blocked by station";
            if (blockers.size() > 1)
                out << "s";
            for (Coord b : blockers)
                out << " " << to_string(b);
        }
    } else {
        out << "; no path at all";
    }
    return out.str();
}

} // namespace

ValidationReport validate_well_formed(const WarehouseMap& map, int robot_count)
{
    ValidationReport report;

    std::vector<Coord> stations;
    int robot_stations = 0;
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) {
            Coord c{x, y};
            if (map.station(c))
                stations.push_back(c);
            if (map.kind(c) == CellKind::RobotStation)
                ++robot_stations;
        }
    }

    CriterionResult c1{"C1", robot_stations >= robot_count, ""};
    if (!c1.pass)
        c1.witness = std::to_string(robot_stations) + " < " + std::to_string(robot_count);
    report.results.push_back(c1);

    // C2 via the road-only condensation: a station-free path s1 -> s2 exists
    // iff s1 -> s2 is a direct edge, or some road-only out-neighbor of s1
    // reaches some road-only in-neighbor of s2.
    CriterionResult c2{"C2", true, ""};
    auto scc = road_only_sccs(map);

    std::vector<int32_t> interesting(scc.count, -1);
    int interesting_count = 0;
    auto note_interesting = [&](int comp) {
        if (comp >= 0 && interesting[comp] < 0)
            interesting[comp] = interesting_count++;
    };
    for (Coord s : stations) {
        for (int di = 0; di < 4; ++di) {
            Dir d = static_cast<Dir>(di);
            Coord nc = map.step(s, d);
            if (!map.in_bounds(nc))
                continue;
            if (map.edge_allowed(s, d) && !map.station(nc))
                note_interesting(scc.comp[map.idx(nc)]);
            if (map.edge_allowed(nc, opposite(d)) && !map.station(nc))
                note_interesting(scc.comp[map.idx(nc)]);
        }
    }

    const size_t words = (interesting_count + 63) / 64;
    std::vector<Mask> reach(scc.count, Mask(words, 0));
    // Tarjan emits components sinks-first: successors are already final.
    for (int comp = 0; comp < scc.count; ++comp) {
        Mask& m = reach[comp];
        if (interesting[comp] >= 0)
            m[interesting[comp] / 64] |= uint64_t(1) << (interesting[comp] % 64);
        for (int32_t cell : scc.members[comp]) {
            Coord c = map.coord(cell);
            for (int di = 0; di < 4; ++di) {
                Dir d = static_cast<Dir>(di);
                Coord nc = map.step(c, d);
                if (!map.in_bounds(nc) || !map.edge_allowed(c, d) || map.station(nc))
                    continue;
                int succ = scc.comp[map.idx(nc)];
                if (succ >= 0 && succ != comp)
                    mask_or(m, reach[succ]);
            }
        }
    }

    std::vector<Mask> out_reach(stations.size(), Mask(words, 0));
    std::vector<Mask> in_at(stations.size(), Mask(words, 0));
    for (size_t si = 0; si < stations.size(); ++si) {
        Coord s = stations[si];
        for (int di = 0; di < 4; ++di) {
            Dir d = static_cast<Dir>(di);
            Coord nc = map.step(s, d);
            if (!map.in_bounds(nc) || map.station(nc))
                continue;
            int comp = scc.comp[map.idx(nc)];
            if (comp < 0)
                continue;
            if (map.edge_allowed(s, d))
                mask_or(out_reach[si], reach[comp]);
            if (map.edge_allowed(nc, opposite(d)) && interesting[comp] >= 0)
                in_at[si][interesting[comp] / 64] |=
                    uint64_t(1) << (interesting[comp] % 64);
        }
    }

    // Group stations by mask to avoid the quadratic scan on healthy maps.
    std::map<Mask, std::vector<int>> by_out, by_in;
    for (size_t si = 0; si < stations.size(); ++si) {
        by_out[out_reach[si]].push_back(static_cast<int>(si));
        by_in[in_at[si]].push_back(static_cast<int>(si));
    }
    for (const auto& [out_mask, out_group] : by_out) {
        if (!c2.pass)
            break;
        for (const auto& [in_mask, in_group] : by_in) {
            if (mask_intersects(out_mask, in_mask))
                continue;
            // Candidate failures; direct adjacency may still save a pair.
            for (int si : out_group) {
                for (int sj : in_group) {
                    if (si == sj)
                        continue;
                    Coord a = stations[si];
                    Coord b = stations[sj];
                    bool adjacent_edge = false;
                    for (int di = 0; di < 4 && !adjacent_edge; ++di) {
                        Dir d = static_cast<Dir>(di);
                        if (map.step(a, d) == b && map.edge_allowed(a, d))
                            adjacent_edge = true;
                    }
                    if (adjacent_edge)
                        continue;
                    if (station_free_path(map, a, b))
                        continue; // mask approximation was conservative
                    c2.pass = false;
                    c2.witness = blocking_stations_witness(map, a, b);
                    break;
                }
                if (!c2.pass)
                    break;
            }
            if (!c2.pass)
                break;
        }
    }
    report.results.push_back(c2);
    return report;
}

ValidationReport validate_partition(const WarehouseMap& map)
{
    ValidationReport report;

    // P1: at most one intersection per sector.
    CriterionResult p1{"P1", true, ""};
    std::vector<std::vector<Coord>> intersections(map.sector_count());
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) {
            Coord c{x, y};
            if (map.kind(c) != CellKind::Road)
                continue;
            int road_neighbors = 0;
            for (int di = 0; di < 4; ++di) {
                Coord nc = map.step(c, static_cast<Dir>(di));
                if (map.in_bounds(nc) && map.kind(nc) == CellKind::Road)
                    ++road_neighbors;
            }
            if (road_neighbors >= 3 && map.sector_of(c) != kNoSector)
                intersections[map.sector_of(c)].push_back(c);
        }
    }
    for (int s = 0; s < map.sector_count(); ++s) {
        if (intersections[s].size() > 1) {
            p1.pass = false;
            std::ostringstream w;
            w << "sector " << s << " has " << intersections[s].size()
              << " intersections:";
            for (Coord c : intersections[s])
                w << " " << to_string(c);
            p1.witness = w.str();
            break;
        }
    }
    report.results.push_back(p1);

    // P2: exactly one crossing per ordered neighboring pair.
    CriterionResult p2{"P2", true, ""};
    auto crossings = scan_crossings(map);
    for (const auto& [pair, list] : crossings) {
        if (list.size() > 1) {
            p2.pass = false;
            std::ostringstream w;
            w << "sectors " << pair.first << " -> " << pair.second << " share "
              << list.size() << " openings:";
            for (const Crossing& c : list)
                w << " " << to_string(c.exit_cell) << "->" << to_string(c.entry_cell);
            p2.witness = w.str();
            break;
        }
    }
    report.results.push_back(p2);

    // P3: station-free in-sector path from every entryway to every exitway.
    CriterionResult p3{"P3", true, ""};
    std::vector<std::vector<Coord>> entry_cells(map.sector_count());
    std::vector<std::vector<Coord>> exit_cells(map.sector_count());
    for (const auto& [pair, list] : crossings) {
        for (const Crossing& c : list) {
            entry_cells[c.to].push_back(c.entry_cell);
            exit_cells[c.from].push_back(c.exit_cell);
        }
    }
    std::vector<int32_t> order(map.cell_count(), -1);
    for (int s = 0; s < map.sector_count() && p3.pass; ++s) {
        for (Coord entry : entry_cells[s]) {
            if (map.station(entry)) {
                p3.pass = false;
                p3.witness = "entryway " + to_string(entry) + " of sector " +
                             std::to_string(s) + " is a station";
                break;
            }
            // One station-free BFS inside the sector covers all exitways.
            std::fill(order.begin(), order.end(), -1);
            std::deque<Coord> queue{entry};
            order[map.idx(entry)] = 0;
            while (!queue.empty()) {
                Coord c = queue.front();
                queue.pop_front();
                for (int di = 0; di < 4; ++di) {
                    Dir d = static_cast<Dir>(di);
                    Coord nc = map.step(c, d);
                    if (!map.in_bounds(nc) || map.sector_of(nc) != s ||
                        order[map.idx(nc)] >= 0)
                        continue;
                    if (!map.edge_allowed(c, d) || map.station(nc))
                        continue;
                    order[map.idx(nc)] = 1;
                    queue.push_back(nc);
                }
            }
            for (Coord exit : exit_cells[s]) {
                if (map.station(exit)) {
                    p3.pass = false;
                    p3.witness = "exitway " + to_string(exit) + " of sector " +
                                 std::to_string(s) + " is a station";
                    break;
                }
                if (order[map.idx(exit)] < 0) {
                    p3.pass = false;
                    p3.witness = "sector " + std::to_string(s) +
                                 ": no station-free path " + to_string(entry) +
                                 " -> " + to_string(exit);
                    break;
                }
            }
            if (!p3.pass)
                break;
        }
    }
    report.results.push_back(p3);
    return report;
}

bool station_segments_mono(const WarehouseMap& map)
{
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) {
            Coord a{x, y};
            CellKind ka = map.kind(a);
            if (ka != CellKind::RobotStation && ka != CellKind::PickupStation)
                continue;
            for (int di = 0; di < 2; ++di) { // each pair once
                Dir d = static_cast<Dir>(di);
                Coord b = map.step(a, d);
                if (!map.in_bounds(b) || map.kind(b) != ka)
                    continue;
                if (map.edge_allowed(a, d) && map.edge_allowed(b, opposite(d)))
                    return false;
            }
        }
    }
    return true;
}

} // namespace waresim
