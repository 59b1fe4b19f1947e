#pragma once

#include "waresim/grid.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

namespace waresim {

// One directed boundary opening between two sectors: the unique edge
// exit_cell -> entry_cell with sector(exit_cell) = from, sector(entry_cell) = to.
struct Crossing {
    int32_t from = kNoSector;
    int32_t to = kNoSector;
    Coord exit_cell;
    Coord entry_cell;
};

struct Sector {
    int32_t id = kNoSector;
    std::vector<Coord> cells;     // all passable cells, sorted by (y, x)
    int road_cell_count = 0;      // cells of kind Road
    int capacity = 1;             // ceil(alpha * road_cell_count), >= 1
    Coord center;                 // road-graph 1-center, lexicographic tie-break
    std::vector<Crossing> entryways; // crossings with .to == id
    std::vector<Crossing> exitways;  // crossings with .from == id
};

struct SectorEdge {
    int32_t from = kNoSector;
    int32_t to = kNoSector;
    double distance = 0.0; // static road distance between sector centers, meters
};

struct SectorGraph {
    int vertex_count = 0;
    std::vector<SectorEdge> edges;
    std::vector<std::vector<int>> out_edges; // per vertex, indices into edges
    std::vector<std::vector<int>> in_edges;

    const SectorEdge* find_edge(int32_t from, int32_t to) const;
};

// Per-sector road topology. Vertices are the sector's passable cells in
// (y, x) order; edges are the directed 4-adjacencies inside the sector that
// survive mono annotations.
struct RoadGraph {
    int32_t sector_id = kNoSector;
    std::vector<Coord> cells;
    std::unordered_map<Coord, int> index_of;
    std::vector<std::vector<int>> out; // local vertex -> local successors
    std::vector<std::vector<int>> in;
    int diameter = 0; // undirected in-sector diameter, cells

    int index(Coord c) const
    {
        auto it = index_of.find(c);
        return it == index_of.end() ? -1 : it->second;
    }
    bool has_edge(int from, int to) const;
    bool mono_edge(int from, int to) const { return !has_edge(to, from); }
};

// Raw boundary scan used by validation: all directed sector-to-sector edges
// grouped by ordered pair, before uniqueness has been established.
std::map<std::pair<int32_t, int32_t>, std::vector<Crossing>>
scan_crossings(const WarehouseMap& map);

int sector_capacity(double alpha, int road_cells);

// Requires a map that passes validate_partition (exactly one crossing per
// ordered pair). Throws std::runtime_error otherwise.
std::vector<Sector> build_sectors(const WarehouseMap& map);

RoadGraph build_road_graph(const WarehouseMap& map, int32_t sector_id);

SectorGraph build_sector_graph(const WarehouseMap& map,
                               const std::vector<Sector>& sectors);

// Everything derived from a validated map, computed once after load.
struct SectorIndex {
    std::vector<Sector> sectors;
    std::vector<RoadGraph> roads;
    SectorGraph graph;

    static SectorIndex build(const WarehouseMap& map);
};

} // namespace waresim
