#pragma once

#include "waresim/grid.hpp"
#include "waresim/sectors.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace waresim {

struct WeightParams {
    double k_h = 10.0;
    double k_l = 50.0;
};

// Minimal view of a robot that traffic accounting needs.
struct RobotTrafficInfo {
    int32_t sector = kNoSector;
    bool idle_at_station_without_task = false;
    bool delayed = false;
    bool comm_failed = false;
};

struct TrafficState {
    int64_t tick = 0;
    std::vector<double> heat;     // h_j per sector
    std::vector<double> abnormal; // l_j per sector
    std::vector<double> weights;  // w_ij per sector-graph edge index

    double edge_weight(const SectorGraph& graph, int32_t from, int32_t to) const;
};

// h_j: robots in the sector divided by capacity. Robots idle at robot
// stations with no assigned task are not counted.
double compute_heat(const Sector& sector, const std::vector<RobotTrafficInfo>& robots);

// w_ij = d_ij * (1 + k_h * h_j + k_l * l_j)
double compute_edge_weight(double distance, double heat, double abnormal,
                           const WeightParams& params);

TrafficState update_traffic(const std::vector<Sector>& sectors,
                            const SectorGraph& graph,
                            const std::vector<RobotTrafficInfo>& robots,
                            const WeightParams& params, int64_t tick);

// CSV rows "tick,sector_id,heat,abnormal", one per sector.
void write_heat_csv_rows(std::ostream& out, const TrafficState& traffic);

} // namespace waresim
