#include "waresim/traffic.hpp"

#include <cstdio>
#include <ostream>

namespace waresim {

double TrafficState::edge_weight(const SectorGraph& graph, int32_t from,
                                 int32_t to) const
{
    for (int ei : graph.out_edges[from])
        if (graph.edges[ei].to == to)
            return weights[ei];
    return -1.0;
}

double compute_heat(const Sector& sector, const std::vector<RobotTrafficInfo>& robots)
{
    int count = 0;
    for (const auto& r : robots)
        if (r.sector == sector.id && !r.idle_at_station_without_task)
            ++count;
    return static_cast<double>(count) / sector.capacity;
}

double compute_edge_weight(double distance, double heat, double abnormal,
                           const WeightParams& params)
{
    return distance * (1.0 + params.k_h * heat + params.k_l * abnormal);
}

TrafficState update_traffic(const std::vector<Sector>& sectors,
                            const SectorGraph& graph,
                            const std::vector<RobotTrafficInfo>& robots,
                            const WeightParams& params, int64_t tick)
{
    TrafficState traffic;
    traffic.tick = tick;
    traffic.heat.assign(sectors.size(), 0.0);
    traffic.abnormal.assign(sectors.size(), 0.0);

    std::vector<int> counted(sectors.size(), 0);
    std::vector<int> abnormal(sectors.size(), 0);
    for (const auto& r : robots) {
        if (r.sector == kNoSector)
            continue;
        if (!r.idle_at_station_without_task)
            ++counted[r.sector];
        if (r.delayed || r.comm_failed)
            ++abnormal[r.sector];
    }
    for (size_t s = 0; s < sectors.size(); ++s) {
        traffic.heat[s] = static_cast<double>(counted[s]) / sectors[s].capacity;
        traffic.abnormal[s] = static_cast<double>(abnormal[s]) / sectors[s].capacity;
    }

    traffic.weights.resize(graph.edges.size());
    for (size_t ei = 0; ei < graph.edges.size(); ++ei) {
        const SectorEdge& e = graph.edges[ei];
        traffic.weights[ei] = compute_edge_weight(e.distance, traffic.heat[e.to],
                                                  traffic.abnormal[e.to], params);
    }
    return traffic;
}

void write_heat_csv_rows(std::ostream& out, const TrafficState& traffic)
{
    char buf[128];
    for (size_t s = 0; s < traffic.heat.size(); ++s) {
        std::snprintf(buf, sizeof(buf), "%lld,%zu,%.6f,%.6f\n",
                      static_cast<long long>(traffic.tick), s, traffic.heat[s],
                      traffic.abnormal[s]);
        out << buf;
    }
}

} // namespace waresim
