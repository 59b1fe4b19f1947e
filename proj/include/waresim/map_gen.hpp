#pragma once

#include "waresim/grid.hpp"

namespace waresim {

// Parametric warehouse generator. The layout is a one-way road grid with an
// intersection every (pitch_x, pitch_y) cells; each intersection anchors one
// sector. Station blocks fill the quadrants between roads, every station
// directly flanking a road. Block cells that would straddle a sector
// boundary are walls, so each ordered pair of neighboring sectors meets at
// exactly one road edge.
struct MapGenParams {
    int nx = 4;        // intersection columns
    int ny = 3;        // intersection rows
    int pitch_x = 8;   // >= 6 and even
    int pitch_y = 5;   // fixed block height of 4 interior rows
    int width = 0;     // 0 = minimal; extra columns become walls
    int height = 0;
    double alpha = 0.5;
    int robot_stations = 0;
    int pickup_stations = 0;
    int working_stations = 0;
};

// The full-scale environment: 160 x 100 cells, 1008 robot stations, 3528
// pickup stations, 432 working stations, 400 sectors.
MapGenParams full_scale_params();

WarehouseMap generate_map(const MapGenParams& params);

} // namespace waresim
