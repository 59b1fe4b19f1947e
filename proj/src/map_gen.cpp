#include "waresim/map_gen.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace waresim {

MapGenParams full_scale_params()
{
    MapGenParams p;
    p.nx = 20;
    p.ny = 20;
    p.pitch_x = 8;
    p.pitch_y = 5;
    p.width = 160;
    p.height = 100;
    p.robot_stations = 1008;
    p.pickup_stations = 3528;
    p.working_stations = 432;
    return p;
}

namespace {

struct Slot {
    Coord cell;
    int32_t sector;
    bool mono = false;
    Dir dir = Dir::E;
};

} // namespace

WarehouseMap generate_map(const MapGenParams& p)
{
    if (p.nx < 2 || p.ny < 2)
        throw std::invalid_argument("need at least a 2x2 intersection grid");
    if (p.pitch_x < 6 || p.pitch_x % 2 != 0)
        throw std::invalid_argument("pitch_x must be even and >= 6");
    if (p.pitch_y != 5)
        throw std::invalid_argument("pitch_y must be 5");

    const int px = p.pitch_x, py = p.pitch_y;
    const int base_w = (p.nx - 1) * px + 1;
    const int base_h = (p.ny - 1) * py + 1;
    const int width = p.width > 0 ? p.width : base_w;
    const int height = p.height > 0 ? p.height : base_h;
    if (width < base_w || height < base_h)
        throw std::invalid_argument("requested size smaller than road grid");

    WarehouseMap map(width, height, p.alpha);

    // Flow directions: interior roads alternate by parity; the border roads
    // circulate clockwise so every corner keeps both in- and out-degree.
    auto row_dir = [&](int j) {
        if (j == 0)
            return Dir::E;
        if (j == p.ny - 1)
            return Dir::W;
        return j % 2 == 0 ? Dir::E : Dir::W;
    };
    auto col_dir = [&](int i) {
        if (i == 0)
            return Dir::N;
        if (i == p.nx - 1)
            return Dir::S;
        return i % 2 == 0 ? Dir::S : Dir::N;
    };

    // Sector of a road-row cell / road-column cell by arm split.
    auto row_cell_sector = [&](int x, int j) {
        int i = x / px;
        int off = x % px;
        if (off > px / 2)
            ++i;
        return static_cast<int32_t>(j * p.nx + std::min(i, p.nx - 1));
    };
    auto col_cell_sector = [&](int i, int y) {
        int j = y / py;
        int off = y % py;
        if (off > py / 2)
            ++j;
        return static_cast<int32_t>(std::min(j, p.ny - 1) * p.nx + i);
    };

    // Roads.
    for (int j = 0; j < p.ny; ++j) {
        int y = j * py;
        for (int x = 0; x < base_w; ++x) {
            map.set_kind({x, y}, CellKind::Road);
            map.set_sector({x, y}, row_cell_sector(x, j));
            if (x % px != 0)
                map.set_mono({x, y}, row_dir(j));
        }
    }
    for (int i = 0; i < p.nx; ++i) {
        int x = i * px;
        for (int y = 0; y < base_h; ++y) {
            if (y % py == 0)
                continue; // intersection; stays unannotated
            map.set_kind({x, y}, CellKind::Road);
            map.set_sector({x, y}, col_cell_sector(i, y));
            map.set_mono({x, y}, col_dir(i));
        }
    }

    // Enumerate station slots block by block in a deterministic order. Each
    // block yields up to 14 slots: two 2x(px/2-1) flank runs split by a wall
    // column, plus one mid cell on each side column.
    struct BlockRole {
        CellKind kind = CellKind::Wall;
        int take = 0;
    };
    const int blocks_x = p.nx - 1, blocks_y = p.ny - 1;
    const int slots_per_block = 2 * (px - 2) + 2;

    int targets[3] = {p.robot_stations, p.pickup_stations, p.working_stations};
    const CellKind kinds[3] = {CellKind::RobotStation, CellKind::PickupStation,
                               CellKind::WorkingStation};
    int blocks_needed = 0;
    for (int t : targets)
        blocks_needed += (t + slots_per_block - 1) / slots_per_block;
    if (blocks_needed > blocks_x * blocks_y)
        throw std::invalid_argument("station counts exceed block capacity");

    // Interleave block roles so the kinds mix across the floor: walk blocks
    // in row-major order and pick the kind furthest behind its quota.
    int assigned[3] = {0, 0, 0};
    int blocks_for[3];
    for (int k = 0; k < 3; ++k)
        blocks_for[k] = (targets[k] + slots_per_block - 1) / slots_per_block;
    std::vector<BlockRole> roles(static_cast<size_t>(blocks_x) * blocks_y);
    int total_blocks_used = 0;
    for (auto& role : roles) {
        int best = -1;
        double best_deficit = 0.0;
        for (int k = 0; k < 3; ++k) {
            if (assigned[k] >= blocks_for[k])
                continue;
            double deficit = static_cast<double>(blocks_for[k] - assigned[k]) /
                             blocks_for[k];
            if (best < 0 || deficit > best_deficit) {
                best = k;
                best_deficit = deficit;
            }
        }
        if (best < 0)
            break;
        role.kind = kinds[best];
        role.take = std::min(slots_per_block,
                             targets[best] - assigned[best] * slots_per_block);
        ++assigned[best];
        ++total_blocks_used;
    }
    (void)total_blocks_used;

    for (int bj = 0; bj < blocks_y; ++bj) {
        for (int bi = 0; bi < blocks_x; ++bi) {
            const BlockRole& role = roles[bj * blocks_x + bi];
            if (role.kind == CellKind::Wall || role.take <= 0)
                continue;
            const int x0 = bi * px, y0 = bj * py;
            const int split_x = x0 + px / 2;
            std::vector<Slot> slots;
            // Top flank serves the road row above, bottom flank the row
            // below; both use that row's flow direction.
            for (int x = x0 + 1; x < x0 + px; ++x) {
                if (x == split_x)
                    continue;
                slots.push_back({{x, y0 + 1},
                                 row_cell_sector(x, bj),
                                 true,
                                 row_dir(bj)});
            }
            for (int x = x0 + 1; x < x0 + px; ++x) {
                if (x == split_x)
                    continue;
                slots.push_back({{x, y0 + py - 1},
                                 row_cell_sector(x, bj + 1),
                                 true,
                                 row_dir(bj + 1)});
            }
            // Side mid cells; the vertical annotation keeps the edge to the
            // flank corner above one-way.
            slots.push_back(
                {{x0 + 1, y0 + 2}, col_cell_sector(bi, y0 + 2), true, Dir::S});
            slots.push_back({{x0 + px - 1, y0 + 2},
                             col_cell_sector(bi + 1, y0 + 2),
                             true,
                             Dir::S});

            int take = std::min<int>(role.take, static_cast<int>(slots.size()));
            for (int s = 0; s < take; ++s) {
                const Slot& slot = slots[s];
                map.set_kind(slot.cell, role.kind);
                map.set_sector(slot.cell, slot.sector);
                if (slot.mono)
                    map.set_mono(slot.cell, slot.dir);
            }
        }
    }

    map.set_sector_count(p.nx * p.ny);
    return map;
}

} // namespace waresim
