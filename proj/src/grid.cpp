#include "waresim/grid.hpp"

#include <deque>

namespace waresim {

char cell_code(CellKind k)
{
    switch (k) {
    case CellKind::Road: return '.';
    case CellKind::Wall: return '#';
    case CellKind::RobotStation: return 'R';
    case CellKind::PickupStation: return 'P';
    case CellKind::WorkingStation: return 'W';
    }
    return '?';
}

bool cell_kind_from_code(char code, CellKind& out)
{
    switch (code) {
    case '.': out = CellKind::Road; return true;
    case '#': out = CellKind::Wall; return true;
    case 'R': out = CellKind::RobotStation; return true;
    case 'P': out = CellKind::PickupStation; return true;
    case 'W': out = CellKind::WorkingStation; return true;
    default: return false;
    }
}

char dir_code(Dir d)
{
    switch (d) {
    case Dir::E: return 'E';
    case Dir::S: return 'S';
    case Dir::W: return 'W';
    case Dir::N: return 'N';
    }
    return '?';
}

bool dir_from_code(char code, Dir& out)
{
    switch (code) {
    case 'E': out = Dir::E; return true;
    case 'S': out = Dir::S; return true;
    case 'W': out = Dir::W; return true;
    case 'N': out = Dir::N; return true;
    default: return false;
    }
}

WarehouseMap::WarehouseMap(int width, int height, double alpha)
    : width_(width),
      height_(height),
      alpha_(alpha),
      kinds_(static_cast<size_t>(width) * height, CellKind::Wall),
      sector_of_(static_cast<size_t>(width) * height, kNoSector),
      mono_(static_cast<size_t>(width) * height, 0)
{
}

bool WarehouseMap::edge_allowed(Coord from, Dir d) const
{
    Coord to = step(from, d);
    if (!passable(from) || !passable(to))
        return false;
    if (has_mono(from) && mono_dir(from) == opposite(d))
        return false;
    if (has_mono(to) && mono_dir(to) == opposite(d))
        return false;
    return true;
}

std::vector<Coord> WarehouseMap::stations_of_kind(CellKind k) const
{
    std::vector<Coord> out;
    for (int y = 0; y < height_; ++y)
        for (int x = 0; x < width_; ++x)
            if (kinds_[y * width_ + x] == k)
                out.push_back({x, y});
    return out;
}

bool WarehouseMap::operator==(const WarehouseMap& other) const
{
    return width_ == other.width_ && height_ == other.height_ &&
           alpha_ == other.alpha_ && kinds_ == other.kinds_ &&
           sector_of_ == other.sector_of_ && mono_ == other.mono_;
}

namespace {

std::vector<int32_t> bfs_impl(const WarehouseMap& map, Coord origin, bool reversed)
{
    std::vector<int32_t> dist(map.cell_count(), -1);
    if (!map.passable(origin))
        return dist;
    std::deque<int> queue;
    dist[map.idx(origin)] = 0;
    queue.push_back(map.idx(origin));
    while (!queue.empty()) {
        int cur = queue.front();
        queue.pop_front();
        Coord c = map.coord(cur);
        for (int di = 0; di < 4; ++di) {
            Dir d = static_cast<Dir>(di);
            Coord n = map.step(c, d);
            if (!map.in_bounds(n) || dist[map.idx(n)] >= 0)
                continue;
            bool ok = reversed ? map.edge_allowed(n, opposite(d))
                               : map.edge_allowed(c, d);
            if (!ok)
                continue;
            dist[map.idx(n)] = dist[cur] + 1;
            queue.push_back(map.idx(n));
        }
    }
    return dist;
}

} // namespace

std::vector<int32_t> bfs_distances(const WarehouseMap& map, Coord from)
{
    return bfs_impl(map, from, false);
}

std::vector<int32_t> bfs_distances_to(const WarehouseMap& map, Coord to)
{
    return bfs_impl(map, to, true);
}

} // namespace waresim
