#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace waresim {

struct Coord {
    int x = 0;
    int y = 0;

    bool operator==(const Coord&) const = default;
    // Lexicographic (x, then y): the tie-break order used everywhere a
    // "lowest coordinate" rule applies.
    auto operator<=>(const Coord&) const = default;
};

inline std::string to_string(Coord c)
{
    return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")";
}

enum class CellKind : uint8_t {
    Road,
    Wall,
    RobotStation,
    PickupStation,
    WorkingStation,
};

inline bool is_station(CellKind k)
{
    return k == CellKind::RobotStation || k == CellKind::PickupStation ||
           k == CellKind::WorkingStation;
}

char cell_code(CellKind k);
bool cell_kind_from_code(char code, CellKind& out);

// Fixed neighbor order E, S, W, N. Every search in the project iterates
// directions in this order so expansions are reproducible.
enum class Dir : uint8_t { E = 0, S = 1, W = 2, N = 3 };

inline constexpr int kDirDx[4] = {1, 0, -1, 0};
inline constexpr int kDirDy[4] = {0, 1, 0, -1};

inline Dir opposite(Dir d)
{
    return static_cast<Dir>((static_cast<int>(d) + 2) % 4);
}

char dir_code(Dir d);
bool dir_from_code(char code, Dir& out);

constexpr int32_t kNoSector = -1;

// Grid world model. Cells are 1m x 1m; passable = everything except Wall.
// Mono-direction annotations live on cells: a cell annotated with flow
// direction d forbids traversing any incident edge in direction opposite(d).
class WarehouseMap {
public:
    WarehouseMap() = default;
    WarehouseMap(int width, int height, double alpha);

    int width() const { return width_; }
    int height() const { return height_; }
    double alpha() const { return alpha_; }
    int cell_count() const { return width_ * height_; }

    int idx(Coord c) const { return c.y * width_ + c.x; }
    Coord coord(int idx) const { return {idx % width_, idx / width_}; }
    bool in_bounds(Coord c) const
    {
        return c.x >= 0 && c.x < width_ && c.y >= 0 && c.y < height_;
    }

    CellKind kind(Coord c) const { return kinds_[idx(c)]; }
    void set_kind(Coord c, CellKind k) { kinds_[idx(c)] = k; }
    bool passable(Coord c) const
    {
        return in_bounds(c) && kinds_[idx(c)] != CellKind::Wall;
    }
    bool station(Coord c) const { return is_station(kinds_[idx(c)]); }

    int32_t sector_of(Coord c) const { return sector_of_[idx(c)]; }
    void set_sector(Coord c, int32_t s) { sector_of_[idx(c)] = s; }
    int sector_count() const { return sector_count_; }
    void set_sector_count(int n) { sector_count_ = n; }

    bool has_mono(Coord c) const { return mono_[idx(c)] != 0; }
    Dir mono_dir(Coord c) const { return static_cast<Dir>(mono_[idx(c)] - 1); }
    void set_mono(Coord c, Dir d)
    {
        mono_[idx(c)] = static_cast<uint8_t>(static_cast<int>(d) + 1);
    }
    void clear_mono(Coord c) { mono_[idx(c)] = 0; }

    // Directed traversability of the edge leaving `from` in direction `d`.
    // Both endpoints must be passable and neither may carry a mono
    // annotation opposing the move.
    bool edge_allowed(Coord from, Dir d) const;

    Coord step(Coord c, Dir d) const
    {
        return {c.x + kDirDx[static_cast<int>(d)], c.y + kDirDy[static_cast<int>(d)]};
    }

    std::vector<Coord> stations_of_kind(CellKind k) const;

    bool operator==(const WarehouseMap& other) const;

private:
    int width_ = 0;
    int height_ = 0;
    double alpha_ = 0.5;
    int sector_count_ = 0;
    std::vector<CellKind> kinds_;
    std::vector<int32_t> sector_of_;
    std::vector<uint8_t> mono_;
};

// Directed BFS distance field over the whole map, respecting mono
// annotations. dist[idx] = steps from `from`, or -1 when unreachable.
std::vector<int32_t> bfs_distances(const WarehouseMap& map, Coord from);

// Reverse-directed BFS: dist[idx] = steps from cell idx TO `to`.
std::vector<int32_t> bfs_distances_to(const WarehouseMap& map, Coord to);

} // namespace waresim

template <>
struct std::hash<waresim::Coord> {
    size_t operator()(const waresim::Coord& c) const
    {
        return std::hash<int64_t>()((static_cast<int64_t>(c.y) << 32) ^
                                    static_cast<uint32_t>(c.x));
    }
};
