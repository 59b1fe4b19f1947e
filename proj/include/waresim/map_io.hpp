#pragma once

#include "waresim/grid.hpp"

#include <stdexcept>
#include <string>

namespace waresim {

// Parse failure; line/column are 1-based positions in the document.
class MapParseError : public std::runtime_error {
public:
    MapParseError(int line, int column, const std::string& what)
        : std::runtime_error("map parse error at line " + std::to_string(line) +
                             ", column " + std::to_string(column) + ": " + what),
          line_(line),
          column_(column)
    {
    }

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

// Map document format (line oriented, canonical form round-trips bit-exact):
//
//   width N
//   height M
//   alpha X
//   <M grid rows over {'.'=Road '#'=Wall 'R'=RobotStation 'P'=PickupStation
//                      'W'=WorkingStation}>
//   sectors
//   <M rows of width space-separated base-36 sector ids; '#' on Wall cells>
//   mono                (optional block)
//   <x y D lines, D in {E,S,W,N}>
//
// Sector ids must be dense 0..S-1 over the non-Wall cells.
WarehouseMap parse_map(const std::string& document);
WarehouseMap load_map(const std::string& path);

std::string serialize_map(const WarehouseMap& map);
void save_map(const WarehouseMap& map, const std::string& path);

std::string sector_id_to_base36(int32_t id);

} // namespace waresim
