#pragma once

#include "waresim/grid.hpp"

#include <string>
#include <vector>

namespace waresim {

struct CriterionResult {
    std::string criterion; // "C1", "C2", "P1", "P2", "P3"
    bool pass = true;
    std::string witness;   // empty on pass
};

struct ValidationReport {
    std::vector<CriterionResult> results;

    bool all_pass() const
    {
        for (const auto& r : results)
            if (!r.pass)
                return false;
        return true;
    }
    std::string to_text() const;
};

// Well-formedness of the instance:
//   C1  at least robot_count robot stations.
//   C2  for every ordered station pair, a directed path exists whose
//       intermediate cells are all non-station.
ValidationReport validate_well_formed(const WarehouseMap& map, int robot_count);

// Partition criteria, per sector:
//   P1  at most one intersection (Road cell with >= 3 Road neighbors).
//   P2  per ordered neighboring-sector pair, exactly one boundary crossing.
//   P3  every entryway->exitway pair connected inside the sector by a
//       directed path that avoids all station cells.
ValidationReport validate_partition(const WarehouseMap& map);

// True when every directed edge joining two station cells has no reverse
// edge. Test helper for the mono-direction station area rule.
bool station_segments_mono(const WarehouseMap& map);

} // namespace waresim
