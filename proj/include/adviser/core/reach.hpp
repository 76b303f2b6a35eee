#pragma once

#include <vector>

#include "adviser/core/instance.hpp"

namespace adviser {

// Which cells can serve which mothers by a drive: d_mg <= σ.
struct DriveReach {
  std::vector<std::vector<int>> cells_of_mother;  // by mother index, increasing cell
  std::vector<std::vector<int>> mothers_of_cell;  // by cell, increasing mother index
};

inline DriveReach drive_reach(const Instance& inst) {
  DriveReach r;
  r.cells_of_mother.resize(inst.mothers.size());
  r.mothers_of_cell.resize(static_cast<std::size_t>(inst.grid.size()));
  for (std::size_t i = 0; i < inst.mothers.size(); ++i) {
    r.cells_of_mother[i] = inst.grid.cells_within(inst.mothers[i].location, inst.drive_radius_km);
    for (int g : r.cells_of_mother[i]) r.mothers_of_cell[static_cast<std::size_t>(g)].push_back(static_cast<int>(i));
  }
  return r;
}

}  // namespace adviser
