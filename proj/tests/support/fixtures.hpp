#pragma once

#include "adviser/core/instance.hpp"

namespace fixtures {

using namespace adviser;

inline constexpr GeoPoint kOrigin{7.30, 3.85};

// rows x cols grid of 1 km cells, one depot at the south-west corner, one
// center in the middle of the grid, one bus.
inline Instance base_instance(int rows = 3, int cols = 3, int horizon = 2) {
  Instance inst;
  inst.grid = Grid(kOrigin, rows, cols, 1.0);
  inst.horizon = horizon;
  inst.budget = Money::units(100);
  inst.drive_radius_km = 1.5;
  inst.drive_capacity = 100;
  inst.fleet.capacity = 30;
  const auto proj = inst.grid.projection();
  inst.depots.push_back({1, proj.unproject({0.1, 0.1})});
  inst.centers.push_back({1, proj.unproject({cols * 0.5, rows * 0.5}), {480, 720}, 1});
  inst.fleet.buses.push_back({1, 1});
  return inst;
}

inline GeoPoint at_km(const Instance& inst, double x, double y) { return inst.grid.projection().unproject({x, y}); }

inline Mother& add_mother(Instance& inst, int id, double x_km, double y_km, int first_day, int last_day,
                          Probabilities p = {0.2, 0.3, 0.5, 0.8, 1.0}) {
  Mother m;
  m.id = id;
  m.location = at_km(inst, x_km, y_km);
  m.cell = inst.grid.cell_of(m.location);
  m.eligibility = {first_day, last_day};
  m.pickup_window = {420, 600};
  m.features = {2, 6, false, false};
  inst.mothers.push_back(m);
  inst.probabilities.push_back(p);
  inst.reindex();
  return inst.mothers.back();
}

}  // namespace fixtures
