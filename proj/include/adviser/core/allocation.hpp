#pragma once

#include <array>
#include <vector>

#include "adviser/core/route_plan.hpp"
#include "adviser/core/types.hpp"

namespace adviser {

// One mother's intervention. Unassigned mothers have no entry; they are
// treated as Intervention::None.
struct Assignment {
  int mother_id = 0;
  Intervention kind = Intervention::None;
  int day = 0;
  int cell = -1;      // VaccineDrive
  int bus_id = -1;    // BusPickup
  int route_id = -1;  // BusPickup
};

struct DriveRecord {
  int cell = 0;
  int day = 1;
  std::vector<int> mother_ids;
};

struct RouteRecord {
  int day = 1;
  int bus_id = 0;
  int route_id = 0;
  RoutePlan plan;
};

struct Allocation {
  std::vector<Assignment> assignments;
  std::vector<DriveRecord> drives;
  std::vector<RouteRecord> routes;
  Money total_cost;
  double objective = 0.0;
};

struct InterventionCounts {
  std::array<int, 5> mothers{};  // indexed by Intervention
  int drives = 0;
  int routes = 0;

  int operator[](Intervention k) const { return mothers[static_cast<std::size_t>(k)]; }
};

}  // namespace adviser
