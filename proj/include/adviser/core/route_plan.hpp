#pragma once

#include <vector>

#include "adviser/core/types.hpp"

namespace adviser {

enum class NodeKind { Depot, Pickup, Dropoff };

struct RoutingNode {
  NodeKind kind = NodeKind::Depot;
  int ref = 0;  // depot id, mother id or center id depending on kind
  GeoPoint location;
  TimeWindow window;
};

// One bus trip: depot, pickups in order, then the vaccination center.
// arrivals[k] is the scheduled service time (minutes of day) at nodes[k].
struct RoutePlan {
  int route_id = 0;
  int day = 1;
  int center_id = 0;
  int depot_id = 0;
  std::vector<RoutingNode> nodes;
  std::vector<double> arrivals;
  std::vector<int> picked;  // mother ids in pickup order
  double utility = 0.0;
  bool feasible = true;

  bool picks(int mother_id) const {
    for (int m : picked)
      if (m == mother_id) return true;
    return false;
  }
};

}  // namespace adviser
