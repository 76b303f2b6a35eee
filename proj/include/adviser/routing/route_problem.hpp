#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "adviser/core/geo.hpp"
#include "adviser/core/route_plan.hpp"
#include "adviser/core/types.hpp"

namespace adviser {

// Constant-speed travel over great-circle distance.
struct TravelModel {
  double speed_kmh = 25.0;
  double minutes(GeoPoint a, GeoPoint b) const { return haversine_km(a, b) / speed_kmh * 60.0; }
};

struct Candidate {
  int mother_id = 0;
  GeoPoint location;
  TimeWindow window;
  double utility = 0.0;
};

// One VRP: a single bus from `depot` to `center` on `day`, choosing pickups
// among `candidates`.
struct RouteProblem {
  int day = 1;
  int route_id = 0;
  VaccinationCenter center;
  Depot depot;
  TimeWindow depot_window{360, 1440};
  int capacity = 30;
  TravelModel travel;
  std::vector<Candidate> candidates;

  static constexpr int kDepot = -1;
  static constexpr int kCenter = -2;

  GeoPoint location(int node) const {
    if (node == kDepot) return depot.location;
    if (node == kCenter) return center.location;
    return candidates[static_cast<std::size_t>(node)].location;
  }
  TimeWindow window(int node) const {
    if (node == kDepot) return depot_window;
    if (node == kCenter) return center.dropoff_window;
    return candidates[static_cast<std::size_t>(node)].window;
  }
  // Travel minutes, memoised per node pair; the table resets whenever the
  // candidate list changes size.
  double time(int a, int b) const {
    const std::size_t n = candidates.size() + 2;
    if (time_cache_n_ != n) {
      time_cache_.assign(n * n, -1.0);
      time_cache_n_ = n;
    }
    double& t = time_cache_[static_cast<std::size_t>(a + 2) * n + static_cast<std::size_t>(b + 2)];
    if (t < 0) t = travel.minutes(location(a), location(b));
    return t;
  }

  // Service times along depot -> seq -> center, or nullopt if some window
  // closes before the bus can arrive.
  std::optional<std::vector<double>> schedule(const std::vector<int>& seq) const {
    std::vector<double> at;
    at.reserve(seq.size() + 2);
    at.push_back(depot_window.earliest);
    int prev = kDepot;
    auto visit = [&](int node) {
      const TimeWindow w = window(node);
      const double t = std::max<double>(w.earliest, at.back() + time(prev, node));
      if (t > w.latest) return false;
      at.push_back(t);
      prev = node;
      return true;
    };
    for (int n : seq)
      if (!visit(n)) return std::nullopt;
    if (!visit(kCenter)) return std::nullopt;
    return at;
  }

  double travel_minutes(const std::vector<int>& seq) const {
    double sum = 0;
    int prev = kDepot;
    for (int n : seq) {
      sum += time(prev, n);
      prev = n;
    }
    return sum + time(prev, kCenter);
  }

  double utility(const std::vector<int>& seq) const {
    double u = 0;
    for (int n : seq) u += candidates[static_cast<std::size_t>(n)].utility;
    return u;
  }

  RoutePlan make_plan(const std::vector<int>& seq) const {
    RoutePlan p;
    p.route_id = route_id;
    p.day = day;
    p.center_id = center.id;
    p.depot_id = depot.id;
    auto at = schedule(seq);
    p.feasible = at.has_value() && static_cast<int>(seq.size()) <= capacity;
    p.nodes.push_back({NodeKind::Depot, depot.id, depot.location, depot_window});
    for (int n : seq) {
      const auto& c = candidates[static_cast<std::size_t>(n)];
      p.nodes.push_back({NodeKind::Pickup, c.mother_id, c.location, c.window});
      p.picked.push_back(c.mother_id);
    }
    p.nodes.push_back({NodeKind::Dropoff, center.id, center.location, center.dropoff_window});
    if (at) p.arrivals = *at;
    p.utility = utility(seq);
    return p;
  }

 private:
  mutable std::vector<double> time_cache_;
  mutable std::size_t time_cache_n_ = 0;
};

struct FeasibilityResult {
  bool feasible = true;
  int node = -1;     // index into plan.nodes of the first violation
  std::string rule;  // "endpoint", "capacity", "time window", "arrival record"
};

// Forward-scheduling check: arrive = max(earliest, previous + travel) must
// not exceed the node's latest time. Recorded arrivals, when present, must
// lie in their windows and respect travel times.
inline FeasibilityResult route_feasible(const RoutePlan& plan, const TravelModel& travel, int capacity) {
  const auto& n = plan.nodes;
  if (n.size() < 2 || n.front().kind != NodeKind::Depot || n.back().kind != NodeKind::Dropoff) return {false, 0, "endpoint"};
  int pickups = 0;
  for (std::size_t k = 1; k + 1 < n.size(); ++k) {
    if (n[k].kind != NodeKind::Pickup) return {false, static_cast<int>(k), "endpoint"};
    if (++pickups > capacity) return {false, static_cast<int>(k), "capacity"};
  }
  double t = n.front().window.earliest;
  for (std::size_t k = 1; k < n.size(); ++k) {
    t = std::max<double>(n[k].window.earliest, t + travel.minutes(n[k - 1].location, n[k].location));
    if (t > n[k].window.latest) return {false, static_cast<int>(k), "time window"};
  }
  if (!plan.arrivals.empty()) {
    if (plan.arrivals.size() != n.size()) return {false, 0, "arrival record"};
    for (std::size_t k = 0; k < n.size(); ++k) {
      const double a = plan.arrivals[k];
      if (a < n[k].window.earliest - 1e-9 || a > n[k].window.latest + 1e-9) return {false, static_cast<int>(k), "arrival record"};
      if (k > 0 && a + 1e-9 < plan.arrivals[k - 1] + travel.minutes(n[k - 1].location, n[k].location))
        return {false, static_cast<int>(k), "arrival record"};
    }
  }
  return {};
}

}  // namespace adviser
