#pragma once

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "adviser/core/allocation.hpp"
#include "adviser/core/error.hpp"
#include "adviser/core/instance.hpp"

namespace adviser {

struct Violation {
  std::string entity;  // e.g. "mother 7", "drive (3, 2)", "instance"
  std::string rule;    // stable rule name, e.g. "drive radius"
  std::string detail;
};

inline constexpr double kDistanceSlackKm = 1e-9;

namespace detail {
inline std::string ent(const char* kind, int id) { return std::string(kind) + " " + std::to_string(id); }
}  // namespace detail

inline std::vector<Violation> validate_instance(const Instance& inst) {
  using detail::ent;
  std::vector<Violation> out;
  auto add = [&](std::string e, std::string r, std::string d) { out.push_back({std::move(e), std::move(r), std::move(d)}); };

  if (inst.horizon < 1) add("instance", "horizon", "horizon must be at least 1 day");
  if (inst.budget < Money{}) add("instance", "negative budget", "budget " + inst.budget.str());
  if (!(inst.drive_radius_km > 0.0)) add("instance", "drive radius", "radius must be positive");
  if (inst.drive_capacity < 1) add("instance", "drive capacity", "capacity must be at least 1");
  if (inst.drive_cap && *inst.drive_cap < 0) add("instance", "drive cap", "cap must be non-negative");
  if (!inst.costs.ordered()) add("instance", "cost ordering", "require route > drive > voucher > call > 0");
  if (inst.fleet.capacity < 1) add("fleet", "bus capacity", "capacity must be at least 1");

  std::set<int> ids;
  for (const auto& m : inst.mothers) {
    const auto e = ent("mother", m.id);
    if (!ids.insert(m.id).second) add(e, "duplicate mother id", "");
    if (!std::isfinite(m.location.lat) || !std::isfinite(m.location.lon)) add(e, "location", "non-finite coordinates");
    if (m.eligibility.first_day > m.eligibility.last_day)
      add(e, "eligibility window inverted",
          std::to_string(m.eligibility.first_day) + " > " + std::to_string(m.eligibility.last_day));
    else if (m.eligibility.first_day < 1 || m.eligibility.last_day > inst.horizon)
      add(e, "eligibility outside horizon", "");
    if (m.pickup_window.earliest >= m.pickup_window.latest) add(e, "pickup window inverted", "");
    if (m.cell != inst.grid.cell_of(m.location))
      add(e, "cell mismatch", "declared " + std::to_string(m.cell) + ", location in " +
                                  std::to_string(inst.grid.cell_of(m.location)));
    if (m.features.income_level < 0 || m.features.income_level >= kIncomeLevels)
      add(e, "income level out of range", std::to_string(m.features.income_level));
    if (m.features.child_age_months < 0) add(e, "negative child age", "");
  }

  if (inst.probabilities.size() != inst.mothers.size()) {
    add("instance", "probability table size",
        std::to_string(inst.probabilities.size()) + " rows for " + std::to_string(inst.mothers.size()) + " mothers");
  } else {
    for (std::size_t i = 0; i < inst.mothers.size(); ++i) {
      const auto& p = inst.probabilities[i];
      if (!p.ordered()) add(ent("mother", inst.mothers[i].id), "probability ordering", "require 0<=n<=c<=t<=l<=v<=1");
    }
  }

  std::set<int> depot_ids;
  for (const auto& d : inst.depots)
    if (!depot_ids.insert(d.id).second) add(ent("depot", d.id), "duplicate depot id", "");
  std::set<int> center_ids;
  for (const auto& c : inst.centers) {
    const auto e = ent("center", c.id);
    if (!center_ids.insert(c.id).second) add(e, "duplicate center id", "");
    if (c.dropoff_window.earliest >= c.dropoff_window.latest) add(e, "dropoff window inverted", "");
    if (!depot_ids.count(c.depot_id)) add(e, "unknown depot", std::to_string(c.depot_id));
  }
  std::set<int> bus_ids;
  for (const auto& b : inst.fleet.buses) {
    const auto e = ent("bus", b.id);
    if (!bus_ids.insert(b.id).second) add(e, "duplicate bus id", "");
    if (!depot_ids.count(b.depot_id)) add(e, "unknown depot", std::to_string(b.depot_id));
  }
  return out;
}

inline InterventionCounts count_interventions(const Allocation& a) {
  InterventionCounts c;
  for (const auto& s : a.assignments) c.mothers[static_cast<std::size_t>(s.kind)]++;
  c.drives = static_cast<int>(a.drives.size());
  c.routes = static_cast<int>(a.routes.size());
  return c;
}

// Calls and vouchers are charged per mother; drives and operated routes once
// each regardless of how many mothers they serve.
inline Money allocation_cost(const Instance& inst, const Allocation& a) {
  Money cost;
  for (const auto& s : a.assignments) {
    if (s.kind == Intervention::PhoneCall) cost += inst.costs.call;
    if (s.kind == Intervention::TravelVoucher) cost += inst.costs.voucher;
  }
  cost += inst.costs.drive * static_cast<std::int64_t>(a.drives.size());
  cost += inst.costs.route * static_cast<std::int64_t>(a.routes.size());
  return cost;
}

inline std::vector<Violation> validate_allocation(const Instance& inst, const Allocation& a) {
  std::vector<Violation> out;
  auto add = [&](std::string e, std::string r, std::string d) { out.push_back({std::move(e), std::move(r), std::move(d)}); };
  auto drive_ent = [](int cell, int day) { return "drive (" + std::to_string(cell) + ", " + std::to_string(day) + ")"; };

  std::map<std::pair<int, int>, const DriveRecord*> drives;
  for (const auto& d : a.drives) {
    const auto e = drive_ent(d.cell, d.day);
    if (d.cell < 0 || d.cell >= inst.grid.size()) add(e, "unknown cell", "");
    if (d.day < 1 || d.day > inst.horizon) add(e, "day outside horizon", "");
    if (!drives.emplace(std::pair{d.cell, d.day}, &d).second) add(e, "duplicate drive", "");
    if (static_cast<int>(d.mother_ids.size()) > inst.drive_capacity)
      add(e, "drive capacity", std::to_string(d.mother_ids.size()) + " > " + std::to_string(inst.drive_capacity));
    if (d.cell < 0 || d.cell >= inst.grid.size()) continue;
    for (int id : d.mother_ids) {
      auto i = inst.find(id);
      if (!i) continue;
      const double dist = inst.grid.distance_km(inst.mothers[*i].location, d.cell);
      if (dist > inst.drive_radius_km + kDistanceSlackKm)
        add(e, "drive radius", "mother " + std::to_string(id) + " at " + std::to_string(dist) + " km");
    }
  }
  if (inst.drive_cap && static_cast<int>(a.drives.size()) > *inst.drive_cap)
    add("allocation", "drive cap", std::to_string(a.drives.size()) + " > " + std::to_string(*inst.drive_cap));

  std::map<std::tuple<int, int, int>, const RouteRecord*> routes;  // (day, bus, route)
  std::set<std::pair<int, int>> bus_days;
  for (const auto& r : a.routes) {
    const auto e = "route " + std::to_string(r.route_id) + " bus " + std::to_string(r.bus_id) + " day " +
                   std::to_string(r.day);
    const Bus* bus = inst.bus(r.bus_id);
    if (!bus) add(e, "unknown bus", "");
    if (r.day < 1 || r.day > inst.horizon) add(e, "day outside horizon", "");
    if (r.plan.day != r.day || r.plan.route_id != r.route_id) add(e, "route record", "plan does not match record");
    if (bus && bus->depot_id != r.plan.depot_id) add(e, "route depot", "bus cannot operate a route from another depot");
    if (!bus_days.emplace(r.bus_id, r.day).second) add(e, "single route per bus per day", "");
    routes.emplace(std::tuple{r.day, r.bus_id, r.route_id}, &r);
  }

  std::map<int, int> per_mother;
  std::map<std::pair<int, int>, std::set<int>> drive_targets;
  std::map<std::tuple<int, int, int>, int> riders;
  for (const auto& s : a.assignments) {
    const auto e = detail::ent("mother", s.mother_id);
    auto i = inst.find(s.mother_id);
    if (!i) {
      add(e, "unknown mother", "");
      continue;
    }
    if (s.kind == Intervention::None) continue;
    if (++per_mother[s.mother_id] == 2) add(e, "intervention constraint", "more than one intervention");
    const Mother& m = inst.mothers[*i];
    if (s.day < 1 || s.day > inst.horizon || !m.eligibility.contains(s.day))
      add(e, "eligibility", "not eligible on day " + std::to_string(s.day));
    if (s.kind == Intervention::VaccineDrive) {
      auto it = drives.find({s.cell, s.day});
      bool listed = false;
      if (it != drives.end())
        for (int id : it->second->mother_ids) listed = listed || id == s.mother_id;
      if (!listed) add(e, "drive existence", "no drive at " + drive_ent(s.cell, s.day) + " lists this mother");
      drive_targets[{s.cell, s.day}].insert(s.mother_id);
    } else if (s.kind == Intervention::BusPickup) {
      auto it = routes.find({s.day, s.bus_id, s.route_id});
      if (it == routes.end()) {
        add(e, "route operation", "route " + std::to_string(s.route_id) + " not operated by bus " +
                                      std::to_string(s.bus_id) + " on day " + std::to_string(s.day));
      } else {
        if (!it->second->plan.picks(s.mother_id)) add(e, "route membership", "mother is not a stop on the route");
        if (++riders[{s.day, s.bus_id, s.route_id}] == inst.fleet.capacity + 1)
          add("route " + std::to_string(s.route_id) + " bus " + std::to_string(s.bus_id) + " day " +
                  std::to_string(s.day),
              "bus capacity", "more than " + std::to_string(inst.fleet.capacity) + " riders");
      }
    }
  }
  for (const auto& d : a.drives) {
    const auto& targets = drive_targets[{d.cell, d.day}];
    for (int id : d.mother_ids)
      if (!targets.count(id))
        add(drive_ent(d.cell, d.day), "drive membership", "mother " + std::to_string(id) + " listed but not assigned");
  }

  const Money cost = allocation_cost(inst, a);
  if (cost != a.total_cost) add("allocation", "cost record", "recorded " + a.total_cost.str() + ", actual " + cost.str());
  if (cost > inst.budget) add("allocation", "budget", cost.str() + " > " + inst.budget.str());
  return out;
}

// Σ_m p_{m, j(m)} without validating; unassigned mothers contribute p_n.
inline double objective_unchecked(const Instance& inst, const Allocation& a) {
  std::vector<Intervention> kind(inst.mothers.size(), Intervention::None);
  for (const auto& s : a.assignments) kind[inst.index_of(s.mother_id)] = s.kind;
  double sum = 0.0;
  for (std::size_t i = 0; i < kind.size(); ++i) sum += inst.probabilities[i].of(kind[i]);
  return sum;
}

inline double objective_value(const Instance& inst, const Allocation& a) {
  auto v = validate_allocation(inst, a);
  if (!v.empty()) throw ContractError("invalid allocation: " + v.front().entity + ": " + v.front().rule);
  return objective_unchecked(inst, a);
}

}  // namespace adviser
