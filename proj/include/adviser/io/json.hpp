#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "adviser/bounds/theorem.hpp"
#include "adviser/core/error.hpp"
#include "adviser/core/instance.hpp"
#include "adviser/core/validate.hpp"
#include "adviser/pipeline/adviser.hpp"

namespace adviser::io {

using json = nlohmann::json;

// Keys are sorted (std::map) and numbers print in shortest round-trip form,
// so equal values always serialise to equal bytes.
inline std::string canonical(const json& j) { return j.dump(2) + "\n"; }

inline json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path);
  out << bytes;
}

namespace detail {

inline const json& member(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw InputError(where + "." + key + ": missing");
  return *it;
}

inline double num(const json& j, const char* key, const std::string& where) {
  const json& v = member(j, key, where);
  if (!v.is_number()) throw InputError(where + "." + key + ": expected a number");
  return v.get<double>();
}

inline int integer(const json& j, const char* key, const std::string& where) {
  const json& v = member(j, key, where);
  if (!v.is_number_integer()) throw InputError(where + "." + key + ": expected an integer");
  return v.get<int>();
}

inline bool boolean(const json& j, const char* key, const std::string& where) {
  const json& v = member(j, key, where);
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number_integer() && (v == 0 || v == 1)) return v == 1;
  throw InputError(where + "." + key + ": expected a boolean");
}

inline const json& array(const json& j, const char* key, const std::string& where) {
  const json& v = member(j, key, where);
  if (!v.is_array()) throw InputError(where + "." + key + ": expected an array");
  return v;
}

inline std::string at(const std::string& where, const char* key, std::size_t i) {
  return where + "." + key + "[" + std::to_string(i) + "]";
}

}  // namespace detail

inline json money_json(Money m) { return m.in_units(); }

inline Money money_from(const json& j, const char* key, const std::string& where) {
  const double u = detail::num(j, key, where);
  const Money m = Money::units(u);
  if (std::abs(m.in_units() - u) > 1e-9) throw InputError(where + "." + key + ": money has at most one decimal place");
  return m;
}

inline json costs_json(const CostSchedule& c) {
  return {{"call", money_json(c.call)}, {"voucher", money_json(c.voucher)}, {"drive", money_json(c.drive)}, {"route", money_json(c.route)}};
}

inline CostSchedule costs_from(const json& j, const std::string& where) {
  return {money_from(j, "call", where), money_from(j, "voucher", where), money_from(j, "drive", where), money_from(j, "route", where)};
}

inline json probabilities_json(const Probabilities& p) { return json::array({p.none, p.call, p.voucher, p.bus, p.drive}); }

// ---- instance ----

// An instance that parsed but broke domain rules.
struct InvalidInstance : ValidationError {
  explicit InvalidInstance(std::vector<Violation> v) : ValidationError(summary(v)), violations(std::move(v)) {}
  std::vector<Violation> violations;

  static std::string summary(const std::vector<Violation>& v) {
    std::string msg = "instance failed validation:";
    for (std::size_t i = 0; i < v.size() && i < 5; ++i)
      msg += " [" + v[i].entity + ": " + v[i].rule + (v[i].detail.empty() ? "" : " (" + v[i].detail + ")") + "]";
    if (v.size() > 5) msg += " and " + std::to_string(v.size() - 5) + " more";
    return msg;
  }
};

inline void throw_if_invalid_instance(const Instance& inst) {
  auto v = validate_instance(inst);
  if (!v.empty()) throw InvalidInstance(std::move(v));
}

inline json instance_json(const Instance& inst) {
  json j;
  j["horizon"] = inst.horizon;
  j["budget"] = money_json(inst.budget);
  j["costs"] = costs_json(inst.costs);
  j["drive_radius_km"] = inst.drive_radius_km;
  j["drive_capacity"] = inst.drive_capacity;
  j["drive_cap"] = inst.drive_cap ? json(*inst.drive_cap) : json(nullptr);
  j["grid"] = {{"south_west", {{"lat", inst.grid.south_west().lat}, {"lon", inst.grid.south_west().lon}}},
               {"rows", inst.grid.rows()},
               {"cols", inst.grid.cols()},
               {"cell_km", inst.grid.cell_size_km()}};
  json buses = json::array();
  for (const auto& b : inst.fleet.buses) buses.push_back({{"id", b.id}, {"depot_id", b.depot_id}});
  j["fleet"] = {{"capacity", inst.fleet.capacity}, {"buses", buses}};
  json depots = json::array();
  for (const auto& d : inst.depots) depots.push_back({{"id", d.id}, {"lat", d.location.lat}, {"lon", d.location.lon}});
  j["depots"] = depots;
  json centers = json::array();
  for (const auto& c : inst.centers)
    centers.push_back({{"id", c.id}, {"lat", c.location.lat}, {"lon", c.location.lon}, {"dropoff_earliest", c.dropoff_window.earliest},
                       {"dropoff_latest", c.dropoff_window.latest}, {"depot_id", c.depot_id}});
  j["centers"] = centers;
  json mothers = json::array();
  for (std::size_t i = 0; i < inst.mothers.size(); ++i) {
    const Mother& m = inst.mothers[i];
    mothers.push_back({{"id", m.id},
                       {"lat", m.location.lat},
                       {"lon", m.location.lon},
                       {"elig_start", m.eligibility.first_day},
                       {"elig_end", m.eligibility.last_day},
                       {"pickup_earliest", m.pickup_window.earliest},
                       {"pickup_latest", m.pickup_window.latest},
                       {"income_level", m.features.income_level},
                       {"child_age_months", m.features.child_age_months},
                       {"prior_reminder", m.features.prior_reminder},
                       {"prior_vaccination", m.features.prior_vaccination},
                       {"p", probabilities_json(inst.probabilities.at(i))}});
  }
  j["mothers"] = mothers;
  return j;
}

// Cells are recomputed from the grid; the result is not validated here.
inline Instance instance_from_json(const json& j, const std::string& where = "instance") {
  using namespace detail;
  Instance inst;
  inst.horizon = integer(j, "horizon", where);
  inst.budget = money_from(j, "budget", where);
  inst.costs = costs_from(member(j, "costs", where), where + ".costs");
  inst.drive_radius_km = num(j, "drive_radius_km", where);
  inst.drive_capacity = integer(j, "drive_capacity", where);
  if (auto it = j.find("drive_cap"); it != j.end() && !it->is_null()) inst.drive_cap = integer(j, "drive_cap", where);

  const std::string gw = where + ".grid";
  const json& g = member(j, "grid", where);
  const json& sw = member(g, "south_west", gw);
  inst.grid = Grid({num(sw, "lat", gw + ".south_west"), num(sw, "lon", gw + ".south_west")}, integer(g, "rows", gw), integer(g, "cols", gw),
                   num(g, "cell_km", gw));

  const std::string fw = where + ".fleet";
  const json& f = member(j, "fleet", where);
  inst.fleet.capacity = integer(f, "capacity", fw);
  const json& buses = array(f, "buses", fw);
  for (std::size_t i = 0; i < buses.size(); ++i) {
    const auto w = at(fw, "buses", i);
    inst.fleet.buses.push_back({integer(buses[i], "id", w), integer(buses[i], "depot_id", w)});
  }
  const json& depots = array(j, "depots", where);
  for (std::size_t i = 0; i < depots.size(); ++i) {
    const auto w = at(where, "depots", i);
    inst.depots.push_back({integer(depots[i], "id", w), {num(depots[i], "lat", w), num(depots[i], "lon", w)}});
  }
  const json& centers = array(j, "centers", where);
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const auto w = at(where, "centers", i);
    const json& c = centers[i];
    inst.centers.push_back({integer(c, "id", w), {num(c, "lat", w), num(c, "lon", w)},
                            {integer(c, "dropoff_earliest", w), integer(c, "dropoff_latest", w)}, integer(c, "depot_id", w)});
  }
  const json& mothers = array(j, "mothers", where);
  for (std::size_t i = 0; i < mothers.size(); ++i) {
    const auto w = at(where, "mothers", i);
    const json& mj = mothers[i];
    Mother m;
    m.id = integer(mj, "id", w);
    m.location = {num(mj, "lat", w), num(mj, "lon", w)};
    m.cell = inst.grid.cell_of(m.location);
    m.eligibility = {integer(mj, "elig_start", w), integer(mj, "elig_end", w)};
    m.pickup_window = {integer(mj, "pickup_earliest", w), integer(mj, "pickup_latest", w)};
    m.features.income_level = integer(mj, "income_level", w);
    m.features.child_age_months = integer(mj, "child_age_months", w);
    m.features.prior_reminder = boolean(mj, "prior_reminder", w);
    m.features.prior_vaccination = boolean(mj, "prior_vaccination", w);
    const json& p = array(mj, "p", w);
    if (p.size() != 5) throw InputError(w + ".p: expected 5 probabilities (none, call, voucher, bus, drive)");
    for (const auto& x : p)
      if (!x.is_number()) throw InputError(w + ".p: expected numbers");
    inst.mothers.push_back(m);
    inst.probabilities.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>(), p[3].get<double>(), p[4].get<double>()});
  }
  inst.reindex();
  return inst;
}

// ---- allocation ----

inline json counts_json(const Instance& inst, const Allocation& a) {
  const InterventionCounts c = count_interventions(a);
  int assigned = 0;
  for (auto k : kAllInterventions)
    if (k != Intervention::None) assigned += c[k];
  return {{"none", static_cast<int>(inst.mothers.size()) - assigned},
          {"call", c[Intervention::PhoneCall]},
          {"voucher", c[Intervention::TravelVoucher]},
          {"bus", c[Intervention::BusPickup]},
          {"drive", c[Intervention::VaccineDrive]},
          {"drives", c.drives},
          {"routes", c.routes}};
}

inline std::string_view node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Depot: return "depot";
    case NodeKind::Pickup: return "pickup";
    case NodeKind::Dropoff: return "dropoff";
  }
  return "depot";
}

inline json route_plan_json(const RoutePlan& p) {
  json nodes = json::array();
  for (const auto& n : p.nodes)
    nodes.push_back({{"kind", node_kind_name(n.kind)}, {"ref", n.ref}, {"lat", n.location.lat}, {"lon", n.location.lon},
                     {"earliest", n.window.earliest}, {"latest", n.window.latest}});
  return {{"route_id", p.route_id}, {"day", p.day}, {"center_id", p.center_id}, {"depot_id", p.depot_id}, {"nodes", nodes},
          {"arrivals", p.arrivals}, {"picked", p.picked}, {"utility", p.utility}, {"feasible", p.feasible}};
}

inline RoutePlan route_plan_from(const json& j, const std::string& w) {
  using namespace detail;
  RoutePlan p;
  p.route_id = integer(j, "route_id", w);
  p.day = integer(j, "day", w);
  p.center_id = integer(j, "center_id", w);
  p.depot_id = integer(j, "depot_id", w);
  const json& nodes = array(j, "nodes", w);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto nw = at(w, "nodes", i);
    const json& n = nodes[i];
    RoutingNode node;
    const std::string kind = member(n, "kind", nw).get<std::string>();
    if (kind == "depot") node.kind = NodeKind::Depot;
    else if (kind == "pickup") node.kind = NodeKind::Pickup;
    else if (kind == "dropoff") node.kind = NodeKind::Dropoff;
    else throw InputError(nw + ".kind: unknown node kind '" + kind + "'");
    node.ref = integer(n, "ref", nw);
    node.location = {num(n, "lat", nw), num(n, "lon", nw)};
    node.window = {integer(n, "earliest", nw), integer(n, "latest", nw)};
    p.nodes.push_back(node);
  }
  p.arrivals = array(j, "arrivals", w).get<std::vector<double>>();
  p.picked = array(j, "picked", w).get<std::vector<int>>();
  p.utility = num(j, "utility", w);
  p.feasible = boolean(j, "feasible", w);
  return p;
}

inline json allocation_json(const Instance& inst, const Allocation& a) {
  json assignments = json::array();
  for (const auto& s : a.assignments) {
    json e = {{"mother_id", s.mother_id}, {"kind", intervention_name(s.kind)}, {"day", s.day}};
    if (s.kind == Intervention::VaccineDrive) e["cell"] = s.cell;
    if (s.kind == Intervention::BusPickup) e["bus_id"] = s.bus_id, e["route_id"] = s.route_id;
    assignments.push_back(e);
  }
  json drives = json::array();
  for (const auto& d : a.drives) drives.push_back({{"cell", d.cell}, {"day", d.day}, {"mother_ids", d.mother_ids}});
  json routes = json::array();
  for (const auto& r : a.routes)
    routes.push_back({{"day", r.day}, {"bus_id", r.bus_id}, {"route_id", r.route_id}, {"plan", route_plan_json(r.plan)}});
  return {{"objective", a.objective},
          {"total_cost", money_json(a.total_cost)},
          {"counts", counts_json(inst, a)},
          {"assignments", assignments},
          {"drives", drives},
          {"routes", routes}};
}

inline Allocation allocation_from_json(const json& j, const std::string& where = "allocation") {
  using namespace detail;
  Allocation a;
  a.objective = num(j, "objective", where);
  a.total_cost = money_from(j, "total_cost", where);
  const json& as = array(j, "assignments", where);
  for (std::size_t i = 0; i < as.size(); ++i) {
    const auto w = at(where, "assignments", i);
    Assignment s;
    s.mother_id = integer(as[i], "mother_id", w);
    const auto kind = parse_intervention(member(as[i], "kind", w).get<std::string>());
    if (!kind) throw InputError(w + ".kind: unknown intervention");
    s.kind = *kind;
    s.day = integer(as[i], "day", w);
    if (s.kind == Intervention::VaccineDrive) s.cell = integer(as[i], "cell", w);
    if (s.kind == Intervention::BusPickup) s.bus_id = integer(as[i], "bus_id", w), s.route_id = integer(as[i], "route_id", w);
    a.assignments.push_back(s);
  }
  const json& ds = array(j, "drives", where);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto w = at(where, "drives", i);
    a.drives.push_back({integer(ds[i], "cell", w), integer(ds[i], "day", w), array(ds[i], "mother_ids", w).get<std::vector<int>>()});
  }
  const json& rs = array(j, "routes", where);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const auto w = at(where, "routes", i);
    a.routes.push_back({integer(rs[i], "day", w), integer(rs[i], "bus_id", w), integer(rs[i], "route_id", w),
                        route_plan_from(member(rs[i], "plan", w), w + ".plan")});
  }
  return a;
}

// ---- reports ----

inline json violations_json(const std::vector<Violation>& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back({{"entity", x.entity}, {"rule", x.rule}, {"detail", x.detail}});
  return out;
}

// Plan summary without wall times; timings go to a separate sidecar so the
// main output is reproducible byte for byte.
inline json plan_summary_json(const Instance& inst, const PlanResult& r) {
  return {{"objective", r.allocation.objective},
          {"total_cost", money_json(r.allocation.total_cost)},
          {"budget", money_json(inst.budget)},
          {"population", inst.mothers.size()},
          {"coverage", inst.mothers.empty() ? 0.0 : r.allocation.objective / static_cast<double>(inst.mothers.size())},
          {"counts", counts_json(inst, r.allocation)},
          {"pruning", {{"drives", r.prune.drives.size()},
                       {"iterations", r.prune.iterations},
                       {"stop", prune_stop_name(r.prune.stop)},
                       {"remaining_mothers", r.prune.remaining_mothers.size()},
                       {"remaining_budget", money_json(r.prune.remaining_budget)}}},
          {"ilp", {{"columns", r.model_columns},
                   {"rows", r.model_rows},
                   {"status", solve_status_name(r.solution.status)},
                   {"objective", r.solution.objective},
                   {"bound", r.solution.bound},
                   {"nodes", r.solution.nodes}}}};
}

inline json timings_json(const PlanTimings& t) {
  return {{"prune_s", t.prune_s}, {"routing_s", t.routing_s}, {"ilp_s", t.ilp_s}, {"total_s", t.total_s}};
}

inline json bound_report_json(const BoundReport& r) {
  return {{"o_h", r.o_h},
          {"o_star", r.o_star},
          {"k", r.k},
          {"m_vh", r.m_vh},
          {"m_vi", r.m_vi},
          {"gap_term", r.gap_term},
          {"proposition1", {{"lhs", r.prop1_lhs}, {"rhs", r.prop1_rhs}, {"assumptions_hold", r.assumptions_hold}, {"holds", r.prop1_holds}}},
          {"theorem_holds", r.theorem_holds},
          {"leaves", r.leaves}};
}

}  // namespace adviser::io
