#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <vector>

#include "adviser/core/error.hpp"
#include "adviser/core/validate.hpp"
#include "adviser/routing/pool.hpp"

namespace adviser {

struct RwbConfig {
  std::vector<int> neighbourhood_cells;  // empty: the most populous cells
  int neighbourhoods = 33;
  double walking_radius_km = 1.0;
  double voucher_distance_km = 10.0;
  // Budget caps for the fixed drive and bus stages; unspent money carries
  // forward. Vouchers, then calls, take whatever is left.
  double drive_share = 0.5;
  double bus_share = 0.3;
  RoutingConfig routing;
};

// The `count` cells holding the most mothers (ties: lower index).
inline std::vector<int> most_populous_cells(const Instance& inst, int count) {
  std::vector<int> population(static_cast<std::size_t>(inst.grid.size()), 0);
  for (const auto& m : inst.mothers)
    if (m.cell >= 0 && m.cell < inst.grid.size()) ++population[static_cast<std::size_t>(m.cell)];
  std::vector<int> cells(population.size());
  for (int g = 0; g < inst.grid.size(); ++g) cells[static_cast<std::size_t>(g)] = g;
  std::stable_sort(cells.begin(), cells.end(), [&](int a, int b) { return population[static_cast<std::size_t>(a)] > population[static_cast<std::size_t>(b)]; });
  cells.resize(std::min(cells.size(), static_cast<std::size_t>(std::max(0, count))));
  return cells;
}

namespace detail {

inline int first_eligible_day(const Instance& inst, const Mother& m) {
  const int d = std::max(1, m.eligibility.first_day);
  return d <= std::min(inst.horizon, m.eligibility.last_day) ? d : 0;
}

// Distance from p to segment ab in the plane, and the position along it.
inline std::pair<double, double> segment_distance(PlanarPoint p, PlanarPoint a, PlanarPoint b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double s = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  const double qx = a.x + s * dx - p.x, qy = a.y + s * dy - p.y;
  return {std::sqrt(qx * qx + qy * qy), s};
}

}  // namespace detail

// Rule-based allocation in four stages: drives at fixed neighbourhood cells
// on odd days, round-robin bus routes along fixed depot-to-center lines,
// vouchers to far-away mothers poorest first, calls youngest child first.
inline Allocation rwb_allocate(const Instance& inst, const RwbConfig& cfg = {}) {
  const std::vector<int> cells = cfg.neighbourhood_cells.empty() ? most_populous_cells(inst, cfg.neighbourhoods) : cfg.neighbourhood_cells;
  for (int g : cells)
    if (g < 0 || g >= inst.grid.size()) throw ConfigError("neighbourhood cell " + std::to_string(g) + " is not on the grid");
  if (cfg.drive_share < 0 || cfg.bus_share < 0 || cfg.drive_share + cfg.bus_share > 1) throw ConfigError("stage shares must be non-negative and sum to at most 1");

  const auto M = inst.mothers.size();
  std::vector<char> taken(M, 0);
  Allocation a;
  Money spent;
  const Money budget = inst.budget;
  const auto share = [&](double f) { return Money::tenths(static_cast<std::int64_t>(std::floor(budget.in_tenths() * f))); };
  const LocalProjection proj = inst.grid.projection();

  // 1. Drives.
  const Money drive_budget = share(cfg.drive_share);
  for (int t = 1; t <= inst.horizon; t += 2)
    for (int g : cells) {
      if (spent + inst.costs.drive > drive_budget) break;
      if (inst.drive_cap && static_cast<int>(a.drives.size()) >= *inst.drive_cap) break;
      std::vector<std::pair<double, std::size_t>> near;
      for (std::size_t i = 0; i < M; ++i) {
        if (taken[i] || !inst.mothers[i].eligibility.contains(t)) continue;
        const double d = inst.grid.distance_km(inst.mothers[i].location, g);
        if (d <= inst.drive_radius_km) near.emplace_back(d, i);
      }
      if (near.empty()) continue;
      std::sort(near.begin(), near.end());
      if (static_cast<int>(near.size()) > inst.drive_capacity) near.resize(static_cast<std::size_t>(inst.drive_capacity));
      DriveRecord rec{g, t, {}};
      for (auto [d, i] : near) {
        taken[i] = 1;
        rec.mother_ids.push_back(inst.mothers[i].id);
        a.assignments.push_back({inst.mothers[i].id, Intervention::VaccineDrive, t, g});
      }
      a.drives.push_back(std::move(rec));
      spent += inst.costs.drive;
    }

  // 2. Buses: bus j of a depot serves that depot's centers in turn.
  const Money bus_budget = drive_budget + share(cfg.bus_share);
  std::map<int, std::vector<int>> centers_of_depot;  // depot id -> center indices
  for (std::size_t c = 0; c < inst.centers.size(); ++c) centers_of_depot[inst.centers[c].depot_id].push_back(static_cast<int>(c));
  std::map<int, int> rank_in_depot;
  for (const auto& b : inst.fleet.buses) {
    int r = 0;
    for (const auto& o : inst.fleet.buses) r += o.depot_id == b.depot_id && o.id < b.id;
    rank_in_depot[b.id] = r;
  }
  std::vector<Bus> buses = inst.fleet.buses;
  std::sort(buses.begin(), buses.end(), [](const Bus& x, const Bus& y) { return x.id < y.id; });
  for (int t = 1; t <= inst.horizon; ++t)
    for (const auto& bus : buses) {
      if (spent + inst.costs.route > bus_budget) break;
      const auto it = centers_of_depot.find(bus.depot_id);
      if (it == centers_of_depot.end()) continue;
      const auto& cs = it->second;
      const int c = cs[static_cast<std::size_t>((rank_in_depot[bus.id] + t - 1) % static_cast<int>(cs.size()))];
      RouteProblem p = make_route_problem(inst, {}, t, c, cfg.routing);
      const PlanarPoint a0 = proj.project(p.depot.location), a1 = proj.project(p.center.location);
      std::vector<std::tuple<double, int, std::size_t>> along;  // position, id, index
      for (std::size_t i = 0; i < M; ++i) {
        if (taken[i] || !inst.mothers[i].eligibility.contains(t)) continue;
        auto [d, s] = detail::segment_distance(proj.project(inst.mothers[i].location), a0, a1);
        if (d <= cfg.walking_radius_km) along.emplace_back(s, inst.mothers[i].id, i);
      }
      std::sort(along.begin(), along.end());
      std::vector<int> seq;
      std::vector<std::size_t> chosen;
      for (auto [s, id, i] : along) {
        if (static_cast<int>(seq.size()) >= inst.fleet.capacity) break;
        p.candidates.push_back({id, inst.mothers[i].location, inst.mothers[i].pickup_window, inst.probabilities[i].gain(Intervention::BusPickup)});
        seq.push_back(static_cast<int>(p.candidates.size()) - 1);
        if (!p.schedule(seq)) {
          seq.pop_back();
          continue;
        }
        chosen.push_back(i);
      }
      if (chosen.empty()) continue;
      const RoutePlan plan = p.make_plan(seq);
      a.routes.push_back({t, bus.id, plan.route_id, plan});
      for (std::size_t i : chosen) {
        taken[i] = 1;
        a.assignments.push_back({inst.mothers[i].id, Intervention::BusPickup, t, -1, bus.id, plan.route_id});
      }
      spent += inst.costs.route;
    }

  // 3. Vouchers for mothers far from every center, lowest income first.
  std::vector<std::size_t> far;
  for (std::size_t i = 0; i < M; ++i) {
    if (taken[i] || !detail::first_eligible_day(inst, inst.mothers[i])) continue;
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& c : inst.centers) nearest = std::min(nearest, haversine_km(inst.mothers[i].location, c.location));
    if (nearest > cfg.voucher_distance_km) far.push_back(i);
  }
  std::stable_sort(far.begin(), far.end(), [&](std::size_t x, std::size_t y) {
    const auto& fx = inst.mothers[x].features;
    const auto& fy = inst.mothers[y].features;
    return fx.income_level != fy.income_level ? fx.income_level < fy.income_level : inst.mothers[x].id < inst.mothers[y].id;
  });
  for (std::size_t i : far) {
    if (spent + inst.costs.voucher > budget) break;
    taken[i] = 1;
    a.assignments.push_back({inst.mothers[i].id, Intervention::TravelVoucher, detail::first_eligible_day(inst, inst.mothers[i])});
    spent += inst.costs.voucher;
  }

  // 4. Calls, youngest child first.
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < M; ++i)
    if (!taken[i] && detail::first_eligible_day(inst, inst.mothers[i])) rest.push_back(i);
  std::stable_sort(rest.begin(), rest.end(), [&](std::size_t x, std::size_t y) {
    const int ax = inst.mothers[x].features.child_age_months, ay = inst.mothers[y].features.child_age_months;
    return ax != ay ? ax < ay : inst.mothers[x].id < inst.mothers[y].id;
  });
  for (std::size_t i : rest) {
    if (spent + inst.costs.call > budget) break;
    a.assignments.push_back({inst.mothers[i].id, Intervention::PhoneCall, detail::first_eligible_day(inst, inst.mothers[i])});
    spent += inst.costs.call;
  }

  a.total_cost = allocation_cost(inst, a);
  a.objective = objective_unchecked(inst, a);
  return a;
}

}  // namespace adviser
