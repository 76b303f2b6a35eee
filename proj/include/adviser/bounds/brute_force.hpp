#pragma once

#include <map>
#include <set>
#include <vector>

#include "adviser/core/allocation.hpp"
#include "adviser/core/error.hpp"
#include "adviser/core/instance.hpp"
#include "adviser/core/validate.hpp"
#include "adviser/routing/pool.hpp"

namespace adviser {

struct BruteForceResult {
  Allocation allocation;
  double objective = 0.0;
  double leaves = 0;  // complete assignments examined
};

inline constexpr double kBruteForceCap = 1e7;

namespace detail {

// One concrete choice for one mother.
struct Option {
  Intervention kind = Intervention::None;
  int day = 0;
  int cell = -1;
  int bus = -1;
  int route = -1;
  double p = 0.0;
  std::int64_t own_tenths = 0;
};


inline std::vector<std::vector<Option>> brute_force_options(const Instance& inst, const RoutePool& pool, double& product) {
  const std::size_t M = inst.mothers.size();
  const std::int64_t budget = inst.budget.in_tenths();
  std::vector<std::vector<Option>> options(M);
  product = 1;
  for (std::size_t i = 0; i < M; ++i) {
    const Mother& m = inst.mothers[i];
    const Probabilities& p = inst.probabilities[i];
    auto& opts = options[i];
    opts.push_back({Intervention::None, 0, -1, -1, -1, p.none, 0});
    const int first = std::max(1, m.eligibility.first_day), last = std::min(inst.horizon, m.eligibility.last_day);
    if (first <= last) {
      if (inst.costs.call.in_tenths() <= budget) opts.push_back({Intervention::PhoneCall, first, -1, -1, -1, p.call, inst.costs.call.in_tenths()});
      if (inst.costs.voucher.in_tenths() <= budget)
        opts.push_back({Intervention::TravelVoucher, first, -1, -1, -1, p.voucher, inst.costs.voucher.in_tenths()});
      if (inst.costs.drive.in_tenths() <= budget && !(inst.drive_cap && *inst.drive_cap <= 0))
        for (int g = 0; g < inst.grid.size(); ++g) {
          if (inst.grid.distance_km(m.location, g) > inst.drive_radius_km) continue;
          for (int t = first; t <= last; ++t) opts.push_back({Intervention::VaccineDrive, t, g, -1, -1, p.drive, 0});
        }
      if (inst.costs.route.in_tenths() <= budget)
        for (const auto& bus : inst.fleet.buses)
          for (const auto& plan : pool.plans) {
            if (plan.depot_id != bus.depot_id || !plan.feasible || !plan.picks(m.id) || !m.eligibility.contains(plan.day)) continue;
            opts.push_back({Intervention::BusPickup, plan.day, -1, bus.id, plan.route_id, p.bus, 0});
          }
    }
    product *= static_cast<double>(opts.size());
  }
  return options;
}

}  // namespace detail

// Number of complete assignments brute_force_optimum would enumerate before
// cutting.
inline double brute_force_size(const Instance& inst, const RoutePool& pool) {
  double product = 1;
  (void)detail::brute_force_options(inst, pool, product);
  return product;
}

// Exhaustive search over every mother's concrete option: none, a call or a
// voucher (on any eligible day, which never changes cost or value, so day 1
// of eligibility stands for all), a drive at any eligible (cell, day) within
// the radius, or a ride on any (bus, plan) whose stops include her. Drives and
// routes exist iff someone uses them and are paid once. Every capacity,
// bus-day, drive-cap and budget rule is checked directly. Branches whose
// value cannot beat the incumbent even if every later mother got her best
// option are cut, which keeps the first optimum in enumeration order.
inline BruteForceResult brute_force_optimum(const Instance& inst, const RoutePool& pool, double cap = kBruteForceCap) {
  const std::size_t M = inst.mothers.size();
  const std::int64_t budget = inst.budget.in_tenths();
  double product = 1;
  const auto options = detail::brute_force_options(inst, pool, product);
  if (product > cap) throw SizeError("brute force would examine " + std::to_string(product) + " assignments (cap " + std::to_string(cap) + ")");

  // Optimistic tail: best probability each remaining mother could reach.
  std::vector<double> tail(M + 1, 0.0);
  for (std::size_t i = M; i-- > 0;) {
    double best = 0;
    for (const auto& o : options[i]) best = std::max(best, o.p);
    tail[i] = tail[i + 1] + best;
  }

  std::map<std::pair<int, int>, int> drive_load;              // (cell, day) -> riders
  std::map<std::pair<int, int>, int> route_load;              // (bus, route) -> riders
  std::map<std::pair<int, int>, std::pair<int, int>> bus_day;  // (bus, day) -> (route, riders)
  std::vector<int> pick(M, 0), best_pick;
  double best_value = -1.0, leaves = 0;
  std::int64_t spent = 0;
  int open_drives = 0;

  auto rec = [&](auto&& self, std::size_t i, double value) -> void {
    if (i == M) {
      ++leaves;
      if (value > best_value) {
        best_value = value;
        best_pick = pick;
      }
      return;
    }
    if (value + tail[i] <= best_value) return;
    for (std::size_t k = 0; k < options[i].size(); ++k) {
      const detail::Option& o = options[i][k];
      std::int64_t extra = o.own_tenths;
      if (o.kind == Intervention::VaccineDrive) {
        const int load = drive_load[{o.cell, o.day}];
        if (load >= inst.drive_capacity) continue;
        if (load == 0) {
          if (inst.drive_cap && open_drives >= *inst.drive_cap) continue;
          extra += inst.costs.drive.in_tenths();
        }
      } else if (o.kind == Intervention::BusPickup) {
        const int load = route_load[{o.bus, o.route}];
        if (load >= inst.fleet.capacity) continue;
        auto it = bus_day.find({o.bus, o.day});
        if (it != bus_day.end() && it->second.second > 0 && it->second.first != o.route) continue;
        if (load == 0) extra += inst.costs.route.in_tenths();
      }
      if (spent + extra > budget) continue;

      spent += extra;
      if (o.kind == Intervention::VaccineDrive) {
        if (drive_load[{o.cell, o.day}]++ == 0) ++open_drives;
      } else if (o.kind == Intervention::BusPickup) {
        ++route_load[{o.bus, o.route}];
        auto& bd = bus_day[{o.bus, o.day}];
        bd.first = o.route;
        ++bd.second;
      }
      pick[i] = static_cast<int>(k);
      self(self, i + 1, value + o.p);
      if (o.kind == Intervention::VaccineDrive) {
        if (--drive_load[{o.cell, o.day}] == 0) --open_drives;
      } else if (o.kind == Intervention::BusPickup) {
        --route_load[{o.bus, o.route}];
        --bus_day[{o.bus, o.day}].second;
      }
      spent -= extra;
    }
  };
  rec(rec, 0, 0.0);

  BruteForceResult out;
  out.leaves = leaves;
  std::map<std::pair<int, int>, std::vector<int>> drives;
  std::set<std::pair<int, int>> routes;
  for (std::size_t i = 0; i < M; ++i) {
    const detail::Option& o = options[i][static_cast<std::size_t>(best_pick[i])];
    if (o.kind == Intervention::None) continue;
    out.allocation.assignments.push_back({inst.mothers[i].id, o.kind, o.day, o.cell, o.bus, o.route});
    if (o.kind == Intervention::VaccineDrive) drives[{o.cell, o.day}].push_back(inst.mothers[i].id);
    if (o.kind == Intervention::BusPickup) routes.insert({o.bus, o.route});
  }
  for (auto& [key, ids] : drives) out.allocation.drives.push_back({key.first, key.second, ids});
  for (auto [bus, route] : routes) {
    const RoutePlan& plan = pool.plan(route);
    out.allocation.routes.push_back({plan.day, bus, route, plan});
  }
  out.allocation.total_cost = allocation_cost(inst, out.allocation);
  out.objective = out.allocation.objective = objective_unchecked(inst, out.allocation);
  return out;
}

}  // namespace adviser
