#pragma once

#include <atomic>
#include <thread>
#include <vector>

#include "adviser/core/instance.hpp"
#include "adviser/core/random.hpp"
#include "adviser/routing/gls.hpp"
#include "adviser/routing/insertion.hpp"

namespace adviser {

// Gain of busing a mother over doing nothing: p_l - p_n.
inline double node_utility(const Instance& inst, int mother_id) { return inst.probs(mother_id).gain(Intervention::BusPickup); }

struct RoutingConfig {
  TravelModel travel;
  TimeWindow depot_window{360, 1440};
  double candidate_radius_km = 40.0;
  GlsConfig gls;
  int threads = 1;
};

// One plan per (day, center); plans[route_id] with
// route_id = (day - 1) * |centers| + center index. Every plan starts at the
// center's depot, so bus f may operate plan r iff their depots match.
struct RoutePool {
  int horizon = 0;
  int centers = 0;
  std::vector<RoutePlan> plans;

  int route_id(int day, int center_index) const { return (day - 1) * centers + center_index; }
  const RoutePlan& plan(int route_id) const { return plans.at(static_cast<std::size_t>(route_id)); }

  // s_mtfr membership oracle.
  bool serves(const Instance& inst, int mother_id, int day, int bus_id, int route) const {
    if (route < 0 || route >= static_cast<int>(plans.size())) return false;
    const RoutePlan& p = plans[static_cast<std::size_t>(route)];
    const Bus* b = inst.bus(bus_id);
    return b && p.day == day && p.depot_id == b->depot_id && p.picks(mother_id);
  }
};

inline RouteProblem make_route_problem(const Instance& inst, const std::vector<int>& mother_ids, int day, int center_index,
                                       const RoutingConfig& cfg) {
  const VaccinationCenter& c = inst.centers[static_cast<std::size_t>(center_index)];
  RouteProblem p;
  p.day = day;
  p.route_id = (day - 1) * static_cast<int>(inst.centers.size()) + center_index;
  p.center = c;
  const Depot* d = inst.depot(c.depot_id);
  if (!d) throw InputError("center " + std::to_string(c.id) + " references unknown depot");
  p.depot = *d;
  p.depot_window = cfg.depot_window;
  p.capacity = inst.fleet.capacity;
  p.travel = cfg.travel;
  for (int id : mother_ids) {
    const Mother& m = inst.mother(id);
    if (!m.eligibility.contains(day)) continue;
    if (haversine_km(m.location, c.location) > cfg.candidate_radius_km) continue;
    const double u = node_utility(inst, id);
    if (!(u > 0.0)) continue;
    p.candidates.push_back({id, m.location, m.pickup_window, u});
  }
  return p;
}

inline RoutePlan solve_route_problem(const RouteProblem& p, const GlsConfig& gls) {
  auto seq = cheapest_insertion_sequence(p);
  if (!p.candidates.empty()) seq = guided_local_search(p, seq, gls);
  return p.make_plan(seq);
}

// Solves every (day, center) VRP over the given mothers. Tasks are
// independent and seeded by route id, so the pool does not depend on the
// thread count.
inline RoutePool generate_route_pool(const Instance& inst, const std::vector<int>& mother_ids, const RoutingConfig& cfg) {
  RoutePool pool;
  pool.horizon = inst.horizon;
  pool.centers = static_cast<int>(inst.centers.size());
  const int total = pool.horizon * pool.centers;
  pool.plans.resize(static_cast<std::size_t>(total));
  std::atomic<int> next{0};
  auto work = [&]() {
    for (int r = next++; r < total; r = next++) {
      const int day = r / pool.centers + 1, ci = r % pool.centers;
      const auto problem = make_route_problem(inst, mother_ids, day, ci, cfg);
      GlsConfig gls = cfg.gls;
      gls.seed = split_seed(cfg.gls.seed, static_cast<std::uint64_t>(r));
      pool.plans[static_cast<std::size_t>(r)] = solve_route_problem(problem, gls);
    }
  };
  const int threads = std::max(1, std::min(cfg.threads, total));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> ts;
    for (int i = 0; i < threads; ++i) ts.emplace_back(work);
    for (auto& t : ts) t.join();
  }
  return pool;
}

inline std::vector<int> all_mother_ids(const Instance& inst) {
  std::vector<int> ids;
  ids.reserve(inst.mothers.size());
  for (const auto& m : inst.mothers) ids.push_back(m.id);
  return ids;
}

}  // namespace adviser
