#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "adviser/core/instance.hpp"
#include "adviser/core/random.hpp"
#include "adviser/estimation/synthetic.hpp"

namespace adviser {

// Service geography and resources laid over a synthetic population.
struct ScenarioSpec {
  int centers = 32;
  int depots = 4;
  int buses_per_depot = 1;
  int bus_capacity = 30;
  TimeWindow dropoff_window{480, 960};
  double center_margin_km = 0.5;
  Money budget = Money::units(350);
  CostSchedule costs;
  double drive_radius_km = 2.0;
  int drive_capacity = 100;
  std::optional<int> drive_cap;
};

namespace detail {
inline constexpr std::uint64_t kSiteStream = 5;
}

// Depots sit at the centres of a near-square arrangement of equal blocks;
// each center is served from its nearest depot (ties: lower depot id).
inline std::vector<Depot> place_depots(const PopulationLayout& l, const LocalProjection& proj, int count) {
  int cols = 1;
  while (cols * cols < count) ++cols;
  const int rows = (count + cols - 1) / cols;
  std::vector<Depot> out;
  for (int i = 0; i < count; ++i) {
    const int r = i / cols, c = i % cols;
    out.push_back({i + 1, proj.unproject({(c + 0.5) * l.width_km / cols, (r + 0.5) * l.height_km / rows})});
  }
  return out;
}

inline int nearest_depot(const std::vector<Depot>& depots, GeoPoint p) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& d : depots) {
    const double dist = haversine_km(p, d.location);
    if (dist < best_d) best_d = dist, best = d.id;
  }
  return best;
}

inline Instance build_instance(const SyntheticSpec& syn, const Population& pop, const ScenarioSpec& sc) {
  if (sc.centers < 1 || sc.depots < 1 || sc.buses_per_depot < 0) throw ConfigError("scenario needs centers and depots");
  const auto& l = syn.layout;
  Instance inst;
  inst.grid = layout_grid(l);
  inst.horizon = l.horizon;
  inst.budget = sc.budget;
  inst.costs = sc.costs;
  inst.drive_radius_km = sc.drive_radius_km;
  inst.drive_capacity = sc.drive_capacity;
  inst.drive_cap = sc.drive_cap;
  inst.fleet.capacity = sc.bus_capacity;
  const LocalProjection proj = inst.grid.projection();

  inst.depots = place_depots(l, proj, sc.depots);
  Rng rng(split_seed(syn.seed, detail::kSiteStream));
  const double m = sc.center_margin_km;
  for (int i = 0; i < sc.centers; ++i) {
    const GeoPoint at = proj.unproject({rng.uniform(m, l.width_km - m), rng.uniform(m, l.height_km - m)});
    inst.centers.push_back({i + 1, at, sc.dropoff_window, nearest_depot(inst.depots, at)});
  }
  int bus_id = 1;
  for (const auto& d : inst.depots)
    for (int k = 0; k < sc.buses_per_depot; ++k) inst.fleet.buses.push_back({bus_id++, d.id});

  inst.mothers = pop.mothers;
  inst.probabilities = pop.table;
  inst.reindex();
  return inst;
}

inline Instance generate_instance(const SyntheticSpec& syn, const ScenarioSpec& sc) {
  return build_instance(syn, generate_population(syn), sc);
}

// Budgets are quoted for 40000 mothers and scaled linearly to the population.
inline Money scaled_budget(double full_scale_units, int population, int full_population = 40000) {
  return Money::units(full_scale_units * population / full_population);
}

}  // namespace adviser
