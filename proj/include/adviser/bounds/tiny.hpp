#pragma once

#include <algorithm>

#include "adviser/bounds/brute_force.hpp"
#include "adviser/core/random.hpp"
#include "adviser/core/validate.hpp"
#include "adviser/routing/pool.hpp"

namespace adviser {

// Probabilities on a 1/256 lattice so that sums are exact in binary floating
// point and two optimisers that reach the same optimum agree to the bit.
inline Probabilities dyadic_probabilities(Rng& rng) {
  int v[4];
  for (int& x : v) x = static_cast<int>(rng.below(257));
  std::sort(v, v + 4);
  return {v[0] / 256.0, v[1] / 256.0, v[2] / 256.0, v[3] / 256.0, 1.0};
}

inline RoutePool tiny_pool(const Instance& inst) {
  RoutingConfig rc;
  rc.gls.max_evaluations = 500;
  return generate_route_pool(inst, all_mother_ids(inst), rc);
}

struct TinySpec {
  int max_mothers = 8;
  int max_cells = 3;
  int max_days = 2;
  bool cheap_drives = false;  // drive cost close to two vouchers
};

// Random instance with <= 8 mothers, <= 3 cells, <= 2 days and one center
// (so <= 2 candidate routes), resampled until brute force is within its cap.
inline Instance tiny_instance(std::uint64_t seed, const TinySpec& spec = {}) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng(split_seed(seed, attempt));
    Instance inst;
    const int cells = rng.uniform_int(1, spec.max_cells);
    inst.grid = Grid({7.30, 3.85}, 1, cells, 1.0);
    inst.horizon = rng.uniform_int(1, spec.max_days);
    inst.drive_radius_km = rng.uniform(0.6, 1.6);
    inst.drive_capacity = rng.uniform_int(2, 6);
    inst.fleet.capacity = rng.uniform_int(2, 4);
    if (rng.bernoulli(0.2)) inst.drive_cap = rng.uniform_int(0, 2);
    if (spec.cheap_drives) {
      inst.costs = {Money::tenths(1), Money::tenths(11), Money::tenths(rng.uniform_int(15, 30)), Money::tenths(rng.uniform_int(31, 45))};
    } else {
      inst.costs = {Money::tenths(1), Money::tenths(11), Money::tenths(rng.uniform_int(20, 40)), Money::tenths(rng.uniform_int(41, 60))};
    }
    inst.budget = Money::tenths(rng.uniform_int(0, 120));
    const auto proj = inst.grid.projection();
    inst.depots.push_back({1, proj.unproject({0.05, 0.5})});
    inst.centers.push_back({1, proj.unproject({rng.uniform(0, cells), rng.uniform(0.2, 0.8)}), {480, 600}, 1});
    inst.fleet.buses.push_back({1, 1});
    const int n = rng.uniform_int(1, spec.max_mothers);
    for (int i = 1; i <= n; ++i) {
      Mother m;
      m.id = i;
      m.location = proj.unproject({rng.uniform(0, cells), rng.uniform(0, 1)});
      m.cell = inst.grid.cell_of(m.location);
      const int first = rng.uniform_int(1, inst.horizon);
      m.eligibility = {first, rng.uniform_int(first, inst.horizon)};
      const int e = rng.uniform_int(380, 560);
      m.pickup_window = {e, e + rng.uniform_int(5, 90)};
      m.features = {static_cast<int>(rng.below(5)), rng.uniform_int(0, 23), rng.bernoulli(0.5), rng.bernoulli(0.5)};
      inst.mothers.push_back(m);
      inst.probabilities.push_back(dyadic_probabilities(rng));
    }
    inst.reindex();
    const RoutePool pool = tiny_pool(inst);
    if (brute_force_size(inst, pool) <= kBruteForceCap) return inst;
  }
}

}  // namespace adviser
