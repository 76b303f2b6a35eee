#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "adviser/core/error.hpp"
#include "adviser/core/random.hpp"
#include "adviser/ilp/extract.hpp"
#include "adviser/ilp/model.hpp"
#include "adviser/ilp/solver.hpp"
#include "adviser/pipeline/adviser.hpp"
#include "adviser/routing/pool.hpp"

namespace adviser {

struct ClusterModel {
  int k = 0;
  std::vector<PlanarPoint> centroids;
  std::vector<int> assignment;  // point index -> cluster
  double inertia = 0.0;
  std::vector<double> trace;  // inertia after each Lloyd iteration
  int iterations = 0;
};

inline double squared_distance(PlanarPoint a, PlanarPoint b) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// Lloyd's algorithm from k distinct points drawn uniformly at random. An
// emptied cluster keeps its previous centroid. Nearest-centroid ties go to
// the lower cluster index.
inline ClusterModel kmeans(const std::vector<PlanarPoint>& pts, int k, std::uint64_t seed, int max_iterations = 100) {
  const int n = static_cast<int>(pts.size());
  if (k < 1 || k > n) throw InputError("k = " + std::to_string(k) + " needs 1 <= k <= " + std::to_string(n) + " points");
  Rng rng(seed);
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  ClusterModel cm;
  cm.k = k;
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    cm.centroids.push_back(pts[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])]);
  }
  cm.assignment.assign(static_cast<std::size_t>(n), -1);

  auto inertia = [&]() {
    double s = 0;
    for (int i = 0; i < n; ++i)
      s += squared_distance(pts[static_cast<std::size_t>(i)], cm.centroids[static_cast<std::size_t>(cm.assignment[static_cast<std::size_t>(i)])]);
    return s;
  };
  for (int it = 0; it < max_iterations; ++it) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = squared_distance(pts[static_cast<std::size_t>(i)], cm.centroids[static_cast<std::size_t>(c)]);
        if (d < best_d) best_d = d, best = c;
      }
      if (cm.assignment[static_cast<std::size_t>(i)] != best) cm.assignment[static_cast<std::size_t>(i)] = best, changed = true;
    }
    if (!changed) break;
    std::vector<PlanarPoint> sum(static_cast<std::size_t>(k), {0, 0});
    std::vector<int> count(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(cm.assignment[static_cast<std::size_t>(i)]);
      sum[c].x += pts[static_cast<std::size_t>(i)].x;
      sum[c].y += pts[static_cast<std::size_t>(i)].y;
      ++count[c];
    }
    for (std::size_t c = 0; c < sum.size(); ++c)
      if (count[c]) cm.centroids[c] = {sum[c].x / count[c], sum[c].y / count[c]};
    ++cm.iterations;
    cm.trace.push_back(inertia());
  }
  cm.inertia = inertia();
  return cm;
}

struct ElbowResult {
  int k = 1;
  bool knee = true;
  std::vector<int> ks;
  std::vector<double> inertia;
};

// Kneedle-style: normalise the inertia curve to the unit square and take the
// k farthest below the chord joining its endpoints. A curve with no point
// below the chord returns the midpoint of the range with knee = false.
inline ElbowResult elbow_select_curve(const std::vector<int>& ks, const std::vector<double>& inertia) {
  if (ks.empty() || ks.size() != inertia.size()) throw ConfigError("elbow needs a non-empty k range");
  ElbowResult r;
  r.ks = ks;
  r.inertia = inertia;
  r.k = ks[(ks.size() - 1) / 2];
  r.knee = false;
  if (ks.size() < 3) return r;
  const double x0 = ks.front(), x1 = ks.back();
  const double y0 = inertia.front(), y1 = inertia.back();
  if (!(y0 > y1)) return r;
  double best = 1e-6;
  for (std::size_t i = 1; i + 1 < ks.size(); ++i) {
    const double x = (ks[i] - x0) / (x1 - x0);
    const double y = (inertia[i] - y1) / (y0 - y1);
    const double below = (1.0 - x - y) / std::sqrt(2.0);
    if (below > best) best = below, r.k = ks[i], r.knee = true;
  }
  return r;
}

inline ElbowResult elbow_select(const std::vector<PlanarPoint>& pts, int k_min, int k_max, std::uint64_t seed) {
  k_max = std::min(k_max, static_cast<int>(pts.size()));
  if (k_min < 1 || k_min > k_max) throw ConfigError("empty k range for the elbow method");
  std::vector<int> ks;
  std::vector<double> inertia;
  for (int k = k_min; k <= k_max; ++k) {
    ks.push_back(k);
    inertia.push_back(kmeans(pts, k, split_seed(seed, static_cast<std::uint64_t>(k))).inertia);
  }
  return elbow_select_curve(ks, inertia);
}

struct HilpConfig {
  int k_min = 2;
  int k_max = 20;
  std::optional<int> k;  // skip the elbow search
  std::uint64_t seed = 17;
  RoutingConfig routing;
  SolverConfig solver;
};

struct HilpResult {
  Allocation allocation;
  ClusterModel clusters;
  ElbowResult elbow;
  std::vector<Money> budgets;  // per cluster
  double wall_seconds = 0.0;
};

// Largest-remainder split of `total` in proportion to `sizes`; leftover
// tenths go to the largest remainders, ties to the lower index.
inline std::vector<Money> proportional_split(Money total, const std::vector<int>& sizes) {
  const std::int64_t n = std::accumulate(sizes.begin(), sizes.end(), std::int64_t{0});
  std::vector<Money> out(sizes.size());
  if (n == 0) return out;
  std::vector<std::pair<std::int64_t, std::size_t>> rem;
  std::int64_t given = 0;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    const std::int64_t num = total.in_tenths() * sizes[c];
    out[c] = Money::tenths(num / n);
    given += num / n;
    rem.emplace_back(num % n, c);
  }
  std::sort(rem.begin(), rem.end(), [](auto& a, auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
  for (std::int64_t i = 0; i < total.in_tenths() - given; ++i) out[rem[static_cast<std::size_t>(i)].second] += Money::tenths(1);
  return out;
}

// Cluster mothers geographically, split the budget by cluster size and solve
// one unpruned ILP per cluster over a pool built for that cluster alone.
// Clusters run largest first; bus-days and drive cell-days an earlier
// cluster used are closed to later ones, and the drive cap is shared.
inline HilpResult hilp_allocate(const Instance& inst, const HilpConfig& cfg = {}) {
  const auto start = std::chrono::steady_clock::now();
  HilpResult r;
  const LocalProjection proj = inst.grid.projection();
  std::vector<PlanarPoint> pts;
  for (const auto& m : inst.mothers) pts.push_back(proj.project(m.location));
  if (pts.empty()) {
    r.allocation.total_cost = Money{};
    return r;
  }
  int k = 1;
  if (cfg.k) {
    k = std::min(*cfg.k, static_cast<int>(pts.size()));
  } else {
    r.elbow = elbow_select(pts, std::min(cfg.k_min, static_cast<int>(pts.size())), cfg.k_max, cfg.seed);
    k = r.elbow.k;
  }
  r.clusters = kmeans(pts, k, split_seed(cfg.seed, static_cast<std::uint64_t>(k)));

  std::vector<std::vector<int>> members(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < inst.mothers.size(); ++i) members[static_cast<std::size_t>(r.clusters.assignment[i])].push_back(inst.mothers[i].id);
  std::vector<int> sizes;
  for (const auto& mb : members) sizes.push_back(static_cast<int>(mb.size()));
  r.budgets = proportional_split(inst.budget, sizes);

  std::vector<int> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return sizes[static_cast<std::size_t>(a)] > sizes[static_cast<std::size_t>(b)]; });

  Allocation& out = r.allocation;
  std::vector<char> cell_day_used(static_cast<std::size_t>(inst.grid.size() * inst.horizon), 0);
  ModelOptions opt;
  for (int c : order) {
    const auto& ids = members[static_cast<std::size_t>(c)];
    if (ids.empty()) continue;
    Instance sub = restrict_mothers(inst, ids);
    sub.budget = r.budgets[static_cast<std::size_t>(c)];
    if (inst.drive_cap) sub.drive_cap = std::max(0, *inst.drive_cap - static_cast<int>(out.drives.size()));
    PruneState prune = empty_prune_state(sub);
    prune.committed = cell_day_used;
    const RoutePool pool = generate_route_pool(sub, ids, cfg.routing);
    const IlpModel m = build_model(sub, pool, prune, sub.budget, opt);
    const IlpSolution sol = solve(m, cfg.solver);
    const Allocation part = extract_allocation(sub, m, sol, pool, prune);
    for (const auto& d : part.drives) cell_day_used[prune.at(d.cell, d.day)] = 1;
    for (const auto& rt : part.routes) opt.blocked_bus_days.insert({rt.bus_id, rt.day});
    out.assignments.insert(out.assignments.end(), part.assignments.begin(), part.assignments.end());
    out.drives.insert(out.drives.end(), part.drives.begin(), part.drives.end());
    out.routes.insert(out.routes.end(), part.routes.begin(), part.routes.end());
  }
  out.total_cost = allocation_cost(inst, out);
  out.objective = objective_unchecked(inst, out);
  throw_if_invalid(inst, out, "hilp");
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace adviser
