#pragma once

#include <chrono>
#include <optional>

#include "adviser/core/error.hpp"
#include "adviser/core/validate.hpp"
#include "adviser/ilp/extract.hpp"
#include "adviser/ilp/model.hpp"
#include "adviser/ilp/solver.hpp"
#include "adviser/pruning/greedy_prune.hpp"
#include "adviser/routing/pool.hpp"

namespace adviser {

struct PlanConfig {
  // Pruning stops once the budget left falls below b' = max(0, b - offset),
  // unless an explicit threshold is given.
  Money threshold_offset = Money::units(1000);
  std::optional<Money> threshold;
  RoutingConfig routing;
  SolverConfig solver;
  bool literal_model = false;
};

struct PlanTimings {
  double prune_s = 0, routing_s = 0, ilp_s = 0, total_s = 0;
};

struct PlanResult {
  Allocation allocation;
  PruneState prune;
  IlpSolution solution;
  int model_columns = 0;
  int model_rows = 0;
  PlanTimings timings;
};

inline Money prune_threshold(const Instance& inst, const PlanConfig& cfg) {
  if (cfg.threshold) return *cfg.threshold;
  const Money t = inst.budget - cfg.threshold_offset;
  return t < Money{} ? Money{} : t;
}

inline void throw_if_invalid(const Instance& inst, const Allocation& a, const char* who) {
  const auto v = validate_allocation(inst, a);
  if (!v.empty()) throw ValidationError(std::string(who) + " produced an invalid allocation: " + v.front().entity + ": " + v.front().rule + " (" + v.front().detail + ")");
}

// Prune with greedy drives, route the mothers left over, solve the ILP on
// the leftover budget and merge. A pool built elsewhere over a superset of
// the remaining mothers may be passed in; the model only uses its stops for
// mothers that survived pruning.
inline PlanResult adviser_plan(const Instance& inst, const PlanConfig& cfg = {}, const RoutePool* shared_pool = nullptr) {
  using clock = std::chrono::steady_clock;
  const auto secs = [](clock::time_point a, clock::time_point b) { return std::chrono::duration<double>(b - a).count(); };
  const auto t0 = clock::now();

  PlanResult r;
  r.prune = greedy_prune(inst, prune_threshold(inst, cfg));
  const auto t1 = clock::now();

  RoutePool own;
  if (!shared_pool) own = generate_route_pool(inst, r.prune.remaining_mothers, cfg.routing);
  const RoutePool& pool = shared_pool ? *shared_pool : own;
  const auto t2 = clock::now();

  const IlpModel m = build_model(inst, pool, r.prune, r.prune.remaining_budget, {cfg.literal_model});
  r.model_columns = m.size();
  r.model_rows = static_cast<int>(m.rows.size());
  r.solution = solve(m, cfg.solver);
  r.allocation = extract_allocation(inst, m, r.solution, pool, r.prune);
  const auto t3 = clock::now();

  throw_if_invalid(inst, r.allocation, "adviser");
  r.timings = {secs(t0, t1), secs(t1, t2), secs(t2, t3), secs(t0, t3)};
  return r;
}

}  // namespace adviser
