#pragma once

#include <algorithm>
#include <set>
#include <vector>

#include "adviser/bounds/brute_force.hpp"
#include "adviser/pipeline/adviser.hpp"

namespace adviser {

inline constexpr double kBoundEpsilon = 1e-9;

struct Proposition1Check {
  double lhs = 0.0;  // Σ over M_VH of p_v - p_n
  double rhs = 0.0;  // Σ over M_VI of p_v - p_n
  bool assumptions_hold = false;
  bool holds = false;
  std::vector<int> m_vh, m_vi;  // sorted ids
};

struct BoundReport {
  double o_h = 0.0;
  double o_star = 0.0;
  int k = 0;
  std::vector<int> m_vh, m_vi;
  double gap_term = 0.0;
  double prop1_lhs = 0.0, prop1_rhs = 0.0;
  bool assumptions_hold = false;
  bool prop1_holds = false;
  bool theorem_holds = false;
  double leaves = 0;
};

namespace detail {

inline double drive_gain_sum(const Instance& inst, const std::vector<int>& ids) {
  double s = 0;
  for (int id : ids) s += inst.probs(id).gain(Intervention::VaccineDrive);
  return s;
}

}  // namespace detail

// M_VH is every mother in the k pruned drives. M_VI is the mothers of the k
// largest drives of the optimum among those with e_t·size >= e_v (ties:
// lower cell, then earlier day). Without k such drives no claim is made.
inline Proposition1Check verify_proposition1(const Instance& inst, const PruneState& prune, const Allocation& optimum) {
  Proposition1Check out;
  for (const auto& d : prune.drives) out.m_vh.insert(out.m_vh.end(), d.mother_ids.begin(), d.mother_ids.end());
  std::sort(out.m_vh.begin(), out.m_vh.end());

  std::vector<const DriveRecord*> qualifying;
  for (const auto& d : optimum.drives)
    if (inst.costs.voucher * static_cast<std::int64_t>(d.mother_ids.size()) >= inst.costs.drive) qualifying.push_back(&d);
  std::sort(qualifying.begin(), qualifying.end(), [](const DriveRecord* a, const DriveRecord* b) {
    if (a->mother_ids.size() != b->mother_ids.size()) return a->mother_ids.size() > b->mother_ids.size();
    return std::tie(a->cell, a->day) < std::tie(b->cell, b->day);
  });
  const std::size_t k = prune.drives.size();
  out.assumptions_hold = qualifying.size() >= k;
  if (!out.assumptions_hold) return out;
  for (std::size_t i = 0; i < k; ++i) out.m_vi.insert(out.m_vi.end(), qualifying[i]->mother_ids.begin(), qualifying[i]->mother_ids.end());
  std::sort(out.m_vi.begin(), out.m_vi.end());

  out.lhs = detail::drive_gain_sum(inst, out.m_vh);
  out.rhs = detail::drive_gain_sum(inst, out.m_vi);
  out.holds = out.lhs >= out.rhs - kBoundEpsilon;
  return out;
}

struct BoundConfig {
  RoutingConfig routing;
  SolverConfig solver;
  double brute_force_cap = kBruteForceCap;
};

// O_H from the full pipeline with pruning allowed to spend the whole budget,
// O* from brute force, both over one route pool built for every mother.
// The gap term sums p_{m i*_m} - p_n over M_VH \ M_VI with i*_m the
// optimum's choice for m.
inline BoundReport verify_theorem1(const Instance& inst, const BoundConfig& cfg = {}) {
  const RoutePool pool = generate_route_pool(inst, all_mother_ids(inst), cfg.routing);
  const BruteForceResult bf = brute_force_optimum(inst, pool, cfg.brute_force_cap);

  PlanConfig pc;
  pc.threshold = Money{};
  pc.routing = cfg.routing;
  pc.solver = cfg.solver;
  const PlanResult plan = adviser_plan(inst, pc, &pool);

  BoundReport r;
  r.o_h = plan.allocation.objective;
  r.o_star = bf.objective;
  r.leaves = bf.leaves;
  r.k = static_cast<int>(plan.prune.drives.size());
  const Proposition1Check p1 = verify_proposition1(inst, plan.prune, bf.allocation);
  r.m_vh = p1.m_vh;
  r.m_vi = p1.m_vi;
  r.assumptions_hold = p1.assumptions_hold;
  r.prop1_lhs = p1.lhs;
  r.prop1_rhs = p1.rhs;
  r.prop1_holds = p1.holds;
  if (!r.assumptions_hold) return r;

  std::vector<Intervention> star(inst.mothers.size(), Intervention::None);
  for (const auto& a : bf.allocation.assignments) star[inst.index_of(a.mother_id)] = a.kind;
  const std::set<int> vi(r.m_vi.begin(), r.m_vi.end());
  for (int id : r.m_vh)
    if (!vi.count(id)) r.gap_term += inst.probs(id).gain(star[inst.index_of(id)]);
  r.theorem_holds = r.o_h >= r.o_star - r.gap_term - kBoundEpsilon;
  return r;
}

}  // namespace adviser
