#pragma once

#include <chrono>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "adviser/ilp/heuristic.hpp"
#include "adviser/ilp/model.hpp"
#include "adviser/ilp/simplex.hpp"

namespace adviser {

enum class SolveStatus { Optimal, FeasibleWithGap, Infeasible };

inline std::string_view solve_status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::FeasibleWithGap: return "feasible_with_gap";
    case SolveStatus::Infeasible: return "infeasible";
  }
  return "";
}

struct SolverConfig {
  long node_limit = 1000000;
  double time_limit_s = 60.0;
  double gap_tolerance = 0.0;
  // Above this many columns x rows the dense LP is not attempted and the
  // greedy incumbent is returned with the knapsack bound.
  long dense_limit = 4000000;
};

struct IlpSolution {
  std::vector<char> x;
  double objective = 0.0;
  double bound = 0.0;
  SolveStatus status = SolveStatus::Optimal;
  long nodes = 0;
  double wall_seconds = 0.0;
  bool branch_and_bound = false;

  double gap() const { return std::max(0.0, bound - objective); }
};

namespace detail {

// Numerical slack for bound comparisons; model objectives are sums of
// probabilities, so distinct integer points differ by far more than this.
inline constexpr double kBoundSlack = 1e-9;
inline constexpr double kIntegral = 1e-6;

struct BbNode {
  double bound;
  long seq;
  std::vector<signed char> fixed;  // -1 free, 0, 1
  std::vector<double> lp_x;
};

struct BbNodeOrder {
  bool operator()(const BbNode& a, const BbNode& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.seq > b.seq;
  }
};

class BranchAndBound {
 public:
  BranchAndBound(const IlpModel& m) : m_(m), n_(m.size()) {
    base_.n = n_;
    base_.a.assign(m.rows.size(), std::vector<double>(static_cast<std::size_t>(n_), 0.0));
    base_.b.resize(m.rows.size());
    for (std::size_t r = 0; r < m.rows.size(); ++r) {
      for (auto [j, a] : m.rows[r].terms) base_.a[r][static_cast<std::size_t>(j)] += a;
      base_.b[r] = m.rows[r].rhs;
    }
    base_.c.resize(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j) base_.c[static_cast<std::size_t>(j)] = m.columns[static_cast<std::size_t>(j)].objective;
    base_.ub.assign(static_cast<std::size_t>(n_), 1.0);
  }

  // LP relaxation with fixings; returns false if infeasible.
  bool relax(BbNode& node) {
    LpProblem p = base_;
    double fixed_obj = m_.objective_constant;
    for (int j = 0; j < n_; ++j) {
      const signed char f = node.fixed[static_cast<std::size_t>(j)];
      if (f < 0) continue;
      p.ub[static_cast<std::size_t>(j)] = 0.0;
      if (f == 1) {
        fixed_obj += p.c[static_cast<std::size_t>(j)];
        for (std::size_t r = 0; r < p.a.size(); ++r) p.b[r] -= p.a[r][static_cast<std::size_t>(j)];
      }
    }
    const LpResult lp = solve_lp(p);
    ++lps_;
    if (lp.status == LpStatus::Infeasible) return false;
    if (lp.status != LpStatus::Optimal) {
      // Iteration limit: fall back to a trivially valid bound.
      node.bound = fixed_obj;
      for (int j = 0; j < n_; ++j)
        if (node.fixed[static_cast<std::size_t>(j)] < 0) node.bound += std::max(0.0, p.c[static_cast<std::size_t>(j)]);
      node.lp_x.assign(static_cast<std::size_t>(n_), 0.5);
    } else {
      node.bound = fixed_obj + lp.objective;
      node.lp_x = lp.x;
    }
    for (int j = 0; j < n_; ++j)
      if (node.fixed[static_cast<std::size_t>(j)] >= 0) node.lp_x[static_cast<std::size_t>(j)] = node.fixed[static_cast<std::size_t>(j)];
    return true;
  }

  long lps() const { return lps_; }

 private:
  const IlpModel& m_;
  int n_;
  LpProblem base_;
  long lps_ = 0;
};

}  // namespace detail

// Best-first branch and bound on the LP relaxation, branching on the most
// fractional column (ties: lowest index), seeded with the better of two greedy
// incumbents. Models too large for the dense LP get the greedy incumbent and
// the knapsack bound instead.
inline IlpSolution solve(const IlpModel& m, const SolverConfig& cfg = {}) {
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&]() { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  const auto n = static_cast<std::size_t>(m.size());

  IlpSolution sol;
  const ModelStructure st = analyse_model(m);
  bool have_incumbent = false;
  {
    auto a = greedy_solution(m, st, GreedyRule::Ratio);
    auto b = greedy_solution(m, st, GreedyRule::Value);
    auto& best = b.objective > a.objective + detail::kBoundSlack ? b : a;
    if (first_violated_row(m, best.x) < 0) {
      sol.x = std::move(best.x);
      sol.objective = best.objective;
      have_incumbent = true;
    }
  }

  if (static_cast<long>(n) * static_cast<long>(m.rows.size() + 1) > cfg.dense_limit) {
    sol.bound = std::max(knapsack_bound(m, st), sol.objective);
    sol.status = !have_incumbent ? SolveStatus::Infeasible
                 : sol.bound - sol.objective <= cfg.gap_tolerance + detail::kBoundSlack ? SolveStatus::Optimal
                                                                                        : SolveStatus::FeasibleWithGap;
    sol.wall_seconds = elapsed();
    return sol;
  }

  sol.branch_and_bound = true;
  detail::BranchAndBound bb(m);
  double incumbent = have_incumbent ? sol.objective : -1e300;
  std::priority_queue<detail::BbNode, std::vector<detail::BbNode>, detail::BbNodeOrder> open;
  long seq = 0;
  detail::BbNode root{0.0, seq++, std::vector<signed char>(n, -1), {}};
  double global_bound = incumbent;
  bool limit_hit = false;
  if (bb.relax(root)) open.push(std::move(root));

  auto prune_level = [&]() { return incumbent + cfg.gap_tolerance + detail::kBoundSlack; };
  while (!open.empty()) {
    if (bb.lps() >= cfg.node_limit || elapsed() > cfg.time_limit_s) {
      limit_hit = true;
      break;
    }
    detail::BbNode node = open.top();
    open.pop();
    if (node.bound <= prune_level()) continue;

    int branch = -1;
    double best_frac = 2.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = node.lp_x[j];
      const double frac = std::abs(v - std::round(v));
      if (frac <= detail::kIntegral) continue;
      const double dist = std::abs(v - 0.5);
      if (dist < best_frac) best_frac = dist, branch = static_cast<int>(j);
    }
    if (branch < 0) {
      std::vector<char> x(n);
      for (std::size_t j = 0; j < n; ++j) x[j] = node.lp_x[j] > 0.5;
      if (first_violated_row(m, x) < 0) {
        const double v = model_objective(m, x);
        if (v > incumbent + detail::kBoundSlack || !have_incumbent) {
          have_incumbent = true;
          incumbent = v;
          sol.x = std::move(x);
          sol.objective = v;
        }
      }
      continue;
    }
    for (signed char value : {static_cast<signed char>(1), static_cast<signed char>(0)}) {
      detail::BbNode child{0.0, seq++, node.fixed, {}};
      child.fixed[static_cast<std::size_t>(branch)] = value;
      if (!bb.relax(child)) continue;
      child.bound = std::min(child.bound, node.bound);
      if (child.bound > prune_level()) open.push(std::move(child));
    }
  }

  sol.nodes = bb.lps();
  if (limit_hit) {
    global_bound = open.empty() ? incumbent : std::max(incumbent, open.top().bound);
    sol.bound = global_bound;
  } else {
    sol.bound = sol.objective;
  }
  if (!have_incumbent) {
    sol.status = SolveStatus::Infeasible;
  } else {
    sol.status = sol.bound - sol.objective <= cfg.gap_tolerance + detail::kBoundSlack ? SolveStatus::Optimal : SolveStatus::FeasibleWithGap;
  }
  sol.wall_seconds = elapsed();
  return sol;
}

}  // namespace adviser
