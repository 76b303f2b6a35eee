#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <vector>

#include "adviser/core/random.hpp"
#include "adviser/routing/insertion.hpp"

namespace adviser {

struct GlsConfig {
  // Budget in neighbour evaluations; deterministic. The wall-clock limit is a
  // safety net and never binds at the default evaluation budget on desk-scale
  // inputs.
  long max_evaluations = 20000;
  double time_limit_s = 30.0;
  std::uint64_t seed = 1;
  double lambda_factor = 0.1;  // λ = lambda_factor × mean candidate utility
  double travel_weight = 0.01;  // one mean arc of travel is worth this much utility
};

struct GlsStats {
  long evaluations = 0;
  int local_optima = 0;
  bool timed_out = false;
};

// Guided local search over pickup sequences. The search minimises
//   h = -U + ω travel + λ Σ_arcs penalty(arc),  ω = travel_weight / mean arc,
// with first-improvement moves (insert, remove, replace, relocate, swap).
// At each local optimum the used arc with the largest travel/(1 + penalty) is
// penalised. The best plan seen (utility first, then shorter travel) is
// returned, so the result is never worse than the start. The search ends
// early once every candidate with positive utility is aboard.
inline std::vector<int> guided_local_search(const RouteProblem& p, const std::vector<int>& initial, const GlsConfig& cfg,
                                            GlsStats* stats = nullptr) {
  GlsStats local;
  GlsStats& st = stats ? *stats : local;
  if (cfg.time_limit_s <= 0.0 || cfg.max_evaluations <= 0 || !p.schedule(initial)) return initial;

  // Once every useful candidate is aboard utility cannot grow; only travel
  // could, and the pool does not value it.
  int useful = 0;
  for (const auto& c : p.candidates) useful += c.utility > 0.0;
  auto saturated = [&](const std::vector<int>& seq) {
    int k = 0;
    for (int n : seq) k += p.candidates[static_cast<std::size_t>(n)].utility > 0.0;
    return k == useful;
  };
  if (saturated(initial)) return initial;

  const auto C = static_cast<std::int64_t>(p.candidates.size());
  double arc_sum = p.time(RouteProblem::kDepot, RouteProblem::kCenter);
  for (int c = 0; c < static_cast<int>(C); ++c) arc_sum += p.time(RouteProblem::kDepot, c) + p.time(c, RouteProblem::kCenter);
  double mean_arc = arc_sum / static_cast<double>(2 * C + 1);
  if (!(mean_arc > 0)) mean_arc = 1.0;
  const double omega = cfg.travel_weight / mean_arc;
  double mean_u = 0;
  for (const auto& c : p.candidates) mean_u += std::max(0.0, c.utility);
  mean_u = C > 0 ? mean_u / static_cast<double>(C) : 0.0;
  const double lambda = cfg.lambda_factor * mean_u;

  std::vector<int> penalty(static_cast<std::size_t>((C + 2) * (C + 2)), 0);
  auto key = [&](int a, int b) { return static_cast<std::size_t>((static_cast<std::int64_t>(a) + 2) * (C + 2) + (b + 2)); };
  auto arcs_of = [&](const std::vector<int>& seq) {
    std::vector<std::pair<int, int>> arcs;
    int prev = RouteProblem::kDepot;
    for (int n : seq) arcs.emplace_back(prev, n), prev = n;
    arcs.emplace_back(prev, RouteProblem::kCenter);
    return arcs;
  };
  auto h = [&](const std::vector<int>& seq) {
    double pen = 0;
    for (auto [a, b] : arcs_of(seq)) pen += penalty[key(a, b)];
    return -p.utility(seq) + omega * p.travel_minutes(seq) + lambda * pen;
  };

  const auto start = std::chrono::steady_clock::now();
  auto out_of_budget = [&]() {
    if (st.evaluations >= cfg.max_evaluations) return true;
    if ((st.evaluations & 255) == 0 &&
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() > cfg.time_limit_s) {
      st.timed_out = true;
    }
    return st.timed_out;
  };

  std::vector<int> cur = initial, best = initial;
  double best_u = p.utility(best), best_travel = p.travel_minutes(best);
  auto consider_best = [&]() {
    const double u = p.utility(cur), tr = p.travel_minutes(cur);
    if (u > best_u + 1e-12 || (u > best_u - 1e-12 && tr < best_travel - 1e-9)) {
      best = cur;
      best_u = u;
      best_travel = tr;
    }
  };

  Rng rng(cfg.seed);
  std::vector<char> in_route(p.candidates.size(), 0);
  while (!out_of_budget()) {
    // First-improvement descent on h.
    bool improved = true;
    while (improved && !out_of_budget()) {
      improved = false;
      std::fill(in_route.begin(), in_route.end(), 0);
      for (int n : cur) in_route[static_cast<std::size_t>(n)] = 1;
      const double hc = h(cur);
      const std::size_t n = cur.size();
      auto accept = [&](std::vector<int>&& next) {
        ++st.evaluations;
        if (static_cast<int>(next.size()) > p.capacity || !p.schedule(next)) return false;
        if (h(next) < hc - 1e-12) {
          cur = std::move(next);
          improved = true;
          return true;
        }
        return false;
      };
      const int first_class = static_cast<int>(rng.below(5));
      for (int step = 0; step < 5 && !improved && !out_of_budget(); ++step) {
        switch ((first_class + step) % 5) {
          case 0: {  // insert
            if (static_cast<int>(n) >= p.capacity) break;
            const auto at = p.schedule(cur);
            const InsertionFrame frame(p, cur, *at);
            for (std::size_t c = 0; c < p.candidates.size() && !improved && !out_of_budget(); ++c) {
              if (in_route[c] || !(p.candidates[c].utility > 0.0)) continue;
              for (std::size_t pos = 0; pos <= n && !improved; ++pos) {
                ++st.evaluations;
                if (frame.try_insert(p, static_cast<int>(c), pos) < 0) continue;
                auto next = cur;
                next.insert(next.begin() + static_cast<std::ptrdiff_t>(pos), static_cast<int>(c));
                if (h(next) < hc - 1e-12) {
                  cur = std::move(next);
                  improved = true;
                }
              }
            }
            break;
          }
          case 1:  // remove
            for (std::size_t i = 0; i < n && !improved && !out_of_budget(); ++i) {
              auto next = cur;
              next.erase(next.begin() + static_cast<std::ptrdiff_t>(i));
              accept(std::move(next));
            }
            break;
          case 2:  // replace
            for (std::size_t i = 0; i < n && !improved; ++i)
              for (std::size_t c = 0; c < p.candidates.size() && !improved && !out_of_budget(); ++c) {
                if (in_route[c] || !(p.candidates[c].utility > 0.0)) continue;
                auto next = cur;
                next[i] = static_cast<int>(c);
                accept(std::move(next));
              }
            break;
          case 3:  // relocate
            for (std::size_t i = 0; i < n && !improved; ++i)
              for (std::size_t j = 0; j < n && !improved && !out_of_budget(); ++j) {
                if (i == j) continue;
                auto next = cur;
                const int v = next[i];
                next.erase(next.begin() + static_cast<std::ptrdiff_t>(i));
                next.insert(next.begin() + static_cast<std::ptrdiff_t>(j), v);
                accept(std::move(next));
              }
            break;
          case 4:  // swap
            for (std::size_t i = 0; i < n && !improved; ++i)
              for (std::size_t j = i + 1; j < n && !improved && !out_of_budget(); ++j) {
                auto next = cur;
                std::swap(next[i], next[j]);
                accept(std::move(next));
              }
            break;
        }
      }
      if (improved) consider_best();
    }
    consider_best();
    if (out_of_budget() || saturated(best)) break;

    // Local optimum: penalise the most expensive, least penalised arc.
    ++st.local_optima;
    double top = -1;
    std::pair<int, int> chosen{0, 0};
    for (auto [a, b] : arcs_of(cur)) {
      const double util = p.time(a, b) / (1.0 + penalty[key(a, b)]);
      if (util > top) top = util, chosen = {a, b};
    }
    ++penalty[key(chosen.first, chosen.second)];
    ++st.evaluations;  // guarantees progress towards the budget
  }
  return best;
}

inline RoutePlan guided_local_search(const RouteProblem& p, const RoutePlan& initial, const GlsConfig& cfg,
                                     GlsStats* stats = nullptr) {
  std::vector<int> seq;
  for (int id : initial.picked)
    for (std::size_t c = 0; c < p.candidates.size(); ++c)
      if (p.candidates[c].mother_id == id) seq.push_back(static_cast<int>(c));
  if (cfg.time_limit_s <= 0.0 || cfg.max_evaluations <= 0) return initial;
  return p.make_plan(guided_local_search(p, seq, cfg, stats));
}

}  // namespace adviser
