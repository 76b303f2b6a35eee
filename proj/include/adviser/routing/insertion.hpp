#pragma once

#include <algorithm>
#include <vector>

#include "adviser/routing/route_problem.hpp"

namespace adviser {

// Forward earliest service times and backward latest feasible times along
// depot -> seq -> center. Inserting x between positions k and k+1 is feasible
// iff x's own window admits max(e_x, fwd[k] + t(k,x)) and the bus then reaches
// k+1 no later than bwd[k+1].
struct InsertionFrame {
  std::vector<int> nodes;
  std::vector<double> fwd;
  std::vector<double> bwd;

  InsertionFrame(const RouteProblem& p, const std::vector<int>& seq, const std::vector<double>& arrivals) {
    nodes.reserve(seq.size() + 2);
    nodes.push_back(RouteProblem::kDepot);
    nodes.insert(nodes.end(), seq.begin(), seq.end());
    nodes.push_back(RouteProblem::kCenter);
    fwd = arrivals;
    bwd.assign(nodes.size(), 0.0);
    bwd.back() = p.window(nodes.back()).latest;
    for (std::size_t k = nodes.size() - 1; k-- > 0;)
      bwd[k] = std::min<double>(p.window(nodes[k]).latest, bwd[k + 1] - p.time(nodes[k], nodes[k + 1]));
  }

  // Extra travel minutes if feasible, otherwise a negative value.
  double try_insert(const RouteProblem& p, int x, std::size_t pos) const {
    const TimeWindow w = p.window(x);
    const double tx = p.time(nodes[pos], x);
    const double ax = std::max<double>(w.earliest, fwd[pos] + tx);
    if (ax > w.latest) return -1.0;
    const double txn = p.time(x, nodes[pos + 1]);
    if (ax + txn > bwd[pos + 1]) return -1.0;
    return std::max(0.0, tx + txn - p.time(nodes[pos], nodes[pos + 1]));
  }
};

// Pickup order built by repeatedly inserting the candidate/position with the
// best utility per added travel, utility / (1 + added minutes). Ties go to the
// lower candidate index, then the earlier position.
inline std::vector<int> cheapest_insertion_sequence(const RouteProblem& p) {
  std::vector<int> seq;
  std::vector<char> used(p.candidates.size(), 0);
  while (static_cast<int>(seq.size()) < p.capacity) {
    const auto at = p.schedule(seq);
    if (!at) break;
    const InsertionFrame frame(p, seq, *at);
    double best = -1.0;
    int best_c = -1;
    std::size_t best_pos = 0;
    for (std::size_t c = 0; c < p.candidates.size(); ++c) {
      if (used[c] || !(p.candidates[c].utility > 0.0)) continue;
      for (std::size_t pos = 0; pos + 1 < frame.nodes.size(); ++pos) {
        const double added = frame.try_insert(p, static_cast<int>(c), pos);
        if (added < 0) continue;
        const double score = p.candidates[c].utility / (1.0 + added);
        if (score > best) {
          best = score;
          best_c = static_cast<int>(c);
          best_pos = pos;
        }
      }
    }
    if (best_c < 0) break;
    seq.insert(seq.begin() + static_cast<std::ptrdiff_t>(best_pos), best_c);
    used[static_cast<std::size_t>(best_c)] = 1;
  }
  return seq;
}

inline RoutePlan cheapest_insertion(const RouteProblem& p) { return p.make_plan(cheapest_insertion_sequence(p)); }

}  // namespace adviser
