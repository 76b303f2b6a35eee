#pragma once

#include <algorithm>
#include <queue>
#include <string>
#include <tuple>
#include <vector>

#include "adviser/core/allocation.hpp"
#include "adviser/core/error.hpp"
#include "adviser/core/instance.hpp"
#include "adviser/core/reach.hpp"

namespace adviser {

struct DriveChoice {
  double value = 0.0;
  std::vector<int> mother_ids;  // in selection order: gain desc, id asc
};

// Best drive over a candidate set: the capacity largest strictly positive
// gains p_v - p_n. Mothers with zero gain are never targeted.
inline DriveChoice drive_utility(const Instance& inst, const std::vector<int>& candidate_ids, int capacity) {
  std::vector<std::pair<double, int>> gains;
  for (int id : candidate_ids) {
    const double g = inst.probs(id).gain(Intervention::VaccineDrive);
    if (g > 0.0) gains.emplace_back(g, id);
  }
  std::sort(gains.begin(), gains.end(), [](auto& a, auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
  if (static_cast<int>(gains.size()) > capacity) gains.resize(static_cast<std::size_t>(std::max(0, capacity)));
  DriveChoice out;
  for (auto& [g, id] : gains) {
    out.value += g;
    out.mother_ids.push_back(id);
  }
  return out;
}

struct CommittedDrive {
  int cell = 0;
  int day = 1;
  std::vector<int> mother_ids;
  double utility = 0.0;
  int iteration = 0;
};

enum class PruneStop { BelowThreshold, AllVisited, NoPositiveUtility, BudgetBelowDriveCost, DriveCapReached };

inline std::string_view prune_stop_name(PruneStop s) {
  switch (s) {
    case PruneStop::BelowThreshold: return "below threshold";
    case PruneStop::AllVisited: return "all cell-days visited";
    case PruneStop::NoPositiveUtility: return "no positive utility";
    case PruneStop::BudgetBelowDriveCost: return "budget below drive cost";
    case PruneStop::DriveCapReached: return "drive cap reached";
  }
  return "";
}

// C, K and H are |G| x T, stored cell-major: index = cell * T + (day - 1).
struct PruneState {
  int cells = 0;
  int days = 0;
  std::vector<char> committed;  // C
  std::vector<char> visited;    // K
  std::vector<double> utility;  // H as last evaluated; -1 once visited
  std::vector<int> remaining_mothers;
  Money remaining_budget;
  std::vector<CommittedDrive> drives;
  int iterations = 0;
  PruneStop stop = PruneStop::AllVisited;

  std::size_t at(int cell, int day) const {
    return static_cast<std::size_t>(cell) * static_cast<std::size_t>(days) + static_cast<std::size_t>(day - 1);
  }
  bool is_committed(int cell, int day) const { return committed[at(cell, day)] != 0; }
  bool is_visited(int cell, int day) const { return visited[at(cell, day)] != 0; }
};

// State for an instance where nothing is pruned.
inline PruneState empty_prune_state(const Instance& inst) {
  PruneState s;
  s.cells = inst.grid.size();
  s.days = inst.horizon;
  const auto n = static_cast<std::size_t>(s.cells) * static_cast<std::size_t>(s.days);
  s.committed.assign(n, 0);
  s.visited.assign(n, 0);
  s.utility.assign(n, 0.0);
  for (const auto& m : inst.mothers) s.remaining_mothers.push_back(m.id);
  s.remaining_budget = inst.budget;
  return s;
}

// Greedy drive commitment. Each iteration takes the unvisited (cell, day)
// with the largest drive utility over the remaining mothers (ties: lower
// cell, then earlier day), marks it visited, and commits the drive when
// e_t·|S| >= e_v. Committed mothers leave the population.
//
// H only decreases as mothers are removed, so stale heap entries are upper
// bounds; re-evaluating an entry only when it reaches the top reproduces the
// full-sweep argmax exactly.
inline PruneState greedy_prune(const Instance& inst, Money threshold) {
  if (threshold < Money{}) throw ConfigError("pruning threshold must be non-negative");
  if (threshold > inst.budget) throw ConfigError("pruning threshold " + threshold.str() + " exceeds budget " + inst.budget.str());

  PruneState s = empty_prune_state(inst);
  const DriveReach reach = drive_reach(inst);
  const int T = s.days;
  const auto M = inst.mothers.size();

  // Per-cell candidates sorted by gain desc, id asc, so the top-γ_v scan can
  // stop early.
  std::vector<std::vector<int>> by_gain(reach.mothers_of_cell.size());
  for (std::size_t g = 0; g < by_gain.size(); ++g) {
    for (int i : reach.mothers_of_cell[g])
      if (inst.probabilities[static_cast<std::size_t>(i)].gain(Intervention::VaccineDrive) > 0.0) by_gain[g].push_back(i);
    std::sort(by_gain[g].begin(), by_gain[g].end(), [&](int a, int b) {
      const double ga = inst.probabilities[static_cast<std::size_t>(a)].gain(Intervention::VaccineDrive);
      const double gb = inst.probabilities[static_cast<std::size_t>(b)].gain(Intervention::VaccineDrive);
      return ga != gb ? ga > gb : inst.mothers[static_cast<std::size_t>(a)].id < inst.mothers[static_cast<std::size_t>(b)].id;
    });
  }
  std::vector<char> removed(M, 0);

  auto evaluate = [&](int g, int t, std::vector<int>* chosen) {
    double v = 0.0;
    int n = 0;
    for (int i : by_gain[static_cast<std::size_t>(g)]) {
      if (n == inst.drive_capacity) break;
      if (removed[static_cast<std::size_t>(i)] || !inst.mothers[static_cast<std::size_t>(i)].eligibility.contains(t)) continue;
      v += inst.probabilities[static_cast<std::size_t>(i)].gain(Intervention::VaccineDrive);
      ++n;
      if (chosen) chosen->push_back(i);
    }
    return v;
  };

  using Entry = std::tuple<double, int, int, unsigned>;  // value, cell, day, version
  auto worse = [](const Entry& a, const Entry& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
    if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) > std::get<1>(b);
    return std::get<2>(a) > std::get<2>(b);
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
  std::vector<unsigned> version(s.utility.size(), 0);
  for (int g = 0; g < s.cells; ++g)
    for (int t = 1; t <= T; ++t) {
      const double v = evaluate(g, t, nullptr);
      s.utility[s.at(g, t)] = v;
      heap.emplace(v, g, t, 0u);
    }

  const long long limit = static_cast<long long>(s.cells) * T;
  long long count = 0;
  s.stop = PruneStop::AllVisited;
  while (true) {
    if (s.remaining_budget < threshold) {
      s.stop = PruneStop::BelowThreshold;
      break;
    }
    if (count > limit || heap.empty()) {
      s.stop = PruneStop::AllVisited;
      break;
    }
    // Cheap stops that cannot change C, the drives or the budget.
    if (s.remaining_budget < inst.costs.drive) {
      s.stop = PruneStop::BudgetBelowDriveCost;
      break;
    }
    if (inst.drive_cap && static_cast<int>(s.drives.size()) >= *inst.drive_cap) {
      s.stop = PruneStop::DriveCapReached;
      break;
    }
    auto [v, g, t, ver] = heap.top();
    heap.pop();
    const std::size_t k = s.at(g, t);
    if (ver != version[k]) {
      const double fresh = evaluate(g, t, nullptr);
      s.utility[k] = fresh;
      heap.emplace(fresh, g, t, version[k]);
      continue;
    }
    if (v <= 0.0) {
      s.stop = PruneStop::NoPositiveUtility;
      break;
    }
    ++count;
    ++s.iterations;
    std::vector<int> chosen;
    evaluate(g, t, &chosen);
    s.visited[k] = 1;
    s.utility[k] = -1.0;
    if (inst.costs.voucher * static_cast<std::int64_t>(chosen.size()) >= inst.costs.drive) {
      s.committed[k] = 1;
      CommittedDrive d{g, t, {}, v, s.iterations};
      for (int i : chosen) {
        removed[static_cast<std::size_t>(i)] = 1;
        d.mother_ids.push_back(inst.mothers[static_cast<std::size_t>(i)].id);
        const auto& w = inst.mothers[static_cast<std::size_t>(i)].eligibility;
        for (int c : reach.cells_of_mother[static_cast<std::size_t>(i)])
          for (int day = std::max(1, w.first_day); day <= std::min(T, w.last_day); ++day) ++version[s.at(c, day)];
      }
      s.drives.push_back(std::move(d));
      s.remaining_budget -= inst.costs.drive;
    }
  }

  s.remaining_mothers.clear();
  for (std::size_t i = 0; i < M; ++i)
    if (!removed[i]) s.remaining_mothers.push_back(inst.mothers[i].id);
  return s;
}

// Drive records and assignments for the committed drives.
inline void append_pruned_drives(const PruneState& s, Allocation& a) {
  for (const auto& d : s.drives) {
    a.drives.push_back({d.cell, d.day, d.mother_ids});
    for (int id : d.mother_ids) a.assignments.push_back({id, Intervention::VaccineDrive, d.day, d.cell});
  }
}

}  // namespace adviser
