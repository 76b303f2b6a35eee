#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "adviser/ilp/model.hpp"

namespace adviser {

// Column structure of an IlpModel recovered from its rows: which mother
// columns hang off which facility (x or q), capacities, and side limits.
struct ModelStructure {
  std::vector<int> facility_of;              // per column: owning x/q column or -1
  std::vector<std::vector<int>> members;     // per column (x/q only): member columns
  std::vector<double> capacity;              // per column (x/q only)
  std::vector<int> bus_day_row;              // per q column: BusDay row or -1
  std::vector<char> forbidden;               // blocked by a single-column row with rhs < 1
  std::vector<int> mother_slot;              // per mother column: index into mothers
  std::vector<int> mothers;                  // mother ids with at least one column
  int drive_cap_row = -1;
  int budget_row = -1;
  std::vector<double> cost;                  // budget coefficient per column
};

inline ModelStructure analyse_model(const IlpModel& m) {
  const auto n = static_cast<std::size_t>(m.size());
  ModelStructure s;
  s.facility_of.assign(n, -1);
  s.members.assign(n, {});
  s.capacity.assign(n, 0.0);
  s.bus_day_row.assign(n, -1);
  s.forbidden.assign(n, 0);
  s.mother_slot.assign(n, -1);
  s.cost.assign(n, 0.0);
  for (std::size_t r = 0; r < m.rows.size(); ++r) {
    const Row& row = m.rows[r];
    switch (row.family) {
      case RowFamily::DriveLink:
      case RowFamily::RouteLink: {
        int member = -1, fac = -1;
        for (auto [j, a] : row.terms) (a > 0 ? member : fac) = j;
        s.facility_of[static_cast<std::size_t>(member)] = fac;
        s.members[static_cast<std::size_t>(fac)].push_back(member);
        break;
      }
      case RowFamily::DriveCapacity:
      case RowFamily::BusCapacity:
        for (auto [j, a] : row.terms) {
          const int fac = s.facility_of[static_cast<std::size_t>(j)];
          if (fac >= 0) s.capacity[static_cast<std::size_t>(fac)] = row.rhs;
        }
        break;
      case RowFamily::BusDay:
        for (auto [j, a] : row.terms) s.bus_day_row[static_cast<std::size_t>(j)] = static_cast<int>(r);
        break;
      case RowFamily::Budget:
        s.budget_row = static_cast<int>(r);
        for (auto [j, a] : row.terms) s.cost[static_cast<std::size_t>(j)] = a;
        break;
      case RowFamily::DriveCap: s.drive_cap_row = static_cast<int>(r); break;
      case RowFamily::Eligibility:
      case RowFamily::PruneFix:
        if (row.terms.size() == 1 && row.rhs < 1.0) s.forbidden[static_cast<std::size_t>(row.terms[0].first)] = 1;
        break;
      case RowFamily::Intervention: break;
    }
  }
  // Capacity rows are emitted after link rows, so facilities are known above;
  // facilities without a capacity row have no members.
  std::map<int, int> slot;
  for (std::size_t j = 0; j < n; ++j) {
    const int id = m.columns[j].mother_id;
    if (id < 0) continue;
    auto [it, fresh] = slot.emplace(id, static_cast<int>(s.mothers.size()));
    if (fresh) s.mothers.push_back(id);
    s.mother_slot[j] = it->second;
  }
  return s;
}

struct HeuristicResult {
  std::vector<char> x;
  double objective = 0.0;
};

enum class GreedyRule { Ratio, Value };

// Greedy construction with upgrades. Each step applies the action with the
// best objective gain per unit of extra budget (Ratio) or the largest gain
// that fits (Value): set a mother column, open a facility with its best
// members, or add a member to an open facility. Replacing a paid column
// refunds its cost. Free improving actions are applied first.
inline HeuristicResult greedy_solution(const IlpModel& m, const ModelStructure& s, GreedyRule rule = GreedyRule::Ratio) {
  const auto n = static_cast<std::size_t>(m.size());
  const double budget = s.budget_row >= 0 ? m.rows[static_cast<std::size_t>(s.budget_row)].rhs : 0.0;
  double drive_room = s.drive_cap_row >= 0 ? m.rows[static_cast<std::size_t>(s.drive_cap_row)].rhs : 1e18;
  std::vector<char> x(n, 0);
  std::vector<int> choice(s.mothers.size(), -1);
  std::vector<int> used(n, 0);  // members in open facilities
  std::vector<char> bus_day_used(m.rows.size(), 0);
  double spent = 0.0;

  auto cur_value = [&](int slot) {
    const int c = choice[static_cast<std::size_t>(slot)];
    return c < 0 ? 0.0 : m.columns[static_cast<std::size_t>(c)].objective;
  };
  auto refund = [&](int slot) {
    const int c = choice[static_cast<std::size_t>(slot)];
    return c < 0 || s.facility_of[static_cast<std::size_t>(c)] >= 0 ? 0.0 : s.cost[static_cast<std::size_t>(c)];
  };
  auto release = [&](int slot) {
    const int c = choice[static_cast<std::size_t>(slot)];
    if (c < 0) return;
    x[static_cast<std::size_t>(c)] = 0;
    spent -= refund(slot);
    const int f = s.facility_of[static_cast<std::size_t>(c)];
    if (f >= 0) --used[static_cast<std::size_t>(f)];
    choice[static_cast<std::size_t>(slot)] = -1;
  };
  auto take_member = [&](int col) {
    const int slot = s.mother_slot[static_cast<std::size_t>(col)];
    release(slot);
    x[static_cast<std::size_t>(col)] = 1;
    choice[static_cast<std::size_t>(slot)] = col;
    const int f = s.facility_of[static_cast<std::size_t>(col)];
    if (f >= 0)
      ++used[static_cast<std::size_t>(f)];
    else
      spent += s.cost[static_cast<std::size_t>(col)];
  };
  auto facility_open_ok = [&](std::size_t f) {
    if (x[f] || s.forbidden[f]) return false;
    if (m.columns[f].kind == ColumnKind::X) return drive_room >= 1.0;
    const int r = s.bus_day_row[f];
    return r < 0 || !bus_day_used[static_cast<std::size_t>(r)];
  };
  // Best members of facility f given current choices, gain desc then column.
  auto pick_members = [&](std::size_t f, std::size_t room, std::vector<int>& out, double& gain, double& refunds) {
    std::vector<std::pair<double, int>> cands;
    for (int c : s.members[f]) {
      const int slot = s.mother_slot[static_cast<std::size_t>(c)];
      if (x[static_cast<std::size_t>(c)] || s.forbidden[static_cast<std::size_t>(c)]) continue;
      const int cur = choice[static_cast<std::size_t>(slot)];
      if (cur >= 0 && s.facility_of[static_cast<std::size_t>(cur)] == static_cast<int>(f)) continue;
      const double d = m.columns[static_cast<std::size_t>(c)].objective - cur_value(slot);
      if (d > 1e-12) cands.emplace_back(d, c);
    }
    std::sort(cands.begin(), cands.end(), [](auto& a, auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
    out.clear();
    gain = refunds = 0.0;
    for (auto [d, c] : cands) {
      if (out.size() >= room) break;
      out.push_back(c);
      gain += d;
      refunds += refund(s.mother_slot[static_cast<std::size_t>(c)]);
    }
  };

  while (true) {
    double best_score = 0.0;
    int best_col = -1;
    std::vector<int> best_members, members;
    bool best_free = false;
    auto consider = [&](int col, double gain, double extra, const std::vector<int>* mem) {
      if (gain <= 1e-12 || spent + extra > budget + 1e-9) return;
      const bool free = extra <= 0.0;
      double score;
      if (free)
        score = gain;
      else
        score = rule == GreedyRule::Ratio ? gain / extra : gain;
      if (best_free && !free) return;
      if ((free && !best_free) || score > best_score + 1e-12) {
        best_score = score;
        best_col = col;
        best_free = free;
        if (mem) best_members = *mem; else best_members.clear();
      }
    };
    for (std::size_t j = 0; j < n; ++j) {
      const Column& c = m.columns[j];
      if (x[j] || s.forbidden[j]) continue;
      if (c.kind == ColumnKind::X || c.kind == ColumnKind::Q) {
        double gain, refunds;
        if (!facility_open_ok(j)) continue;
        pick_members(j, static_cast<std::size_t>(s.capacity[j]), members, gain, refunds);
        consider(static_cast<int>(j), gain, s.cost[j] - refunds, &members);
      } else if (s.facility_of[j] >= 0) {
        const auto f = static_cast<std::size_t>(s.facility_of[j]);
        if (!x[f] || used[f] >= static_cast<int>(s.capacity[f])) continue;
        const int slot = s.mother_slot[j];
        consider(static_cast<int>(j), c.objective - cur_value(slot), -refund(slot), nullptr);
      } else {
        const int slot = s.mother_slot[j];
        consider(static_cast<int>(j), c.objective - cur_value(slot), s.cost[j] - refund(slot), nullptr);
      }
    }
    if (best_col < 0) break;
    const auto b = static_cast<std::size_t>(best_col);
    const ColumnKind k = m.columns[b].kind;
    if (k == ColumnKind::X || k == ColumnKind::Q) {
      x[b] = 1;
      spent += s.cost[b];
      if (k == ColumnKind::X) drive_room -= 1.0;
      if (s.bus_day_row[b] >= 0) bus_day_used[static_cast<std::size_t>(s.bus_day_row[b])] = 1;
      for (int c : best_members) take_member(c);
    } else {
      take_member(best_col);
    }
  }

  HeuristicResult out;
  out.x = std::move(x);
  out.objective = model_objective(m, out.x);
  return out;
}

// Upper bound from a multiple-choice knapsack relaxation: each mother takes
// at most one column, a facility's cost is split evenly over at most
// min(capacity, members) mothers, and bus-day and drive-cap rows are dropped.
inline double knapsack_bound(const IlpModel& m, const ModelStructure& s) {
  const double budget = s.budget_row >= 0 ? m.rows[static_cast<std::size_t>(s.budget_row)].rhs : 0.0;
  std::vector<std::vector<std::pair<double, double>>> options(s.mothers.size());  // (cost, value)
  for (std::size_t j = 0; j < m.columns.size(); ++j) {
    if (s.mother_slot[j] < 0 || s.forbidden[j]) continue;
    double c = s.cost[j];
    const int f = s.facility_of[j];
    if (f >= 0) {
      if (s.forbidden[static_cast<std::size_t>(f)]) continue;
      const double share = std::min(s.capacity[static_cast<std::size_t>(f)], static_cast<double>(s.members[static_cast<std::size_t>(f)].size()));
      c = s.cost[static_cast<std::size_t>(f)] / std::max(1.0, share);
    }
    if (c > budget + 1e-9) continue;
    options[static_cast<std::size_t>(s.mother_slot[j])].emplace_back(c, m.columns[j].objective);
  }
  // Upper concave hull of each mother's (cost, value) points from (0, 0); the
  // LP optimum fills budget with hull segments in slope order.
  double bound = m.objective_constant;
  std::vector<std::pair<double, double>> segments;  // (slope, length in cost)
  for (auto& opts : options) {
    opts.emplace_back(0.0, 0.0);
    std::sort(opts.begin(), opts.end(), [](auto& a, auto& b) { return a.first != b.first ? a.first < b.first : a.second > b.second; });
    std::vector<std::pair<double, double>> hull;
    for (auto p : opts) {
      if (!hull.empty() && p.second <= hull.back().second) continue;
      if (!hull.empty() && p.first == hull.back().first) continue;
      while (hull.size() >= 2) {
        auto [x1, y1] = hull[hull.size() - 2];
        auto [x2, y2] = hull.back();
        if ((y2 - y1) * (p.first - x1) <= (p.second - y1) * (x2 - x1)) hull.pop_back();
        else break;
      }
      hull.push_back(p);
    }
    for (std::size_t k = 1; k < hull.size(); ++k) {
      const double dc = hull[k].first - hull[k - 1].first, dv = hull[k].second - hull[k - 1].second;
      if (dc <= 0) bound += dv;
      else segments.emplace_back(dv / dc, dc);
    }
    if (!hull.empty() && hull.front().first == 0.0) bound += hull.front().second;
  }
  std::sort(segments.begin(), segments.end(), [](auto& a, auto& b) { return a.first > b.first; });
  double room = budget;
  for (auto [slope, len] : segments) {
    if (room <= 0) break;
    const double take = std::min(room, len);
    bound += slope * take;
    room -= take;
  }
  return bound;
}

}  // namespace adviser
