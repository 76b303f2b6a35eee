#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "adviser/core/error.hpp"
#include "adviser/core/instance.hpp"
#include "adviser/core/reach.hpp"
#include "adviser/pruning/greedy_prune.hpp"
#include "adviser/routing/pool.hpp"

namespace adviser {

enum class ColumnKind { X, Y, Z, U, Q };

inline std::string_view column_kind_name(ColumnKind k) {
  switch (k) {
    case ColumnKind::X: return "x";
    case ColumnKind::Y: return "y";
    case ColumnKind::Z: return "z";
    case ColumnKind::U: return "u";
    case ColumnKind::Q: return "q";
  }
  return "";
}

// A binary column. Fields that do not apply to the kind stay at -1.
struct Column {
  ColumnKind kind = ColumnKind::Y;
  Intervention intervention = Intervention::None;  // Y: none/call/voucher
  int mother_id = -1;
  int day = -1;
  int cell = -1;
  int bus_id = -1;
  int route_id = -1;
  double objective = 0.0;
  Money cost;
};

enum class RowFamily {
  Eligibility,     // y, z, u <= a_mt
  DriveLink,       // z_mtg <= x_tg
  DriveCapacity,   // Σ_m z_mtg <= γ_v
  RouteLink,       // u_mtfr <= q_tfr
  BusCapacity,     // Σ_m u_mtfr <= γ_l
  BusDay,          // Σ_r q_tfr <= 1
  Intervention,    // one intervention per mother
  Budget,          // Σ cost <= b'
  DriveCap,        // Σ x <= cap
  PruneFix,        // x_tg <= 0 where pruning already committed (g, t)
};

inline std::string_view row_family_name(RowFamily f) {
  switch (f) {
    case RowFamily::Eligibility: return "eligibility";
    case RowFamily::DriveLink: return "drive_link";
    case RowFamily::DriveCapacity: return "drive_capacity";
    case RowFamily::RouteLink: return "route_link";
    case RowFamily::BusCapacity: return "bus_capacity";
    case RowFamily::BusDay: return "bus_day";
    case RowFamily::Intervention: return "intervention";
    case RowFamily::Budget: return "budget";
    case RowFamily::DriveCap: return "drive_cap";
    case RowFamily::PruneFix: return "prune_fix";
  }
  return "";
}

// Σ coef·column <= rhs. Coefficients and right-hand sides are integers.
struct Row {
  RowFamily family = RowFamily::Budget;
  std::vector<std::pair<int, double>> terms;
  double rhs = 0.0;
};

struct ModelOptions {
  // Literal mode keeps y_n columns and one y column per (mother, day, kind),
  // and writes eligibility as explicit rows. The default eliminates y_n,
  // collapses call/voucher columns to the first eligible day, and drops
  // columns that cannot pay off (cost above b', zero gain, empty drives).
  bool literal = false;
  // (bus id, day) pairs already taken elsewhere; no route is offered there.
  std::set<std::pair<int, int>> blocked_bus_days;
};

struct IlpModel {
  std::vector<Column> columns;
  std::vector<Row> rows;
  double objective_constant = 0.0;  // Σ p_mn when y_n is eliminated
  Money budget;
  bool literal = false;
  std::vector<int> mother_ids;  // M'

  int size() const { return static_cast<int>(columns.size()); }
  int count(ColumnKind k) const {
    int n = 0;
    for (const auto& c : columns) n += c.kind == k;
    return n;
  }
  int count(RowFamily f) const {
    int n = 0;
    for (const auto& r : rows) n += r.family == f;
    return n;
  }
};

// Integer program over the mothers left after pruning. x_tg is blocked
// wherever pruning committed (g, t); the route pool must only reference known
// mothers.
inline IlpModel build_model(const Instance& inst, const RoutePool& pool, const PruneState& prune, Money budget,
                            const ModelOptions& opt = {}) {
  if (budget < Money{}) throw ConfigError("leftover budget must be non-negative");
  if (prune.cells != inst.grid.size() || prune.days != inst.horizon) throw InputError("prune state does not match instance");
  if (pool.horizon != inst.horizon || pool.centers != static_cast<int>(inst.centers.size()) ||
      pool.plans.size() != static_cast<std::size_t>(pool.horizon * pool.centers))
    throw InputError("route pool does not match instance");
  for (const auto& p : pool.plans)
    for (int id : p.picked)
      if (!inst.find(id)) throw InputError("route " + std::to_string(p.route_id) + " references unknown mother " + std::to_string(id));

  IlpModel m;
  m.budget = budget;
  m.literal = opt.literal;
  m.mother_ids = prune.remaining_mothers;
  const auto& costs = inst.costs;
  const bool prune_cols = !opt.literal;
  auto affordable = [&](Money c) { return !prune_cols || c <= budget; };

  std::vector<char> in_mprime(inst.mothers.size(), 0);
  for (int id : m.mother_ids) in_mprime[inst.index_of(id)] = 1;

  auto add_col = [&](Column c) {
    m.columns.push_back(c);
    return static_cast<int>(m.columns.size()) - 1;
  };
  std::map<int, std::vector<int>> of_mother;  // intervention row terms

  // y columns.
  for (int id : m.mother_ids) {
    const Mother& mo = inst.mother(id);
    const Probabilities& p = inst.probs(id);
    if (opt.literal) {
      for (int t = 1; t <= inst.horizon; ++t)
        for (Intervention j : {Intervention::None, Intervention::PhoneCall, Intervention::TravelVoucher}) {
          Column c{ColumnKind::Y, j, id, t};
          c.objective = p.of(j);
          c.cost = costs.of(j);
          of_mother[id].push_back(add_col(c));
        }
    } else {
      m.objective_constant += p.none;
      for (Intervention j : {Intervention::PhoneCall, Intervention::TravelVoucher}) {
        Column c{ColumnKind::Y, j, id, mo.eligibility.first_day};
        c.objective = p.gain(j);
        c.cost = costs.of(j);
        if (c.objective > 0.0 && affordable(c.cost)) of_mother[id].push_back(add_col(c));
      }
    }
  }

  // Drives: x per cell-day, z per mother within σ.
  const DriveReach reach = drive_reach(inst);
  std::vector<int> x_of(static_cast<std::size_t>(inst.grid.size() * inst.horizon), -1);
  std::vector<std::vector<int>> z_of(x_of.size());
  const bool drives_affordable = affordable(costs.drive) && !(prune_cols && inst.drive_cap && *inst.drive_cap <= 0);
  for (int g = 0; g < inst.grid.size() && drives_affordable; ++g)
    for (int t = 1; t <= inst.horizon; ++t) {
      const auto k = static_cast<std::size_t>(g * inst.horizon + t - 1);
      std::vector<Column> zs;
      for (int i : reach.mothers_of_cell[static_cast<std::size_t>(g)]) {
        if (!in_mprime[static_cast<std::size_t>(i)]) continue;
        const Mother& mo = inst.mothers[static_cast<std::size_t>(i)];
        const Probabilities& p = inst.probabilities[static_cast<std::size_t>(i)];
        if (!opt.literal && (!mo.eligibility.contains(t) || !(p.gain(Intervention::VaccineDrive) > 0.0))) continue;
        Column c{ColumnKind::Z, Intervention::VaccineDrive, mo.id, t, g};
        c.objective = opt.literal ? p.drive : p.gain(Intervention::VaccineDrive);
        zs.push_back(c);
      }
      if (!opt.literal && (zs.empty() || prune.is_committed(g, t))) continue;
      Column x{ColumnKind::X, Intervention::VaccineDrive, -1, t, g};
      x.cost = costs.drive;
      x_of[k] = add_col(x);
      for (const auto& c : zs) {
        const int col = add_col(c);
        z_of[k].push_back(col);
        of_mother[c.mother_id].push_back(col);
      }
    }

  // Routes: q per (bus, plan at the bus's depot), u per picked mother.
  std::map<std::pair<int, int>, std::vector<int>> q_of_bus_day;
  std::vector<std::pair<int, std::vector<int>>> u_of_q;
  if (affordable(costs.route)) {
    for (const auto& bus : inst.fleet.buses)
      for (const auto& plan : pool.plans) {
        if (plan.depot_id != bus.depot_id || !plan.feasible || opt.blocked_bus_days.count({bus.id, plan.day})) continue;
        std::vector<Column> us;
        for (int id : plan.picked) {
          if (!in_mprime[inst.index_of(id)]) continue;
          const Probabilities& p = inst.probs(id);
          if (!opt.literal && (!inst.mother(id).eligibility.contains(plan.day) || !(p.gain(Intervention::BusPickup) > 0.0)))
            continue;
          Column c{ColumnKind::U, Intervention::BusPickup, id, plan.day, -1, bus.id, plan.route_id};
          c.objective = opt.literal ? p.bus : p.gain(Intervention::BusPickup);
          us.push_back(c);
        }
        if (!opt.literal && us.empty()) continue;
        Column q{ColumnKind::Q, Intervention::BusPickup, -1, plan.day, -1, bus.id, plan.route_id};
        q.cost = costs.route;
        const int qc = add_col(q);
        q_of_bus_day[{bus.id, plan.day}].push_back(qc);
        std::vector<int> ucols;
        for (const auto& c : us) {
          const int col = add_col(c);
          ucols.push_back(col);
          of_mother[c.mother_id].push_back(col);
        }
        u_of_q.emplace_back(qc, std::move(ucols));
      }
  }

  auto add_row = [&](RowFamily f, std::vector<std::pair<int, double>> terms, double rhs) {
    m.rows.push_back({f, std::move(terms), rhs});
  };

  // 1. Eligibility (literal mode only; otherwise encoded by the column domain).
  if (opt.literal)
    for (int col = 0; col < m.size(); ++col) {
      const Column& c = m.columns[static_cast<std::size_t>(col)];
      if (c.mother_id < 0) continue;
      add_row(RowFamily::Eligibility, {{col, 1.0}}, inst.mother(c.mother_id).eligibility.contains(c.day) ? 1.0 : 0.0);
    }

  // 2. Drives.
  for (std::size_t k = 0; k < x_of.size(); ++k) {
    if (x_of[k] < 0) continue;
    for (int z : z_of[k]) add_row(RowFamily::DriveLink, {{z, 1.0}, {x_of[k], -1.0}}, 0.0);
    if (!z_of[k].empty()) {
      std::vector<std::pair<int, double>> t;
      for (int z : z_of[k]) t.emplace_back(z, 1.0);
      add_row(RowFamily::DriveCapacity, std::move(t), inst.drive_capacity);
    }
  }

  // 3. Routes.
  for (const auto& [q, us] : u_of_q) {
    for (int u : us) add_row(RowFamily::RouteLink, {{u, 1.0}, {q, -1.0}}, 0.0);
    if (!us.empty()) {
      std::vector<std::pair<int, double>> t;
      for (int u : us) t.emplace_back(u, 1.0);
      add_row(RowFamily::BusCapacity, std::move(t), inst.fleet.capacity);
    }
  }
  for (const auto& [key, qs] : q_of_bus_day) {
    std::vector<std::pair<int, double>> t;
    for (int q : qs) t.emplace_back(q, 1.0);
    add_row(RowFamily::BusDay, std::move(t), 1.0);
  }

  // 4. One intervention per mother (y_n included in literal mode, otherwise
  // the model could count p_mn once per day).
  for (int id : m.mother_ids) {
    auto it = of_mother.find(id);
    if (it == of_mother.end()) continue;
    std::vector<std::pair<int, double>> t;
    for (int col : it->second) t.emplace_back(col, 1.0);
    add_row(RowFamily::Intervention, std::move(t), 1.0);
  }

  // 5. Budget in tenths.
  {
    std::vector<std::pair<int, double>> t;
    for (int col = 0; col < m.size(); ++col) {
      const Money c = m.columns[static_cast<std::size_t>(col)].cost;
      if (c > Money{}) t.emplace_back(col, static_cast<double>(c.in_tenths()));
    }
    add_row(RowFamily::Budget, std::move(t), static_cast<double>(budget.in_tenths()));
  }

  // Drive cap, reduced by drives pruning already spent.
  if (inst.drive_cap) {
    std::vector<std::pair<int, double>> t;
    for (int col = 0; col < m.size(); ++col)
      if (m.columns[static_cast<std::size_t>(col)].kind == ColumnKind::X) t.emplace_back(col, 1.0);
    add_row(RowFamily::DriveCap, std::move(t), std::max(0, *inst.drive_cap - static_cast<int>(prune.drives.size())));
  }

  if (opt.literal)
    for (int col = 0; col < m.size(); ++col) {
      const Column& c = m.columns[static_cast<std::size_t>(col)];
      if (c.kind == ColumnKind::X && prune.is_committed(c.cell, c.day)) add_row(RowFamily::PruneFix, {{col, 1.0}}, 0.0);
    }

  return m;
}

inline double model_objective(const IlpModel& m, const std::vector<char>& x) {
  double v = m.objective_constant;
  for (std::size_t j = 0; j < m.columns.size(); ++j)
    if (x[j]) v += m.columns[j].objective;
  return v;
}

// Index of the first violated row, or -1.
inline int first_violated_row(const IlpModel& m, const std::vector<char>& x) {
  for (std::size_t r = 0; r < m.rows.size(); ++r) {
    double lhs = 0;
    for (auto [j, a] : m.rows[r].terms) lhs += x[static_cast<std::size_t>(j)] ? a : 0.0;
    if (lhs > m.rows[r].rhs + 1e-9) return static_cast<int>(r);
  }
  return -1;
}

}  // namespace adviser
