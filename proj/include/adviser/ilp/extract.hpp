#pragma once

#include <map>

#include "adviser/core/allocation.hpp"
#include "adviser/core/error.hpp"
#include "adviser/core/validate.hpp"
#include "adviser/ilp/model.hpp"
#include "adviser/ilp/solver.hpp"

namespace adviser {

// ILP assignments plus the drives pruning committed, costed and scored.
inline Allocation extract_allocation(const Instance& inst, const IlpModel& m, const IlpSolution& sol, const RoutePool& pool,
                                     const PruneState& prune) {
  if (sol.status == SolveStatus::Infeasible) throw ContractError("cannot extract an allocation from an infeasible solve");
  Allocation a;
  append_pruned_drives(prune, a);

  std::map<std::pair<int, int>, std::size_t> drive_at;  // (cell, day) -> index in a.drives
  std::map<std::pair<int, int>, std::size_t> route_at;  // (bus, route) -> index in a.routes
  for (std::size_t j = 0; j < m.columns.size(); ++j) {
    if (!sol.x[j]) continue;
    const Column& c = m.columns[j];
    if (c.kind == ColumnKind::X) {
      drive_at[{c.cell, c.day}] = a.drives.size();
      a.drives.push_back({c.cell, c.day, {}});
    } else if (c.kind == ColumnKind::Q) {
      route_at[{c.bus_id, c.route_id}] = a.routes.size();
      a.routes.push_back({c.day, c.bus_id, c.route_id, pool.plan(c.route_id)});
    }
  }
  for (std::size_t j = 0; j < m.columns.size(); ++j) {
    if (!sol.x[j]) continue;
    const Column& c = m.columns[j];
    switch (c.kind) {
      case ColumnKind::Y:
        if (c.intervention != Intervention::None) a.assignments.push_back({c.mother_id, c.intervention, c.day});
        break;
      case ColumnKind::Z:
        a.drives[drive_at.at({c.cell, c.day})].mother_ids.push_back(c.mother_id);
        a.assignments.push_back({c.mother_id, Intervention::VaccineDrive, c.day, c.cell});
        break;
      case ColumnKind::U:
        a.assignments.push_back({c.mother_id, Intervention::BusPickup, c.day, -1, c.bus_id, c.route_id});
        break;
      default: break;
    }
  }
  a.total_cost = allocation_cost(inst, a);
  a.objective = objective_unchecked(inst, a);
  return a;
}

}  // namespace adviser
