#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adviser/core/error.hpp"
#include "adviser/core/grid.hpp"
#include "adviser/core/types.hpp"

namespace adviser {

struct Instance {
  std::vector<Mother> mothers;
  Grid grid;
  std::vector<VaccinationCenter> centers;
  std::vector<Depot> depots;
  Fleet fleet;
  int horizon = 30;
  Money budget;
  CostSchedule costs;
  double drive_radius_km = 2.0;
  int drive_capacity = 100;
  std::optional<int> drive_cap;
  ProbabilityTable probabilities;

  // Rebuilds the id lookup; call after editing `mothers`.
  void reindex() {
    id_index_.clear();
    id_index_.reserve(mothers.size());
    for (std::size_t i = 0; i < mothers.size(); ++i) id_index_.emplace_back(mothers[i].id, i);
    std::sort(id_index_.begin(), id_index_.end());
  }

  std::optional<std::size_t> find(int mother_id) const {
    if (id_index_.size() == mothers.size()) {
      auto it = std::lower_bound(id_index_.begin(), id_index_.end(), std::pair<int, std::size_t>{mother_id, 0});
      if (it != id_index_.end() && it->first == mother_id) return it->second;
      return std::nullopt;
    }
    for (std::size_t i = 0; i < mothers.size(); ++i)
      if (mothers[i].id == mother_id) return i;
    return std::nullopt;
  }

  std::size_t index_of(int mother_id) const {
    auto i = find(mother_id);
    if (!i) throw InputError("unknown mother id " + std::to_string(mother_id));
    return *i;
  }

  const Mother& mother(int mother_id) const { return mothers[index_of(mother_id)]; }
  const Probabilities& probs(int mother_id) const { return probabilities.at(index_of(mother_id)); }

  const Depot* depot(int id) const {
    for (const auto& d : depots)
      if (d.id == id) return &d;
    return nullptr;
  }
  const VaccinationCenter* center(int id) const {
    for (const auto& c : centers)
      if (c.id == id) return &c;
    return nullptr;
  }
  const Bus* bus(int id) const {
    for (const auto& b : fleet.buses)
      if (b.id == id) return &b;
    return nullptr;
  }

 private:
  std::vector<std::pair<int, std::size_t>> id_index_;
};

// a_mt: whether the mother may be targeted on the given day.
inline bool eligible(const Instance& inst, int mother_id, int day) {
  if (day < 1 || day > inst.horizon) throw InputError("day " + std::to_string(day) + " outside horizon");
  return inst.mother(mother_id).eligibility.contains(day);
}

// Subset of an instance restricted to the listed mothers (order preserved),
// sharing geography, fleet and costs.
inline Instance restrict_mothers(const Instance& inst, const std::vector<int>& mother_ids) {
  Instance out = inst;
  out.mothers.clear();
  out.probabilities.clear();
  for (int id : mother_ids) {
    const std::size_t i = inst.index_of(id);
    out.mothers.push_back(inst.mothers[i]);
    out.probabilities.push_back(inst.probabilities[i]);
  }
  out.reindex();
  return out;
}

}  // namespace adviser
