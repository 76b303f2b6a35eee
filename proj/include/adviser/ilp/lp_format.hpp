#pragma once

#include <cmath>
#include <charconv>
#include <ostream>
#include <string>

#include "adviser/ilp/model.hpp"
#include "adviser/ilp/solver.hpp"

namespace adviser {

// Column names: x_t<day>_g<cell>, y_m<id>_t<day>_<none|call|voucher>,
// z_m<id>_t<day>_g<cell>, u_m<id>_t<day>_f<bus>_r<route>, q_t<day>_f<bus>_r<route>.
inline std::string column_name(const Column& c) {
  const auto s = [](int v) { return std::to_string(v); };
  switch (c.kind) {
    case ColumnKind::X: return "x_t" + s(c.day) + "_g" + s(c.cell);
    case ColumnKind::Y: return "y_m" + s(c.mother_id) + "_t" + s(c.day) + "_" + std::string(intervention_name(c.intervention));
    case ColumnKind::Z: return "z_m" + s(c.mother_id) + "_t" + s(c.day) + "_g" + s(c.cell);
    case ColumnKind::U: return "u_m" + s(c.mother_id) + "_t" + s(c.day) + "_f" + s(c.bus_id) + "_r" + s(c.route_id);
    case ColumnKind::Q: return "q_t" + s(c.day) + "_f" + s(c.bus_id) + "_r" + s(c.route_id);
  }
  return "";
}

// Shortest fixed-notation decimal that reads back to the same double.
inline std::string exact_decimal(double v) {
  char buf[400];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  return std::string(buf, r.ptr);
}

// CPLEX-LP-style text: objective, one named row per line, binaries, end.
// The constant term of an eliminated y_n is written as `+ <value> constant`.
inline void write_lp(std::ostream& os, const IlpModel& m) {
  os << "\\ adviser model: " << m.size() << " columns, " << m.rows.size() << " rows, budget " << m.budget.str()
     << (m.literal ? ", literal" : "") << "\n";
  os << "maximize\n obj:";
  for (const auto& c : m.columns)
    if (c.objective != 0.0) os << " + " << exact_decimal(c.objective) << " " << column_name(c);
  if (m.objective_constant != 0.0) os << " + " << exact_decimal(m.objective_constant) << " constant";
  os << "\nsubject to\n";
  for (std::size_t r = 0; r < m.rows.size(); ++r) {
    const Row& row = m.rows[r];
    os << " " << row_family_name(row.family) << "_" << r << ":";
    for (auto [j, a] : row.terms)
      os << " " << (a < 0 ? "- " : "+ ") << exact_decimal(std::abs(a)) << " " << column_name(m.columns[static_cast<std::size_t>(j)]);
    os << " <= " << exact_decimal(row.rhs) << "\n";
  }
  os << "binary\n";
  for (const auto& c : m.columns) os << " " << column_name(c) << "\n";
  os << "end\n";
}

// One `name 1` line per selected column, preceded by status and objective.
inline void write_solution(std::ostream& os, const IlpModel& m, const IlpSolution& s) {
  os << "status " << solve_status_name(s.status) << "\nobjective " << exact_decimal(s.objective) << "\nbound "
     << exact_decimal(s.bound) << "\nnodes " << s.nodes << "\n";
  for (std::size_t j = 0; j < m.columns.size(); ++j)
    if (s.x[j]) os << column_name(m.columns[j]) << " 1\n";
}

}  // namespace adviser
