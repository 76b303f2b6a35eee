#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "adviser/core/error.hpp"
#include "adviser/core/instance.hpp"
#include "adviser/core/validate.hpp"
#include "adviser/estimation/synthetic.hpp"
#include "adviser/io/json.hpp"

namespace adviser::io {

// Column names are part of the upload contract; keep them in sync with the
// README.
inline const std::vector<std::string> kMotherColumns = {"id", "lat", "lon", "elig_start", "elig_end", "pickup_earliest", "pickup_latest",
                                                        "income_level", "child_age_months", "prior_reminder", "prior_vaccination"};
inline const std::vector<std::string> kProbabilityColumns = {"p_n", "p_c", "p_t", "p_l", "p_v"};
inline const std::vector<std::string> kCenterColumns = {"id", "lat", "lon", "dropoff_earliest", "dropoff_latest", "depot_id"};
inline const std::vector<std::string> kDepotColumns = {"id", "lat", "lon"};

// Raised for anything wrong with an uploaded file. `row` is the 1-based data
// row (0 for the header or the file as a whole).
struct SchemaError : InputError {
  SchemaError(std::string file_, int row_, std::string column_, const std::string& what)
      : InputError(file_ + (row_ ? " row " + std::to_string(row_) : std::string()) + (column_.empty() ? "" : " column '" + column_ + "'") + ": " + what),
        file(std::move(file_)), row(row_), column(std::move(column_)) {}
  std::string file;
  int row;
  std::string column;
};

struct CsvTable {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::map<std::string, std::size_t> index;

  bool has(const std::string& col) const { return index.count(col) != 0; }
};

// Comma separated, optional double-quoted fields ("" escapes a quote),
// LF or CRLF line ends. Blank lines are skipped.
inline CsvTable parse_csv(std::string_view text, const std::string& name) {
  CsvTable t;
  t.name = name;
  std::vector<std::vector<std::string>> lines;
  std::vector<std::string> rec;
  std::string field;
  bool quoted = false, any = false;
  auto end_field = [&]() {
    rec.push_back(field);
    field.clear();
  };
  auto end_record = [&]() {
    end_field();
    if (!(rec.size() == 1 && rec[0].empty())) lines.push_back(rec);
    rec.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    any = true;
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') field += '"', ++i;
        else quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      end_record();
    } else if (c != '\r') {
      field += c;
    }
  }
  if (quoted) throw SchemaError(name, static_cast<int>(lines.size()), "", "unterminated quoted field");
  if (any && (!field.empty() || !rec.empty())) end_record();
  if (lines.empty()) throw SchemaError(name, 0, "", "empty file, expected a header row");
  t.header = lines.front();
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    std::string h = t.header[c];
    h.erase(0, h.find_first_not_of(" \t"));
    h.erase(h.find_last_not_of(" \t") + 1);
    if (c == 0 && h.rfind("\xEF\xBB\xBF", 0) == 0) h.erase(0, 3);
    t.header[c] = h;
    if (!t.index.emplace(h, c).second) throw SchemaError(name, 0, h, "duplicate column");
  }
  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (lines[r].size() != t.header.size())
      throw SchemaError(name, static_cast<int>(r), "", "expected " + std::to_string(t.header.size()) + " fields, got " + std::to_string(lines[r].size()));
    t.rows.push_back(std::move(lines[r]));
  }
  return t;
}

inline void require_columns(const CsvTable& t, const std::vector<std::string>& required, const std::vector<std::string>& optional = {}) {
  for (const auto& c : required)
    if (!t.has(c)) throw SchemaError(t.name, 0, c, "missing column");
  for (const auto& h : t.header)
    if (std::find(required.begin(), required.end(), h) == required.end() && std::find(optional.begin(), optional.end(), h) == optional.end())
      throw SchemaError(t.name, 0, h, "unknown column");
}

namespace detail {

inline std::string_view trimmed(const std::string& s) {
  std::string_view v = s;
  while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
  while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.remove_suffix(1);
  return v;
}

inline const std::string& cell(const CsvTable& t, std::size_t r, const std::string& col) { return t.rows[r][t.index.at(col)]; }

inline int csv_int(const CsvTable& t, std::size_t r, const std::string& col) {
  const auto v = trimmed(cell(t, r, col));
  int out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size())
    throw SchemaError(t.name, static_cast<int>(r + 1), col, "expected an integer, got '" + std::string(v) + "'");
  return out;
}

inline double csv_double(const CsvTable& t, std::size_t r, const std::string& col) {
  const auto v = trimmed(cell(t, r, col));
  double out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out))
    throw SchemaError(t.name, static_cast<int>(r + 1), col, "expected a finite number, got '" + std::string(v) + "'");
  return out;
}

inline bool csv_bool(const CsvTable& t, std::size_t r, const std::string& col) {
  const auto v = trimmed(cell(t, r, col));
  if (v == "0") return false;
  if (v == "1") return true;
  throw SchemaError(t.name, static_cast<int>(r + 1), col, "expected 0 or 1, got '" + std::string(v) + "'");
}

}  // namespace detail

struct MotherRows {
  std::vector<Mother> mothers;
  std::optional<ProbabilityTable> probabilities;  // present iff the p_* columns were
};

inline MotherRows read_mothers(const CsvTable& t) {
  using namespace detail;
  require_columns(t, kMotherColumns, kProbabilityColumns);
  int prob_cols = 0;
  for (const auto& c : kProbabilityColumns) prob_cols += t.has(c);
  if (prob_cols != 0 && prob_cols != 5)
    for (const auto& c : kProbabilityColumns)
      if (!t.has(c)) throw SchemaError(t.name, 0, c, "missing column (probability columns come all together or not at all)");
  MotherRows out;
  if (prob_cols) out.probabilities.emplace();
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Mother m;
    m.id = csv_int(t, r, "id");
    m.location = {csv_double(t, r, "lat"), csv_double(t, r, "lon")};
    m.eligibility = {csv_int(t, r, "elig_start"), csv_int(t, r, "elig_end")};
    m.pickup_window = {csv_int(t, r, "pickup_earliest"), csv_int(t, r, "pickup_latest")};
    m.features.income_level = csv_int(t, r, "income_level");
    m.features.child_age_months = csv_int(t, r, "child_age_months");
    m.features.prior_reminder = csv_bool(t, r, "prior_reminder");
    m.features.prior_vaccination = csv_bool(t, r, "prior_vaccination");
    out.mothers.push_back(m);
    if (prob_cols)
      out.probabilities->push_back({csv_double(t, r, "p_n"), csv_double(t, r, "p_c"), csv_double(t, r, "p_t"), csv_double(t, r, "p_l"),
                                    csv_double(t, r, "p_v")});
  }
  return out;
}

inline std::vector<VaccinationCenter> read_centers(const CsvTable& t) {
  using namespace detail;
  require_columns(t, kCenterColumns);
  std::vector<VaccinationCenter> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    out.push_back({csv_int(t, r, "id"), {csv_double(t, r, "lat"), csv_double(t, r, "lon")},
                   {csv_int(t, r, "dropoff_earliest"), csv_int(t, r, "dropoff_latest")}, csv_int(t, r, "depot_id")});
  return out;
}

inline std::vector<Depot> read_depots(const CsvTable& t) {
  using namespace detail;
  require_columns(t, kDepotColumns);
  std::vector<Depot> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) out.push_back({csv_int(t, r, "id"), {csv_double(t, r, "lat"), csv_double(t, r, "lon")}});
  return out;
}

// ---- writing ----

inline std::string csv_number(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

inline std::string join(const std::vector<std::string>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + xs[i];
  return s + "\n";
}

inline std::string mothers_csv(const Instance& inst, bool with_probabilities = true) {
  std::vector<std::string> header = kMotherColumns;
  if (with_probabilities) header.insert(header.end(), kProbabilityColumns.begin(), kProbabilityColumns.end());
  std::string out = join(header);
  for (std::size_t i = 0; i < inst.mothers.size(); ++i) {
    const Mother& m = inst.mothers[i];
    std::vector<std::string> row = {std::to_string(m.id), csv_number(m.location.lat), csv_number(m.location.lon),
                                    std::to_string(m.eligibility.first_day), std::to_string(m.eligibility.last_day),
                                    std::to_string(m.pickup_window.earliest), std::to_string(m.pickup_window.latest),
                                    std::to_string(m.features.income_level), std::to_string(m.features.child_age_months),
                                    m.features.prior_reminder ? "1" : "0", m.features.prior_vaccination ? "1" : "0"};
    if (with_probabilities) {
      const auto& p = inst.probabilities.at(i);
      for (double v : {p.none, p.call, p.voucher, p.bus, p.drive}) row.push_back(csv_number(v));
    }
    out += join(row);
  }
  return out;
}

inline std::string centers_csv(const Instance& inst) {
  std::string out = join(kCenterColumns);
  for (const auto& c : inst.centers)
    out += join({std::to_string(c.id), csv_number(c.location.lat), csv_number(c.location.lon), std::to_string(c.dropoff_window.earliest),
                 std::to_string(c.dropoff_window.latest), std::to_string(c.depot_id)});
  return out;
}

inline std::string depots_csv(const Instance& inst) {
  std::string out = join(kDepotColumns);
  for (const auto& d : inst.depots) out += join({std::to_string(d.id), csv_number(d.location.lat), csv_number(d.location.lon)});
  return out;
}

// ---- config.json for uploads ----

// Everything an upload needs besides the three CSV files. Missing keys take
// the defaults below; only `budget` is required.
struct InstanceConfig {
  int horizon = 30;
  Money budget;
  CostSchedule costs;
  double drive_radius_km = 2.0;
  int drive_capacity = 100;
  std::optional<int> drive_cap;
  int bus_capacity = 30;
  int buses_per_depot = 1;
  double cell_km = 1.0;
  std::optional<Grid> grid;  // default: smallest grid covering every site
  // Used only when mothers.csv carries no probability columns.
  std::uint64_t estimation_seed = 1;
  double vaccination_rate = 0.04;
  UntestedConstants constants;
};

inline InstanceConfig instance_config_from_json(const json& j, const std::string& where = "config.json") {
  using namespace adviser::io::detail;
  if (!j.is_object()) throw InputError(where + ": expected an object");
  static const std::vector<std::string> known = {"horizon", "budget", "costs", "drive_radius_km", "drive_capacity", "drive_cap", "bus_capacity",
                                                 "buses_per_depot", "cell_km", "grid", "estimation"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) throw InputError(where + "." + it.key() + ": unknown key");
  InstanceConfig c;
  c.budget = money_from(j, "budget", where);
  if (j.contains("horizon")) c.horizon = integer(j, "horizon", where);
  if (j.contains("costs")) c.costs = costs_from(j["costs"], where + ".costs");
  if (j.contains("drive_radius_km")) c.drive_radius_km = num(j, "drive_radius_km", where);
  if (j.contains("drive_capacity")) c.drive_capacity = integer(j, "drive_capacity", where);
  if (j.contains("drive_cap") && !j["drive_cap"].is_null()) c.drive_cap = integer(j, "drive_cap", where);
  if (j.contains("bus_capacity")) c.bus_capacity = integer(j, "bus_capacity", where);
  if (j.contains("buses_per_depot")) c.buses_per_depot = integer(j, "buses_per_depot", where);
  if (j.contains("cell_km")) c.cell_km = num(j, "cell_km", where);
  if (c.cell_km <= 0) throw InputError(where + ".cell_km: must be positive");
  if (c.buses_per_depot < 0) throw InputError(where + ".buses_per_depot: must be non-negative");
  if (j.contains("grid")) {
    const json& g = j["grid"];
    const std::string gw = where + ".grid";
    const json& sw = member(g, "south_west", gw);
    c.grid = Grid({num(sw, "lat", gw + ".south_west"), num(sw, "lon", gw + ".south_west")}, integer(g, "rows", gw), integer(g, "cols", gw),
                  num(g, "cell_km", gw));
  }
  if (j.contains("estimation")) {
    const json& e = j["estimation"];
    const std::string ew = where + ".estimation";
    if (e.contains("seed")) {
      if (!e["seed"].is_number_integer() || e["seed"].get<std::int64_t>() < 0) throw InputError(ew + ".seed: expected a non-negative integer");
      c.estimation_seed = e["seed"].get<std::uint64_t>();
    }
    if (e.contains("vaccination_rate")) c.vaccination_rate = num(e, "vaccination_rate", ew);
    if (e.contains("voucher") && !e["voucher"].is_null()) c.constants.voucher = num(e, "voucher", ew);
    if (e.contains("bus") && !e["bus"].is_null()) c.constants.bus = num(e, "bus", ew);
  }
  return c;
}

// Smallest grid of `cell_km` cells, anchored a hair south-west of the
// southernmost latitude and westernmost longitude, covering every point.
inline Grid covering_grid(const std::vector<GeoPoint>& pts, double cell_km) {
  if (pts.empty()) return Grid({0, 0}, 1, 1, cell_km);
  GeoPoint sw = pts.front();
  for (const auto& p : pts) sw.lat = std::min(sw.lat, p.lat), sw.lon = std::min(sw.lon, p.lon);
  sw.lat -= 1e-6, sw.lon -= 1e-6;
  const LocalProjection proj(sw);
  double mx = 0, my = 0;
  for (const auto& p : pts) {
    const auto q = proj.project(p);
    mx = std::max(mx, q.x), my = std::max(my, q.y);
  }
  return Grid(sw, static_cast<int>(std::floor(my / cell_km)) + 1, static_cast<int>(std::floor(mx / cell_km)) + 1, cell_km);
}

struct IngestResult {
  Instance instance;
  bool estimated = false;  // probabilities filled by the D2 estimator
  int clamped = 0;
};

// Builds and validates an instance from uploaded files. Without probability
// columns the D2 protocol is trained on the uploaded mothers' features and
// fills every row.
inline IngestResult ingest_instance(std::string_view mothers_text, std::string_view centers_text, std::string_view depots_text,
                                    const json& config) {
  const InstanceConfig cfg = instance_config_from_json(config);
  MotherRows mr = read_mothers(parse_csv(mothers_text, "mothers.csv"));
  IngestResult out;
  Instance& inst = out.instance;
  inst.centers = read_centers(parse_csv(centers_text, "centers.csv"));
  inst.depots = read_depots(parse_csv(depots_text, "depots.csv"));
  inst.horizon = cfg.horizon;
  inst.budget = cfg.budget;
  inst.costs = cfg.costs;
  inst.drive_radius_km = cfg.drive_radius_km;
  inst.drive_capacity = cfg.drive_capacity;
  inst.drive_cap = cfg.drive_cap;
  inst.fleet.capacity = cfg.bus_capacity;
  int bus_id = 1;
  for (const auto& d : inst.depots)
    for (int k = 0; k < cfg.buses_per_depot; ++k) inst.fleet.buses.push_back({bus_id++, d.id});

  if (cfg.grid) {
    inst.grid = *cfg.grid;
  } else {
    std::vector<GeoPoint> pts;
    for (const auto& m : mr.mothers) pts.push_back(m.location);
    for (const auto& c : inst.centers) pts.push_back(c.location);
    for (const auto& d : inst.depots) pts.push_back(d.location);
    inst.grid = covering_grid(pts, cfg.cell_km);
  }
  for (auto& m : mr.mothers) m.cell = inst.grid.cell_of(m.location);
  inst.mothers = std::move(mr.mothers);

  if (mr.probabilities) {
    inst.probabilities = std::move(*mr.probabilities);
  } else if (!inst.mothers.empty()) {
    SyntheticSpec spec;
    spec.dataset = Dataset::D2;
    spec.seed = cfg.estimation_seed;
    spec.d2.vaccination_rate = cfg.vaccination_rate;
    for (const auto& m : inst.mothers) spec.source_pool.push_back(m.features);
    const D2Report rep = train_d2_models(spec);
    const auto table = assemble_probability_table(spec.source_pool, rep.model_none, rep.model_call, cfg.constants,
                                                  split_seed(spec.seed, adviser::detail::kProbStream));
    inst.probabilities = table.table;
    out.estimated = true;
    out.clamped = table.clamped;
  }
  inst.reindex();
  throw_if_invalid_instance(inst);
  return out;
}

}  // namespace adviser::io
