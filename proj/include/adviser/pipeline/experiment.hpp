#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "adviser/baselines/hilp.hpp"
#include "adviser/baselines/rwb.hpp"
#include "adviser/io/hash.hpp"
#include "adviser/io/json.hpp"
#include "adviser/pipeline/adviser.hpp"
#include "adviser/pipeline/scenario.hpp"

#ifndef ADVISER_GIT_REVISION
#define ADVISER_GIT_REVISION "unknown"
#endif

namespace adviser {

enum class Method { Adviser, Hilp, Rwb };

inline std::string_view method_name(Method m) {
  switch (m) {
    case Method::Adviser: return "adviser";
    case Method::Hilp: return "hilp";
    case Method::Rwb: return "rwb";
  }
  return "adviser";
}

inline Method parse_method(std::string_view s) {
  for (Method m : {Method::Adviser, Method::Hilp, Method::Rwb})
    if (method_name(m) == s) return m;
  throw ConfigError("unknown method '" + std::string(s) + "' (expected adviser, hilp or rwb)");
}

struct ExperimentConfig {
  std::string dataset = "d1";  // d1, d2 or file
  std::string instance_path;   // dataset = file
  int population = 2000;
  // Budgets are quoted at full scale and multiplied by population /
  // full_population unless scale_budgets is off.
  std::vector<double> budgets{7000, 7700, 8400};
  int full_population = 40000;
  bool scale_budgets = true;
  int horizon = 30;
  int drive_capacity = 100;  // γ_v
  int bus_capacity = 30;     // γ_l
  CostSchedule costs;
  std::optional<int> drive_cap;
  double drive_radius_km = 2.0;
  int centers = 32;
  int depots = 4;
  int buses_per_depot = 1;
  std::vector<std::uint64_t> seeds{1};
  std::vector<Method> methods{Method::Adviser, Method::Hilp, Method::Rwb};
  PlanConfig plan;
  HilpConfig hilp;
  RwbConfig rwb;
};

inline void check(const ExperimentConfig& c) {
  if (c.budgets.empty()) throw ConfigError("budget list is empty");
  if (c.methods.empty()) throw ConfigError("method list is empty");
  if (c.seeds.empty()) throw ConfigError("seed list is empty");
  for (double b : c.budgets)
    if (!(b >= 0)) throw ConfigError("budgets must be non-negative");
  if (c.dataset != "d1" && c.dataset != "d2" && c.dataset != "file") throw ConfigError("dataset must be d1, d2 or file, not '" + c.dataset + "'");
  if (c.dataset == "file" && c.instance_path.empty()) throw ConfigError("dataset file needs instance_path");
  if (c.dataset != "file" && c.population < 1) throw ConfigError("population must be at least 1");
  if (c.full_population < 1) throw ConfigError("full_population must be at least 1");
}

inline ExperimentConfig experiment_config_from_json(const io::json& j) {
  using io::json;
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  static const std::vector<std::string> known = {"dataset", "instance_path", "population", "budgets", "full_population", "scale_budgets",
                                                 "horizon", "drive_capacity", "bus_capacity", "costs", "drive_cap", "drive_radius_km",
                                                 "centers", "depots", "buses_per_depot", "seeds", "methods", "threshold_offset",
                                                 "gls_evaluations", "hilp_k", "hilp_k_min", "hilp_k_max"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) throw ConfigError("unknown experiment key '" + it.key() + "'");
  ExperimentConfig c;
  try {
    if (j.contains("dataset")) c.dataset = j["dataset"].get<std::string>();
    if (j.contains("instance_path")) c.instance_path = j["instance_path"].get<std::string>();
    if (j.contains("population")) c.population = j["population"].get<int>();
    if (j.contains("budgets")) c.budgets = j["budgets"].get<std::vector<double>>();
    if (j.contains("full_population")) c.full_population = j["full_population"].get<int>();
    if (j.contains("scale_budgets")) c.scale_budgets = j["scale_budgets"].get<bool>();
    if (j.contains("horizon")) c.horizon = j["horizon"].get<int>();
    if (j.contains("drive_capacity")) c.drive_capacity = j["drive_capacity"].get<int>();
    if (j.contains("bus_capacity")) c.bus_capacity = j["bus_capacity"].get<int>();
    if (j.contains("costs")) c.costs = io::costs_from(j["costs"], "experiment.costs");
    if (j.contains("drive_cap") && !j["drive_cap"].is_null()) c.drive_cap = j["drive_cap"].get<int>();
    if (j.contains("drive_radius_km")) c.drive_radius_km = j["drive_radius_km"].get<double>();
    if (j.contains("centers")) c.centers = j["centers"].get<int>();
    if (j.contains("depots")) c.depots = j["depots"].get<int>();
    if (j.contains("buses_per_depot")) c.buses_per_depot = j["buses_per_depot"].get<int>();
    if (j.contains("seeds")) c.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    if (j.contains("methods")) {
      c.methods.clear();
      for (const auto& m : j["methods"]) c.methods.push_back(parse_method(m.get<std::string>()));
    }
    if (j.contains("threshold_offset")) c.plan.threshold_offset = io::money_from(j, "threshold_offset", "experiment");
    if (j.contains("gls_evaluations")) {
      c.plan.routing.gls.max_evaluations = j["gls_evaluations"].get<long>();
      c.hilp.routing.gls.max_evaluations = c.rwb.routing.gls.max_evaluations = c.plan.routing.gls.max_evaluations;
    }
    if (j.contains("hilp_k") && !j["hilp_k"].is_null()) c.hilp.k = j["hilp_k"].get<int>();
    if (j.contains("hilp_k_min")) c.hilp.k_min = j["hilp_k_min"].get<int>();
    if (j.contains("hilp_k_max")) c.hilp.k_max = j["hilp_k_max"].get<int>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
  check(c);
  return c;
}

inline io::json experiment_config_json(const ExperimentConfig& c) {
  io::json methods = io::json::array();
  for (Method m : c.methods) methods.push_back(method_name(m));
  return {{"dataset", c.dataset},
          {"instance_path", c.instance_path},
          {"population", c.population},
          {"budgets", c.budgets},
          {"full_population", c.full_population},
          {"scale_budgets", c.scale_budgets},
          {"horizon", c.horizon},
          {"drive_capacity", c.drive_capacity},
          {"bus_capacity", c.bus_capacity},
          {"costs", io::costs_json(c.costs)},
          {"drive_cap", c.drive_cap ? io::json(*c.drive_cap) : io::json(nullptr)},
          {"drive_radius_km", c.drive_radius_km},
          {"centers", c.centers},
          {"depots", c.depots},
          {"buses_per_depot", c.buses_per_depot},
          {"seeds", c.seeds},
          {"methods", methods},
          {"threshold_offset", io::money_json(c.plan.threshold_offset)},
          {"gls_evaluations", c.plan.routing.gls.max_evaluations},
          {"hilp_k", c.hilp.k ? io::json(*c.hilp.k) : io::json(nullptr)},
          {"hilp_k_min", c.hilp.k_min},
          {"hilp_k_max", c.hilp.k_max}};
}

inline std::string config_hash(const ExperimentConfig& c) { return io::sha256_hex(experiment_config_json(c).dump()); }

struct ExperimentRow {
  std::string dataset;
  std::uint64_t seed = 0;
  Method method = Method::Adviser;
  double budget_full = 0;  // as quoted in the config
  Money budget;            // as run
  int population = 0;
  Allocation allocation;
  io::json counts;
  double recomputed = 0;  // objective from the validator
  bool valid = false;
  double wall_s = 0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::string git_revision = ADVISER_GIT_REVISION;
  std::string config_hash;
  std::vector<ExperimentRow> rows;
};

inline Money run_budget(const ExperimentConfig& c, double quoted, int population) {
  return c.scale_budgets ? scaled_budget(quoted, population, c.full_population) : Money::units(quoted);
}

inline Instance experiment_instance(const ExperimentConfig& c, std::uint64_t seed) {
  if (c.dataset == "file") {
    Instance inst = io::instance_from_json(io::read_json_file(c.instance_path));
    if (c.drive_cap) inst.drive_cap = c.drive_cap;
    io::throw_if_invalid_instance(inst);
    return inst;
  }
  SyntheticSpec syn;
  syn.dataset = c.dataset == "d2" ? Dataset::D2 : Dataset::D1;
  syn.population_size = c.population;
  syn.seed = seed;
  syn.source_pool = default_source_pool();
  syn.layout.horizon = c.horizon;
  syn.layout.max_window_days = std::min(syn.layout.max_window_days, c.horizon);
  syn.layout.min_window_days = std::min(syn.layout.min_window_days, syn.layout.max_window_days);
  ScenarioSpec sc;
  sc.centers = c.centers;
  sc.depots = c.depots;
  sc.buses_per_depot = c.buses_per_depot;
  sc.bus_capacity = c.bus_capacity;
  sc.costs = c.costs;
  sc.drive_radius_km = c.drive_radius_km;
  sc.drive_capacity = c.drive_capacity;
  sc.drive_cap = c.drive_cap;
  Instance inst = generate_instance(syn, sc);
  io::throw_if_invalid_instance(inst);
  return inst;
}

inline Allocation run_method(const Instance& inst, Method m, const ExperimentConfig& c) {
  switch (m) {
    case Method::Adviser: return adviser_plan(inst, c.plan).allocation;
    case Method::Hilp: return hilp_allocate(inst, c.hilp).allocation;
    case Method::Rwb: {
      Allocation a = rwb_allocate(inst, c.rwb);
      throw_if_invalid(inst, a, "rwb");
      return a;
    }
  }
  return {};
}

using ExperimentProgress = std::function<void(const ExperimentRow&)>;

// Rows come out seed-major, then budget, then method in config order.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg, const ExperimentProgress& progress = {}) {
  check(cfg);
  ExperimentReport rep;
  rep.config = cfg;
  rep.config_hash = config_hash(cfg);
  for (std::uint64_t seed : cfg.seeds) {
    Instance inst = experiment_instance(cfg, seed);
    for (double quoted : cfg.budgets) {
      inst.budget = run_budget(cfg, quoted, static_cast<int>(inst.mothers.size()));
      for (Method m : cfg.methods) {
        ExperimentRow row;
        row.dataset = cfg.dataset;
        row.seed = seed;
        row.method = m;
        row.budget_full = quoted;
        row.budget = inst.budget;
        row.population = static_cast<int>(inst.mothers.size());
        const auto t0 = std::chrono::steady_clock::now();
        row.allocation = run_method(inst, m, cfg);
        row.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        row.valid = validate_allocation(inst, row.allocation).empty() && row.allocation.total_cost <= inst.budget;
        row.recomputed = objective_unchecked(inst, row.allocation);
        row.counts = io::counts_json(inst, row.allocation);
        if (progress) progress(row);
        rep.rows.push_back(std::move(row));
      }
    }
  }
  return rep;
}

// Deterministic report: no wall times.
inline io::json report_json(const ExperimentReport& r) {
  io::json rows = io::json::array();
  for (const auto& x : r.rows)
    rows.push_back({{"dataset", x.dataset},
                    {"seed", x.seed},
                    {"method", method_name(x.method)},
                    {"budget_full", x.budget_full},
                    {"budget", io::money_json(x.budget)},
                    {"population", x.population},
                    {"objective", x.allocation.objective},
                    {"objective_recomputed", x.recomputed},
                    {"cost", io::money_json(x.allocation.total_cost)},
                    {"coverage", x.population ? x.allocation.objective / x.population : 0.0},
                    {"counts", x.counts},
                    {"valid", x.valid}});
  return {{"git_revision", r.git_revision}, {"config_hash", r.config_hash}, {"config", experiment_config_json(r.config)}, {"rows", rows}};
}

inline io::json report_timings_json(const ExperimentReport& r) {
  io::json rows = io::json::array();
  for (const auto& x : r.rows)
    rows.push_back({{"seed", x.seed}, {"method", method_name(x.method)}, {"budget_full", x.budget_full}, {"wall_s", x.wall_s}});
  return {{"config_hash", r.config_hash}, {"rows", rows}};
}

// One line per row, for plotting.
inline std::string report_csv(const ExperimentReport& r) {
  std::string out = "dataset,seed,method,budget_full,budget,population,objective,cost,coverage,none,call,voucher,bus,drive,drives,routes\n";
  auto num = [](double v) { return io::json(v).dump(); };
  for (const auto& x : r.rows) {
    out += x.dataset + "," + std::to_string(x.seed) + "," + std::string(method_name(x.method)) + "," + num(x.budget_full) + "," + x.budget.str() + "," +
           std::to_string(x.population) + "," + num(x.allocation.objective) + "," + x.allocation.total_cost.str() + "," +
           num(x.population ? x.allocation.objective / x.population : 0.0);
    for (const char* k : {"none", "call", "voucher", "bus", "drive", "drives", "routes"}) out += "," + x.counts[k].dump();
    out += "\n";
  }
  return out;
}

}  // namespace adviser
