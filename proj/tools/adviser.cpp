// adviser: command-line front end for planning, experiments, instance
// generation, bound checks and the planning service.

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <iostream>

#include "adviser/bounds/theorem.hpp"
#include "adviser/bounds/tiny.hpp"
#include "adviser/io/csv.hpp"
#include "adviser/pipeline/experiment.hpp"
#include "adviser/service/http.hpp"

using namespace adviser;
using io::json;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kValidation = 3 };

std::string sidecar_path(const std::string& out) {
  const std::string suffix = ".json";
  const std::string stem = out.size() > suffix.size() && out.compare(out.size() - suffix.size(), suffix.size(), suffix) == 0 ? out.substr(0, out.size() - suffix.size()) : out;
  return stem + ".timings.json";
}

void emit(const std::string& out, const std::string& bytes) {
  if (out.empty() || out == "-") std::cout << bytes;
  else io::write_file(out, bytes);
}

ExperimentConfig method_settings(const std::string& path) {
  if (path.empty()) return {};
  return experiment_config_from_json(io::read_json_file(path));
}

// ---- plan ----

struct PlanArgs {
  std::string instance, config, out, timings, method = "adviser";
  std::optional<double> budget;
  std::optional<int> drive_cap;
};

int cmd_plan(const PlanArgs& a) {
  const ExperimentConfig settings = method_settings(a.config);
  const Method method = parse_method(a.method);
  Instance inst = io::instance_from_json(io::read_json_file(a.instance));
  if (a.budget) {
    if (*a.budget < 0) throw ConfigError("--budget must be non-negative");
    inst.budget = Money::units(*a.budget);
  }
  if (a.drive_cap) inst.drive_cap = *a.drive_cap;
  io::throw_if_invalid_instance(inst);

  json summary;
  Allocation alloc;
  json timings;
  if (method == Method::Adviser) {
    const PlanResult r = adviser_plan(inst, settings.plan);
    summary = io::plan_summary_json(inst, r);
    alloc = r.allocation;
    timings = io::timings_json(r.timings);
  } else {
    const auto t0 = std::chrono::steady_clock::now();
    alloc = run_method(inst, method, settings);
    timings = {{"total_s", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
    summary = {{"objective", alloc.objective},
               {"total_cost", io::money_json(alloc.total_cost)},
               {"budget", io::money_json(inst.budget)},
               {"population", inst.mothers.size()},
               {"coverage", inst.mothers.empty() ? 0.0 : alloc.objective / static_cast<double>(inst.mothers.size())},
               {"counts", io::counts_json(inst, alloc)}};
  }
  const json out = {{"method", method_name(method)},
                    {"instance_sha256", io::sha256_hex(io::canonical(io::instance_json(inst)))},
                    {"summary", summary},
                    {"allocation", io::allocation_json(inst, alloc)}};
  emit(a.out, io::canonical(out));
  if (!a.out.empty() && a.out != "-") io::write_file(a.timings.empty() ? sidecar_path(a.out) : a.timings, io::canonical(timings));
  std::cerr << method_name(method) << ": objective " << alloc.objective << ", cost " << alloc.total_cost.str() << " of " << inst.budget.str() << "\n";
  return kOk;
}

// ---- experiment ----

struct ExperimentArgs {
  std::string config, out, csv, timings;
  bool quiet = false;
};

int cmd_experiment(const ExperimentArgs& a) {
  const ExperimentConfig cfg = experiment_config_from_json(io::read_json_file(a.config));
  const auto rep = run_experiment(cfg, [&](const ExperimentRow& r) {
    if (!a.quiet)
      std::cerr << "seed " << r.seed << " budget " << r.budget.str() << " " << method_name(r.method) << ": objective " << r.allocation.objective << " ("
                << r.wall_s << " s)\n";
  });
  emit(a.out, io::canonical(report_json(rep)));
  if (!a.out.empty() && a.out != "-") io::write_file(a.timings.empty() ? sidecar_path(a.out) : a.timings, io::canonical(report_timings_json(rep)));
  if (!a.csv.empty()) io::write_file(a.csv, report_csv(rep));
  for (const auto& r : rep.rows)
    if (!r.valid) {
      std::cerr << "invalid allocation from " << method_name(r.method) << " at budget " << r.budget.str() << "\n";
      return kValidation;
    }
  return kOk;
}

// ---- generate ----

struct GenerateArgs {
  std::string dataset = "d1", out, csv_dir;
  int size = 2000;
  std::uint64_t seed = 1;
  std::optional<double> budget;  // as run
  double budget_full = 7000;     // scaled by size / 40000 when --budget is absent
  std::optional<int> drive_cap;
  bool cheap_drives = false;
};

int cmd_generate(const GenerateArgs& a) {
  Instance inst;
  if (a.dataset == "tiny") {
    TinySpec spec;
    spec.cheap_drives = a.cheap_drives;
    inst = tiny_instance(a.seed, spec);
    if (a.budget) inst.budget = Money::units(*a.budget);
  } else if (a.dataset == "d1" || a.dataset == "d2") {
    ExperimentConfig c;
    c.dataset = a.dataset;
    c.population = a.size;
    c.drive_cap = a.drive_cap;
    inst = experiment_instance(c, a.seed);
    inst.budget = a.budget ? Money::units(*a.budget) : run_budget(c, a.budget_full, a.size);
  } else {
    throw ConfigError("--dataset must be d1, d2 or tiny");
  }
  if (a.budget && *a.budget < 0) throw ConfigError("--budget must be non-negative");
  if (a.drive_cap) inst.drive_cap = a.drive_cap;
  io::throw_if_invalid_instance(inst);
  emit(a.out, io::canonical(io::instance_json(inst)));
  if (!a.csv_dir.empty()) {
    std::filesystem::create_directories(a.csv_dir);
    const std::filesystem::path d = a.csv_dir;
    io::write_file((d / "mothers.csv").string(), io::mothers_csv(inst));
    io::write_file((d / "centers.csv").string(), io::centers_csv(inst));
    io::write_file((d / "depots.csv").string(), io::depots_csv(inst));
    const json full = io::instance_json(inst);
    json cfg = {{"budget", full["budget"]},
                {"horizon", inst.horizon},
                {"costs", full["costs"]},
                {"drive_radius_km", inst.drive_radius_km},
                {"drive_capacity", inst.drive_capacity},
                {"drive_cap", full["drive_cap"]},
                {"bus_capacity", inst.fleet.capacity},
                {"buses_per_depot", inst.depots.empty() ? 0 : static_cast<int>(inst.fleet.buses.size() / inst.depots.size())},
                {"grid", full["grid"]}};
    io::write_file((d / "config.json").string(), io::canonical(cfg));
  }
  return kOk;
}

// ---- bounds ----

struct BoundsArgs {
  std::string instance, out;
  double cap = kBruteForceCap;
  long gls_evaluations = 500;
};

int cmd_bounds(const BoundsArgs& a) {
  const Instance inst = io::instance_from_json(io::read_json_file(a.instance));
  io::throw_if_invalid_instance(inst);
  BoundConfig cfg;
  cfg.routing.gls.max_evaluations = a.gls_evaluations;
  cfg.brute_force_cap = a.cap;
  const BoundReport r = verify_theorem1(inst, cfg);
  emit(a.out, io::canonical(io::bound_report_json(r)));
  std::cerr << "O_H " << r.o_h << ", O* " << r.o_star << ", gap term " << r.gap_term << ", assumptions " << (r.assumptions_hold ? "hold" : "fail")
            << ", proposition " << (r.prop1_holds ? "holds" : "fails") << ", theorem " << (r.theorem_holds ? "holds" : "fails") << "\n";
  return kOk;
}

// ---- serve ----

struct ServeArgs {
  std::string host = "127.0.0.1", data_dir, ui_dir = "ui", config;
  int port = 8080;
  std::size_t queue_depth = 64;
};

httplib::Server* g_server = nullptr;

int cmd_serve(const ServeArgs& a) {
  service::ServiceConfig cfg;
  std::string dir = a.data_dir;
  if (dir.empty())
    if (const char* env = std::getenv("ADVISER_DATA_DIR")) dir = env;
  if (dir.empty()) throw ConfigError("--data-dir or ADVISER_DATA_DIR is required");
  cfg.data_dir = dir;
  cfg.queue_depth = a.queue_depth;
  cfg.methods = method_settings(a.config);
  service::PlanService svc(cfg);
  httplib::Server svr;
  service::mount_api(svr, svc, a.ui_dir);
  g_server = &svr;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_server) g_server->stop();
  });
  std::cerr << "listening on http://" << a.host << ":" << a.port << " (data " << dir << ")\n";
  if (!svr.listen(a.host, a.port)) {
    std::cerr << "cannot listen on " << a.host << ":" << a.port << "\n";
    return kFailure;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Budgeted intervention planning: greedy drives, bus routes and an exact ILP"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("adviser ") + ADVISER_GIT_REVISION);

  PlanArgs plan;
  auto* p = app.add_subcommand("plan", "Plan one instance");
  p->add_option("--instance", plan.instance, "Instance JSON")->required()->check(CLI::ExistingFile);
  p->add_option("--config", plan.config, "Method settings (experiment config keys)")->check(CLI::ExistingFile);
  p->add_option("--out", plan.out, "Output JSON (default stdout)");
  p->add_option("--timings", plan.timings, "Timings sidecar (default <out>.timings.json)");
  p->add_option("--method", plan.method, "adviser, hilp or rwb");
  p->add_option("--budget", plan.budget, "Override the instance budget");
  p->add_option("--drive-cap", plan.drive_cap, "Cap the number of vaccine drives");

  ExperimentArgs exp;
  auto* e = app.add_subcommand("experiment", "Run a budget sweep");
  e->add_option("--config", exp.config, "Experiment config JSON")->required()->check(CLI::ExistingFile);
  e->add_option("--out", exp.out, "Report JSON (default stdout)");
  e->add_option("--csv", exp.csv, "Plot table");
  e->add_option("--timings", exp.timings, "Timings sidecar (default <out>.timings.json)");
  e->add_flag("--quiet", exp.quiet, "No progress lines");

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate a synthetic instance");
  g->add_option("--dataset", gen.dataset, "d1, d2 or tiny");
  g->add_option("--size", gen.size, "Population (d1, d2)");
  g->add_option("--seed", gen.seed, "Seed");
  g->add_option("--out", gen.out, "Instance JSON (default stdout)");
  g->add_option("--budget", gen.budget, "Budget as run");
  g->add_option("--budget-full", gen.budget_full, "Budget quoted for 40000 mothers, scaled to --size");
  g->add_option("--drive-cap", gen.drive_cap, "Cap the number of vaccine drives");
  g->add_option("--csv-dir", gen.csv_dir, "Also write upload files (three CSVs and config.json) here");
  g->add_flag("--cheap-drives", gen.cheap_drives, "tiny: drive cost close to two vouchers");

  BoundsArgs bnd;
  auto* b = app.add_subcommand("bounds", "Compare the pipeline with brute force on a small instance");
  b->add_option("--instance", bnd.instance, "Instance JSON")->required()->check(CLI::ExistingFile);
  b->add_option("--out", bnd.out, "Report JSON (default stdout)");
  b->add_option("--cap", bnd.cap, "Refuse searches larger than this many leaves");
  b->add_option("--gls-evaluations", bnd.gls_evaluations, "Route search budget");

  ServeArgs srv;
  auto* s = app.add_subcommand("serve", "Run the planning service");
  s->add_option("--host", srv.host, "Bind address");
  s->add_option("--port", srv.port, "Port");
  s->add_option("--data-dir", srv.data_dir, "Store directory (default $ADVISER_DATA_DIR)");
  s->add_option("--ui-dir", srv.ui_dir, "Static files served under /ui");
  s->add_option("--config", srv.config, "Method settings (experiment config keys)")->check(CLI::ExistingFile);
  s->add_option("--queue-depth", srv.queue_depth, "Maximum queued plans");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*p) return cmd_plan(plan);
    if (*e) return cmd_experiment(exp);
    if (*g) return cmd_generate(gen);
    if (*b) return cmd_bounds(bnd);
    if (*s) return cmd_serve(srv);
  } catch (const ValidationError& err) {
    std::cerr << "validation failed: " << err.what() << "\n";
    return kValidation;
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kConfig;
  } catch (const InputError& err) {
    std::cerr << "input error: " << err.what() << "\n";
    return kConfig;
  } catch (const SizeError& err) {
    std::cerr << "too large: " << err.what() << "\n";
    return kConfig;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kFailure;
  }
  return kOk;
}
