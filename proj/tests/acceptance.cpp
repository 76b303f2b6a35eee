// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// fails. Criterion names may be given on the command line to run a subset.
//
// Counterexamples found by the theorem campaign are written to
// ./acceptance-counterexamples/.

#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "adviser/bounds/theorem.hpp"
#include "adviser/bounds/tiny.hpp"
#include "adviser/io/json.hpp"
#include "adviser/pipeline/experiment.hpp"
#include "support/fixtures.hpp"

#ifndef ADVISER_CLI_PATH
#error "ADVISER_CLI_PATH must name the adviser executable"
#endif

using namespace adviser;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct Verdict {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail.clear();
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
};

// Every allocation the run emits goes through here.
struct ValidatorTally {
  long checked = 0;
  std::vector<std::string> bad;
  void check(const Instance& inst, const Allocation& a, const std::string& what) {
    ++checked;
    const auto v = validate_allocation(inst, a);
    if (!v.empty()) bad.push_back(what + ": " + v.front().entity + " " + v.front().rule);
    else if (a.total_cost > inst.budget) bad.push_back(what + ": over budget");
  }
} g_validator;

struct ProbabilityTally {
  long rows = 0;
  std::vector<std::string> bad;
  void check(const Instance& inst, const std::string& what) {
    for (std::size_t i = 0; i < inst.probabilities.size(); ++i, ++rows)
      if (!inst.probabilities[i].ordered()) bad.push_back(what + " mother " + std::to_string(inst.mothers[i].id));
  }
} g_probabilities;

// ---- oracle ----

Verdict oracle() {
  Verdict v;
  const auto t0 = Clock::now();
  int mismatches = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Instance inst = tiny_instance(seed);
    g_probabilities.check(inst, "tiny " + std::to_string(seed));
    const RoutePool pool = tiny_pool(inst);
    const auto bf = brute_force_optimum(inst, pool);
    const auto model = build_model(inst, pool, empty_prune_state(inst), inst.budget);
    const auto sol = solve(model);
    g_validator.check(inst, bf.allocation, "brute force tiny " + std::to_string(seed));
    if (sol.objective != bf.objective) {
      if (++mismatches <= 3) v.fail(fmt("seed %lu: ilp %.17g brute force %.17g", static_cast<unsigned long>(seed), sol.objective, bf.objective));
    }
  }
  const double secs = since(t0);
  if (mismatches > 3) v.fail(fmt("%d mismatches in total", mismatches));
  if (secs >= 300) v.fail(fmt("took %.1f s, limit 300 s", secs));
  if (v.pass) v.detail = fmt("200 tiny instances, ilp == brute force exactly, %.1f s", secs);
  return v;
}

// ---- theorem campaign ----

void dump_counterexample(const Instance& inst, std::uint64_t seed, const BoundReport& r) {
  fs::create_directories("acceptance-counterexamples");
  io::json j = {{"seed", seed}, {"generator", "tiny, cheap drives"}, {"report", io::bound_report_json(r)}, {"instance", io::instance_json(inst)}};
  io::write_file("acceptance-counterexamples/seed-" + std::to_string(seed) + ".json", io::canonical(j));
}

Verdict theorem() {
  Verdict v;
  TinySpec spec;
  spec.cheap_drives = true;
  int passed_gate = 0, with_drives = 0, theorem_fail = 0, prop_fail = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> bad;
  for (; passed_gate < 200; ++seed) {
    const Instance inst = tiny_instance(seed, spec);
    g_probabilities.check(inst, "cheap tiny " + std::to_string(seed));
    const BoundReport r = verify_theorem1(inst);
    if (!r.assumptions_hold) continue;
    ++passed_gate;
    with_drives += r.k > 0;
    const bool t_ok = r.o_h >= r.o_star - r.gap_term - 1e-9;
    theorem_fail += !t_ok;
    prop_fail += !r.prop1_holds;
    if (!t_ok || !r.prop1_holds) {
      bad.push_back(seed);
      dump_counterexample(inst, seed, r);
    }
  }
  const std::string stats = fmt("%d gated instances (seeds 0..%lu, %d with pruned drives)", passed_gate, static_cast<unsigned long>(seed - 1), with_drives);
  if (!bad.empty()) {
    std::string seeds;
    for (auto s : bad) seeds += (seeds.empty() ? "" : ",") + std::to_string(s);
    v.fail(fmt("%d theorem and %d proposition failures at seeds %s, dumped to acceptance-counterexamples/; %s", theorem_fail, prop_fail, seeds.c_str(), stats.c_str()));
  } else {
    v.detail = stats + ", bound and proposition hold on all";
  }
  return v;
}

// ---- the population-2000 sweep shared by ordering, runtime and drive cap ----

struct Sweep {
  std::string dataset;
  ExperimentReport report;
  double wall_s = 0;
  Instance instance;  // budget as left by the last row
};

ExperimentConfig sweep_config(const std::string& dataset) {
  ExperimentConfig c;
  c.dataset = dataset;
  c.population = 2000;
  c.budgets = {7000, 7700, 8400};
  c.scale_budgets = true;
  c.seeds = {1};
  c.methods = {Method::Adviser, Method::Hilp, Method::Rwb};
  return c;
}

const Sweep& sweep(const std::string& dataset) {
  static std::map<std::string, Sweep> cache;
  auto it = cache.find(dataset);
  if (it != cache.end()) return it->second;
  Sweep s;
  s.dataset = dataset;
  const auto cfg = sweep_config(dataset);
  const auto t0 = Clock::now();
  s.report = run_experiment(cfg, [&](const ExperimentRow& r) {
    std::cerr << "  " << dataset << " budget " << r.budget.str() << " " << method_name(r.method) << ": " << fmt("%.2f", r.allocation.objective)
              << fmt(" (%.1f s)", r.wall_s) << "\n";
  });
  s.wall_s = since(t0);
  s.instance = experiment_instance(cfg, 1);
  g_probabilities.check(s.instance, dataset + " population 2000");
  for (const auto& r : s.report.rows) {
    Instance inst = s.instance;
    inst.budget = r.budget;
    g_validator.check(inst, r.allocation, dataset + " " + std::string(method_name(r.method)) + " budget " + r.budget.str());
  }
  return cache.emplace(dataset, std::move(s)).first->second;
}

const ExperimentRow& row(const Sweep& s, double budget_full, Method m) {
  for (const auto& r : s.report.rows)
    if (r.budget_full == budget_full && r.method == m) return r;
  throw std::logic_error("missing sweep row");
}

Verdict ordering() {
  Verdict v;
  std::string summary;
  for (const std::string ds : {"d1", "d2"}) {
    const Sweep& s = sweep(ds);
    for (double b : sweep_config(ds).budgets) {
      const auto& a = row(s, b, Method::Adviser);
      const auto& h = row(s, b, Method::Hilp);
      const auto& w = row(s, b, Method::Rwb);
      const double oa = a.allocation.objective, oh = h.allocation.objective, ow = w.allocation.objective;
      if (!(oa >= oh)) v.fail(fmt("%s budget %s: ADVISER %.3f < HILP %.3f", ds.c_str(), a.budget.str().c_str(), oa, oh));
      if (!(oh >= ow)) v.fail(fmt("%s budget %s: HILP %.3f < RWB %.3f", ds.c_str(), a.budget.str().c_str(), oh, ow));
      const double cov = oa / a.population;
      if (cov < 0.95) v.fail(fmt("%s budget %s: ADVISER coverage %.4f < 0.95", ds.c_str(), a.budget.str().c_str(), cov));
      summary += fmt("%s%s@%s %.1f/%.1f/%.1f", summary.empty() ? "" : ", ", ds.c_str(), a.budget.str().c_str(), oa, oh, ow);
    }
    if (s.wall_s >= 600) v.fail(fmt("%s sweep took %.0f s, limit 600 s", ds.c_str(), s.wall_s));
    summary += fmt(" [%s %.0f s]", ds.c_str(), s.wall_s);
  }
  if (v.pass) v.detail = "ADVISER/HILP/RWB " + summary;
  return v;
}

Verdict runtime() {
  Verdict v;
  std::string summary;
  for (const std::string ds : {"d1", "d2"}) {
    double ta = 0, th = 0;
    for (const auto& r : sweep(ds).report.rows) {
      if (r.method == Method::Adviser) ta += r.wall_s;
      if (r.method == Method::Hilp) th += r.wall_s;
    }
    if (!(ta < th)) v.fail(fmt("%s: ADVISER %.1f s not below HILP %.1f s", ds.c_str(), ta, th));
    summary += fmt("%s%s ADVISER %.1f s vs HILP %.1f s", summary.empty() ? "" : ", ", ds.c_str(), ta, th);
  }
  if (v.pass) v.detail = summary + " over three budgets";
  return v;
}

Verdict drive_cap() {
  Verdict v;
  std::string summary;
  for (const std::string ds : {"d1", "d2"}) {
    const Sweep& s = sweep(ds);
    const auto cfg = sweep_config(ds);
    const auto& uncapped = row(s, 7000, Method::Adviser);
    Instance inst = s.instance;
    inst.budget = uncapped.budget;
    inst.drive_cap = 20;
    const Allocation capped = run_method(inst, Method::Adviser, cfg);
    g_validator.check(inst, capped, ds + " ADVISER drive cap 20");
    const int before = count_interventions(uncapped.allocation)[Intervention::BusPickup];
    const int after = count_interventions(capped)[Intervention::BusPickup];
    const int drives = count_interventions(capped).drives;
    if (!(after > before)) v.fail(fmt("%s: bus pickups %d capped vs %d uncapped", ds.c_str(), after, before));
    summary += fmt("%s%s bus pickups %d -> %d (drives %d -> %d)", summary.empty() ? "" : ", ", ds.c_str(), before, after,
                   count_interventions(uncapped.allocation).drives, drives);
  }
  if (v.pass) v.detail = summary;
  else v.detail += "; " + summary;
  return v;
}

// ---- invariants ----

RouteProblem random_route_problem(Rng& rng, int n, int capacity) {
  const auto inst = fixtures::base_instance(12, 12);
  RouteProblem p;
  p.day = 1;
  p.capacity = capacity;
  p.depot = {1, fixtures::at_km(inst, 0, 0.5)};
  p.center = {7, fixtures::at_km(inst, rng.uniform(3, 9), rng.uniform(3, 9)), {rng.uniform_int(480, 600), rng.uniform_int(620, 720)}, 1};
  p.depot_window = {360, 1440};
  for (int i = 0; i < n; ++i) {
    const int e = rng.uniform_int(380, 560);
    p.candidates.push_back({100 + i, fixtures::at_km(inst, rng.uniform(0, 12), rng.uniform(0, 12)), {e, e + rng.uniform_int(10, 120)}, rng.uniform(0.05, 0.9)});
  }
  return p;
}

// Straight forward simulation, kept apart from route_feasible on purpose.
bool simulate_route(const RoutePlan& plan, const TravelModel& tm, int capacity) {
  const auto& n = plan.nodes;
  if (n.size() < 2 || n.front().kind != NodeKind::Depot || n.back().kind != NodeKind::Dropoff) return false;
  if (static_cast<int>(n.size()) - 2 > capacity) return false;
  double clock = n[0].window.earliest;
  for (std::size_t k = 1; k < n.size(); ++k) {
    clock = std::max<double>(clock + haversine_km(n[k - 1].location, n[k].location) * 60.0 / tm.speed_kmh, n[k].window.earliest);
    if (clock > n[k].window.latest) return false;
  }
  return true;
}

std::string vrp_fuzz(Verdict& v) {
  Rng rng(2718);
  int feasible = 0, disagree = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    auto p = random_route_problem(rng, 6, rng.uniform_int(2, 6));
    std::vector<int> seq;
    for (int c = 0; c < 6; ++c)
      if (rng.bernoulli(0.5)) seq.push_back(c);
    for (std::size_t i = seq.size(); i > 1; --i) std::swap(seq[i - 1], seq[rng.below(i)]);
    const auto plan = p.make_plan(seq);
    const bool expect = simulate_route(plan, p.travel, p.capacity);
    if (route_feasible(plan, p.travel, p.capacity).feasible != expect || plan.feasible != expect) ++disagree;
    feasible += expect;
  }
  if (disagree) v.fail(fmt("vrp fuzz: %d of 1000 plans disagree with simulation", disagree));
  if (feasible == 0 || feasible == 1000) v.fail("vrp fuzz: degenerate sample");
  return fmt("vrp fuzz 1000 plans (%d feasible)", feasible);
}

std::string gls_monotone(Verdict& v) {
  Rng rng(77);
  int worse = 0, infeasible = 0, improved = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto p = random_route_problem(rng, 25, rng.uniform_int(3, 12));
    const auto init = cheapest_insertion(p);
    GlsConfig cfg;
    cfg.max_evaluations = 3000;
    cfg.seed = static_cast<std::uint64_t>(trial);
    const auto g = guided_local_search(p, init, cfg);
    worse += g.utility < init.utility - 1e-12;
    improved += g.utility > init.utility + 1e-12;
    infeasible += !route_feasible(g, p.travel, p.capacity).feasible;
  }
  if (worse) v.fail(fmt("gls: %d of 200 searches ended below insertion", worse));
  if (infeasible) v.fail(fmt("gls: %d infeasible results", infeasible));
  return fmt("gls 200 searches never below insertion (%d improved)", improved);
}

std::string budget_ladder(Verdict& v) {
  int steps = 0, breaks = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Instance inst = tiny_instance(1000 + seed);
    const RoutePool pool = tiny_pool(inst);
    const PruneState prune = empty_prune_state(inst);
    double prev = -1;
    for (int tenths = 0; tenths <= 120; tenths += 8) {
      inst.budget = Money::tenths(tenths);
      const auto model = build_model(inst, pool, prune, inst.budget);
      const auto sol = solve(model);
      g_validator.check(inst, extract_allocation(inst, model, sol, pool, prune), "ladder tiny " + std::to_string(1000 + seed));
      if (sol.objective < prev - 1e-12) ++breaks;
      prev = sol.objective;
      ++steps;
    }
  }
  if (breaks) v.fail(fmt("budget ladder: %d decreases", breaks));
  return fmt("exact budget ladder monotone over %d solves", steps);
}

std::string gradient(Verdict& v) {
  Rng rng(11);
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (int i = 0; i < 60; ++i) {
    FeatureVector f{rng.uniform_int(0, 4), rng.uniform_int(0, 23), rng.bernoulli(0.5), rng.bernoulli(0.5)};
    x.push_back(encode_features(f));
    y.push_back(rng.bernoulli(0.3) ? 1.0 : 0.0);
  }
  const double l2 = 1e-4, h = 1e-5;
  double worst = 0;
  for (int point = 0; point < 10; ++point) {
    std::vector<double> w(kFeatureDim + 1);
    for (auto& e : w) e = rng.uniform(-3, 3);
    const auto g = log_loss_gradient(w, x, y, l2);
    double diff2 = 0, norm2 = 0;
    for (std::size_t j = 0; j < w.size(); ++j) {
      auto wp = w, wm = w;
      wp[j] += h;
      wm[j] -= h;
      const double fd = (log_loss(wp, x, y, l2) - log_loss(wm, x, y, l2)) / (2 * h);
      diff2 += (fd - g[j]) * (fd - g[j]);
      norm2 += g[j] * g[j];
    }
    worst = std::max(worst, std::sqrt(diff2 / norm2));
  }
  if (worst > 1e-5) v.fail(fmt("gradient: relative error %.3g > 1e-5", worst));
  return fmt("gradient within %.2g relative at 10 points", worst);
}

// Allocations from all three methods on small instances, and generated
// tables across seeds and both datasets.
void method_allocations() {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Instance inst = tiny_instance(5000 + seed);
    g_probabilities.check(inst, "tiny " + std::to_string(5000 + seed));
    const ExperimentConfig c;
    for (Method m : {Method::Adviser, Method::Hilp, Method::Rwb})
      g_validator.check(inst, run_method(inst, m, c), std::string(method_name(m)) + " tiny " + std::to_string(5000 + seed));
  }
  for (const std::string ds : {"d1", "d2"})
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      ExperimentConfig c = sweep_config(ds);
      c.population = 300;
      Instance inst = experiment_instance(c, seed);
      g_probabilities.check(inst, ds + " seed " + std::to_string(seed));
      inst.budget = run_budget(c, 7000, 300);
      for (Method m : {Method::Adviser, Method::Rwb})
        g_validator.check(inst, run_method(inst, m, c), ds + " " + std::string(method_name(m)) + " seed " + std::to_string(seed));
    }
}

Verdict invariants() {
  Verdict v;
  std::vector<std::string> parts;
  parts.push_back(vrp_fuzz(v));
  parts.push_back(gls_monotone(v));
  parts.push_back(budget_ladder(v));
  parts.push_back(gradient(v));
  method_allocations();
  if (!g_validator.bad.empty()) v.fail(fmt("%zu invalid allocations, first: %s", g_validator.bad.size(), g_validator.bad.front().c_str()));
  if (!g_probabilities.bad.empty()) v.fail(fmt("%zu unordered probability rows, first: %s", g_probabilities.bad.size(), g_probabilities.bad.front().c_str()));
  parts.push_back(fmt("%ld allocations validated", g_validator.checked));
  parts.push_back(fmt("%ld probability rows ordered", g_probabilities.rows));
  if (v.pass)
    for (const auto& p : parts) v.detail += (v.detail.empty() ? "" : ", ") + p;
  return v;
}

// ---- determinism through the CLI ----

int run(const std::string& cmd) {
  const std::string full = cmd + " >/dev/null 2>&1";
  return std::system(full.c_str());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict determinism() {
  Verdict v;
  const std::string cli = ADVISER_CLI_PATH;
  const fs::path root = fs::absolute("acceptance-determinism");
  fs::remove_all(root);
  fs::create_directories(root);
  {
    io::json exp = {{"dataset", "d1"}, {"population", 150}, {"budgets", {7000}}, {"seeds", {1, 2}}, {"methods", {"adviser", "hilp", "rwb"}}};
    io::write_file((root / "experiment.json").string(), io::canonical(exp));
  }
  int commands = 0;
  for (const char* side : {"a", "b"}) {
    const fs::path d = root / side;
    fs::create_directories(d);
    const std::string o = d.string();
    std::vector<std::string> cmds = {
        cli + " generate --dataset d1 --size 300 --seed 3 --budget-full 7000 --out " + o + "/d1.json --csv-dir " + o + "/d1csv",
        cli + " generate --dataset d2 --size 300 --seed 3 --budget-full 7000 --out " + o + "/d2.json --csv-dir " + o + "/d2csv",
        cli + " generate --dataset tiny --seed 5 --out " + o + "/tiny.json",
        cli + " generate --dataset tiny --seed 5 --cheap-drives --out " + o + "/tiny-cheap.json",
        // plans read run a's instances so both sides see the same input
        cli + " plan --instance " + (root / "a").string() + "/d1.json --method adviser --out " + o + "/plan-adviser.json",
        cli + " plan --instance " + (root / "a").string() + "/d1.json --method hilp --out " + o + "/plan-hilp.json",
        cli + " plan --instance " + (root / "a").string() + "/d1.json --method rwb --out " + o + "/plan-rwb.json",
        cli + " plan --instance " + (root / "a").string() + "/d2.json --method adviser --drive-cap 3 --out " + o + "/plan-d2-capped.json",
        cli + " bounds --instance " + (root / "a").string() + "/tiny-cheap.json --out " + o + "/bounds.json",
        cli + " experiment --quiet --config " + (root / "experiment.json").string() + " --out " + o + "/experiment.json --csv " + o + "/experiment.csv",
    };
    for (const auto& c : cmds) {
      ++commands;
      if (int rc = run(c); rc != 0) v.fail(fmt("exit %d from: %s", rc, c.c_str()));
    }
  }
  int compared = 0, differ = 0;
  for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
    if (!e.is_regular_file()) continue;
    const std::string name = e.path().filename().string();
    if (name.size() > 13 && name.substr(name.size() - 13) == ".timings.json") continue;
    const fs::path twin = root / "b" / fs::relative(e.path(), root / "a");
    ++compared;
    if (!fs::exists(twin) || slurp(e.path()) != slurp(twin)) {
      ++differ;
      v.fail("differs between runs: " + fs::relative(e.path(), root / "a").string());
    }
  }
  if (compared < 10) v.fail(fmt("only %d outputs produced", compared));
  if (v.pass) v.detail = fmt("%d commands run twice, %d output files byte-identical (timings sidecars excluded)", commands / 2, compared);
  return v;
}

// ---- D2 estimator ----

// The protocol run the experiments use (seed 1) is the one scored. Other
// seeds are printed: with a 200-row holdout the label noise alone has a
// standard deviation near 0.014, so single seeds stray past 0.03.
Verdict estimator() {
  Verdict v;
  auto report = [](std::uint64_t seed) {
    SyntheticSpec spec;
    spec.dataset = Dataset::D2;
    spec.seed = seed;
    spec.source_pool = default_source_pool();
    return train_d2_models(spec);
  };
  const D2Report r = report(1);
  const double d = std::abs(r.holdout_error - r.bayes_rate);
  double lo = 1, hi = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const double e = report(seed).holdout_error;
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  const std::string spread = fmt("seeds 1..10 holdout error %.3f..%.3f", lo, hi);
  if (d > 0.03) v.fail(fmt("holdout error %.3f vs Bayes rate %.3f (%s)", r.holdout_error, r.bayes_rate, spread.c_str()));
  else v.detail = fmt("holdout error %.3f vs Bayes rate %.3f on %d rows (%s)", r.holdout_error, r.bayes_rate, r.holdout_rows, spread.c_str());
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"oracle-equivalence", oracle},   {"theorem-campaign", theorem}, {"method-ordering", ordering},     {"runtime-ordering", runtime},
      {"drive-cap", drive_cap},         {"invariants", invariants},    {"determinism", determinism},      {"d2-estimator", estimator},
  };
  std::set<std::string> only(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && !only.count(name)) continue;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v.fail(std::string("exception: ") + e.what());
    }
    failed += !v.pass;
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << fmt(" [%.1f s]", since(t0)) << std::endl;
  }
  return failed ? 1 : 0;
}
