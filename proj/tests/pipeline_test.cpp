#include <gtest/gtest.h>

#include "adviser/pipeline/experiment.hpp"
#include "support/tiny.hpp"

using namespace adviser;

namespace {

ExperimentConfig small_experiment() {
  ExperimentConfig c;
  c.population = 80;
  c.budgets = {4000, 8000, 16000};
  c.centers = 4;
  c.depots = 2;
  c.hilp.k_max = 6;
  c.plan.routing.gls.max_evaluations = 2000;
  c.hilp.routing.gls.max_evaluations = 2000;
  return c;
}

}  // namespace

TEST(AdviserPlan, ZeroBudgetIsAllNone) {
  auto inst = fixtures::tiny_instance(3);
  inst.budget = Money{};
  const auto r = adviser_plan(inst);
  EXPECT_TRUE(r.allocation.assignments.empty());
  double expect = 0;
  for (const auto& p : inst.probabilities) expect += p.none;
  EXPECT_DOUBLE_EQ(r.allocation.objective, expect);
}

TEST(AdviserPlan, AtLeastAsGoodAsBaselinesOnTinyInstances) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto inst = fixtures::tiny_instance(seed);
    PlanConfig pc;
    pc.routing.gls.max_evaluations = 500;
    const auto a = adviser_plan(inst, pc);
    RwbConfig rc;
    rc.routing = pc.routing;
    EXPECT_GE(a.allocation.objective + 1e-9, rwb_allocate(inst, rc).objective) << "seed " << seed;
    HilpConfig hc;
    hc.k_max = 3;
    hc.routing = pc.routing;
    EXPECT_GE(a.allocation.objective + 1e-9, hilp_allocate(inst, hc).allocation.objective) << "seed " << seed;
  }
}

TEST(AdviserPlan, Idempotent) {
  const auto inst = fixtures::tiny_instance(11, {8, 3, 2, true});
  const auto a = adviser_plan(inst), b = adviser_plan(inst);
  EXPECT_EQ(io::canonical(io::allocation_json(inst, a.allocation)), io::canonical(io::allocation_json(inst, b.allocation)));
}

TEST(AdviserPlan, ThresholdDefaultsToBudgetLessOffset) {
  auto inst = fixtures::tiny_instance(1);
  inst.budget = Money::units(1500);
  EXPECT_EQ(prune_threshold(inst, {}), Money::units(500));
  inst.budget = Money::units(20);
  EXPECT_EQ(prune_threshold(inst, {}), Money{});
}

TEST(Experiment, CrossProductOfMethodsAndBudgets) {
  const auto rep = run_experiment(small_experiment());
  ASSERT_EQ(rep.rows.size(), 9u);
  for (const auto& r : rep.rows) {
    EXPECT_TRUE(r.valid) << method_name(r.method);
    EXPECT_LE(r.allocation.total_cost, r.budget);
    EXPECT_NEAR(r.recomputed, r.allocation.objective, 1e-9);
    int sum = 0;
    for (const char* k : {"call", "voucher", "bus", "drive"}) sum += r.counts[k].get<int>();
    EXPECT_LE(sum, r.population);
  }
  // Budgets scale with the population: 4000 x 80 / 40000 = 8.
  EXPECT_EQ(rep.rows[0].budget, Money::units(8));
}

TEST(Experiment, AdviserLadderIsMonotone) {
  auto c = small_experiment();
  c.methods = {Method::Adviser};
  c.budgets = {1000, 2000, 4000, 8000, 16000, 32000};
  const auto rep = run_experiment(c);
  for (std::size_t i = 1; i < rep.rows.size(); ++i) EXPECT_GE(rep.rows[i].allocation.objective + 1e-9, rep.rows[i - 1].allocation.objective);
}

TEST(Experiment, ReportIsDeterministic) {
  auto c = small_experiment();
  c.budgets = {8000};
  const auto a = io::canonical(report_json(run_experiment(c)));
  const auto b = io::canonical(report_json(run_experiment(c)));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.find("wall"), std::string::npos);
}

TEST(Experiment, ConfigParsing) {
  EXPECT_THROW(experiment_config_from_json({{"methods", {"adviser", "magic"}}}), ConfigError);
  EXPECT_THROW(experiment_config_from_json({{"budgets", io::json::array()}}), ConfigError);
  EXPECT_THROW(experiment_config_from_json({{"methods", io::json::array()}}), ConfigError);
  EXPECT_THROW(experiment_config_from_json({{"bugdets", {1}}}), ConfigError);
  EXPECT_THROW(experiment_config_from_json({{"dataset", "d3"}}), ConfigError);
  EXPECT_THROW(experiment_config_from_json({{"population", "many"}}), ConfigError);
  const auto c = experiment_config_from_json({{"dataset", "d2"}, {"budgets", {7000}}, {"drive_cap", 20}, {"methods", {"rwb"}}});
  EXPECT_EQ(c.dataset, "d2");
  EXPECT_EQ(c.drive_cap, 20);
  ASSERT_EQ(c.methods.size(), 1u);
  EXPECT_EQ(c.methods[0], Method::Rwb);
  // Round trip through the canonical form keeps the hash.
  EXPECT_EQ(config_hash(experiment_config_from_json(experiment_config_json(c))), config_hash(c));
}

TEST(Experiment, CsvHasOneLinePerRow) {
  auto c = small_experiment();
  c.budgets = {8000};
  c.methods = {Method::Rwb};
  const auto rep = run_experiment(c);
  const auto csv = report_csv(rep);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
  EXPECT_EQ(csv.rfind("dataset,seed,method,budget_full,budget,population,objective,cost,coverage,none,call,voucher,bus,drive,drives,routes\n", 0), 0u);
}
