#include <gtest/gtest.h>

#include "adviser/bounds/theorem.hpp"
#include "support/fixtures.hpp"
#include "support/tiny.hpp"

using namespace adviser;
using fixtures::add_mother;
using fixtures::base_instance;

namespace {

Probabilities drive_only(double gain) { return {0.0, 0.0, 0.0, 0.0, gain}; }

// Two cells on a 1 x 2 grid. Mother 1 reaches both cells, 2 and 3 only
// cell 1, 4 and 5 only cell 0. Two drives of two mothers each are
// affordable and qualify (2 x 1.1 >= 2.0).
Instance overlapping_drives() {
  auto inst = base_instance(1, 2, 1);
  inst.fleet.buses.clear();
  inst.drive_radius_km = 0.6;
  inst.drive_capacity = 2;
  inst.costs = {Money::tenths(1), Money::tenths(11), Money::tenths(20), Money::tenths(30)};
  inst.budget = Money::tenths(40);
  add_mother(inst, 1, 1.0, 0.5, 1, 1, drive_only(0.875));
  add_mother(inst, 2, 1.8, 0.5, 1, 1, drive_only(0.75));
  add_mother(inst, 3, 1.8, 0.4, 1, 1, drive_only(0.625));
  add_mother(inst, 4, 0.2, 0.5, 1, 1, drive_only(0.5));
  add_mother(inst, 5, 0.2, 0.4, 1, 1, drive_only(0.375));
  return inst;
}

BoundConfig tiny_bound_config() {
  BoundConfig c;
  c.routing.gls.max_evaluations = 500;
  return c;
}

}  // namespace

TEST(BruteForce, SingleMotherGetsDrive) {
  auto inst = base_instance(1, 1, 1);
  inst.fleet.buses.clear();
  add_mother(inst, 1, 0.5, 0.5, 1, 1);
  const auto r = brute_force_optimum(inst, fixtures::tiny_pool(inst));
  EXPECT_EQ(r.objective, 1.0);
  ASSERT_EQ(r.allocation.drives.size(), 1u);
  EXPECT_TRUE(validate_allocation(inst, r.allocation).empty());
}

TEST(BruteForce, ZeroBudgetIsAllNone) {
  auto inst = fixtures::tiny_instance(4);
  inst.budget = Money{};
  const auto r = brute_force_optimum(inst, fixtures::tiny_pool(inst));
  double expect = 0;
  for (const auto& p : inst.probabilities) expect += p.none;
  EXPECT_EQ(r.objective, expect);
  EXPECT_TRUE(r.allocation.assignments.empty());
}

TEST(BruteForce, RefusesOversizedInstances) {
  const auto inst = fixtures::tiny_instance(4);
  const auto pool = fixtures::tiny_pool(inst);
  ASSERT_GT(brute_force_size(inst, pool), 1.0);
  EXPECT_THROW(brute_force_optimum(inst, pool, 1.0), SizeError);
}

TEST(BruteForce, DominatesPipelineAllocations) {
  for (std::uint64_t seed = 400; seed < 440; ++seed) {
    const auto inst = fixtures::tiny_instance(seed, {8, 3, 2, true});
    const auto pool = fixtures::tiny_pool(inst);
    const auto bf = brute_force_optimum(inst, pool);
    EXPECT_TRUE(validate_allocation(inst, bf.allocation).empty());
    PlanConfig pc;
    pc.threshold = Money{};
    const auto plan = adviser_plan(inst, pc, &pool);
    EXPECT_LE(plan.allocation.objective, bf.objective + kBoundEpsilon) << "seed " << seed;
  }
}

TEST(Proposition1, NoPrunedDrivesIsTrivial) {
  const auto inst = overlapping_drives();
  const auto p = verify_proposition1(inst, empty_prune_state(inst), Allocation{});
  EXPECT_TRUE(p.assumptions_hold);
  EXPECT_TRUE(p.holds);
  EXPECT_EQ(p.lhs, 0.0);
  EXPECT_EQ(p.rhs, 0.0);
}

TEST(Proposition1, GateFailsWithoutEnoughQualifyingDrives) {
  const auto inst = overlapping_drives();
  const auto prune = greedy_prune(inst, Money{});
  ASSERT_EQ(prune.drives.size(), 2u);
  Allocation opt;
  opt.drives.push_back({0, 1, {4, 5}});
  opt.drives.push_back({1, 1, {2}});  // 1.1 < 2.0, does not qualify
  const auto p = verify_proposition1(inst, prune, opt);
  EXPECT_FALSE(p.assumptions_hold);
  EXPECT_FALSE(p.holds);
}

TEST(Proposition1, ReportsGreedyShortfallOnOverlappingDrives) {
  // Greedy takes {1, 2} at cell 1 first and is left with {4, 5}; the optimum
  // pairs {2, 3} and {1, 4}. The checker must report the shortfall.
  const auto inst = overlapping_drives();
  const auto r = verify_theorem1(inst, tiny_bound_config());
  EXPECT_EQ(r.k, 2);
  EXPECT_EQ(r.m_vh, (std::vector<int>{1, 2, 4, 5}));
  EXPECT_EQ(r.m_vi, (std::vector<int>{1, 2, 3, 4}));
  EXPECT_DOUBLE_EQ(r.prop1_lhs, 2.5);
  EXPECT_DOUBLE_EQ(r.prop1_rhs, 2.75);
  EXPECT_FALSE(r.prop1_holds);
  EXPECT_DOUBLE_EQ(r.o_h, 2.5);
  EXPECT_DOUBLE_EQ(r.o_star, 2.75);
  EXPECT_EQ(r.gap_term, 0.0);
  EXPECT_FALSE(r.theorem_holds);
}

TEST(Theorem1, NoPrunedDrivesMeansExactOptimum) {
  for (std::uint64_t seed = 500; seed < 530; ++seed) {
    auto inst = fixtures::tiny_instance(seed);
    inst.costs.drive = inst.budget + Money::tenths(1);
    if (inst.costs.route <= inst.costs.drive) inst.costs.route = inst.costs.drive + Money::tenths(1);
    const auto r = verify_theorem1(inst, tiny_bound_config());
    ASSERT_EQ(r.k, 0);
    EXPECT_EQ(r.o_h, r.o_star) << "seed " << seed;
    EXPECT_TRUE(r.theorem_holds);
  }
}

TEST(Theorem1, ReportInvariants) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto inst = fixtures::tiny_instance(seed, {8, 3, 2, true});
    const auto r = verify_theorem1(inst, tiny_bound_config());
    EXPECT_GE(r.gap_term, 0.0);
    EXPECT_LE(r.o_h, r.o_star + kBoundEpsilon);
    for (int id : r.m_vh) EXPECT_TRUE(inst.find(id).has_value());
    if (r.assumptions_hold) {
      EXPECT_TRUE(std::is_sorted(r.m_vi.begin(), r.m_vi.end()));
      EXPECT_TRUE(r.prop1_holds) << "seed " << seed;
      EXPECT_TRUE(r.theorem_holds) << "seed " << seed;
    }
  }
}
