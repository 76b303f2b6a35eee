#include <gtest/gtest.h>

#include "adviser/io/csv.hpp"
#include "adviser/io/json.hpp"
#include "adviser/pipeline/scenario.hpp"
#include "support/tiny.hpp"

using namespace adviser;
using namespace adviser::io;

namespace {

Instance small_generated(std::uint64_t seed = 3, Dataset ds = Dataset::D1) {
  SyntheticSpec syn;
  syn.dataset = ds;
  syn.population_size = 60;
  syn.seed = seed;
  syn.source_pool = default_source_pool();
  syn.layout.width_km = syn.layout.height_km = 4;
  ScenarioSpec sc;
  sc.centers = 3;
  sc.depots = 2;
  sc.budget = Money::units(40);
  return generate_instance(syn, sc);
}

json config_for(const Instance& inst) {
  json c = {{"budget", money_json(inst.budget)},
            {"horizon", inst.horizon},
            {"costs", costs_json(inst.costs)},
            {"drive_radius_km", inst.drive_radius_km},
            {"drive_capacity", inst.drive_capacity},
            {"bus_capacity", inst.fleet.capacity},
            {"buses_per_depot", 1}};
  c["grid"] = instance_json(inst)["grid"];
  return c;
}

const std::string kCenters = "id,lat,lon,dropoff_earliest,dropoff_latest,depot_id\n1,7.31,3.86,480,960,1\n";
const std::string kDepots = "id,lat,lon\n1,7.30,3.85\n";
const std::string kMothersHeader = "id,lat,lon,elig_start,elig_end,pickup_earliest,pickup_latest,income_level,child_age_months,prior_reminder,prior_vaccination";

std::string three_mothers() {
  return kMothersHeader + "\n1,7.301,3.851,1,5,420,600,0,3,1,0\n2,7.302,3.852,2,6,430,610,1,4,0,1\n3,7.303,3.853,1,1,440,620,2,5,0,0\n";
}

}  // namespace

TEST(Json, InstanceRoundTripIsByteIdentical) {
  for (auto ds : {Dataset::D1, Dataset::D2}) {
    const auto inst = small_generated(5, ds);
    const std::string a = canonical(instance_json(inst));
    const Instance back = instance_from_json(json::parse(a));
    EXPECT_EQ(canonical(instance_json(back)), a);
    EXPECT_TRUE(validate_instance(back).empty());
    for (std::size_t i = 0; i < inst.mothers.size(); ++i) EXPECT_EQ(back.mothers[i].cell, inst.mothers[i].cell);
  }
}

TEST(Json, AllocationRoundTrip) {
  const auto inst = small_generated(7);
  const auto plan = adviser_plan(inst);
  const std::string a = canonical(allocation_json(inst, plan.allocation));
  const Allocation back = allocation_from_json(json::parse(a));
  EXPECT_TRUE(validate_allocation(inst, back).empty());
  EXPECT_EQ(canonical(allocation_json(inst, back)), a);
  EXPECT_DOUBLE_EQ(objective_value(inst, back), plan.allocation.objective);
}

TEST(Json, CountsCoverThePopulation) {
  const auto inst = small_generated(8);
  const auto plan = adviser_plan(inst);
  const json c = allocation_json(inst, plan.allocation)["counts"];
  int sum = 0;
  for (const char* k : {"none", "call", "voucher", "bus", "drive"}) sum += c[k].get<int>();
  EXPECT_EQ(sum, static_cast<int>(inst.mothers.size()));
}

TEST(Json, ErrorsNameThePath) {
  auto j = instance_json(small_generated());
  j["mothers"][4]["lat"] = "north";
  try {
    instance_from_json(j);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("instance.mothers[4].lat"), std::string::npos) << e.what();
  }
  j = instance_json(small_generated());
  j["budget"] = 10.25;
  EXPECT_THROW(instance_from_json(j), InputError);
}

TEST(Csv, RoundTripThroughUploadFiles) {
  const auto inst = small_generated(9);
  const auto r = ingest_instance(mothers_csv(inst), centers_csv(inst), depots_csv(inst), config_for(inst));
  EXPECT_FALSE(r.estimated);
  EXPECT_EQ(canonical(instance_json(r.instance)), canonical(instance_json(inst)));
}

TEST(Csv, ThreeRowHappyPath) {
  const auto r = ingest_instance(three_mothers(), kCenters, kDepots, {{"budget", 10}});
  EXPECT_EQ(r.instance.mothers.size(), 3u);
  EXPECT_TRUE(r.estimated);
  for (const auto& p : r.instance.probabilities) {
    EXPECT_TRUE(p.ordered());
    EXPECT_EQ(p.drive, 1.0);
  }
  for (const auto& m : r.instance.mothers) EXPECT_GE(m.cell, 0);
  EXPECT_EQ(r.instance.fleet.buses.size(), 1u);
}

TEST(Csv, MissingColumnIsNamed) {
  std::string text = three_mothers();
  text.replace(text.find("elig_end"), 8, "elig_stop");
  try {
    ingest_instance(text, kCenters, kDepots, {{"budget", 10}});
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.column, "elig_end");
    EXPECT_EQ(e.file, "mothers.csv");
  }
}

TEST(Csv, BadValueNamesRowAndColumn) {
  const std::string text = kMothersHeader + "\n1,7.301,3.851,1,5,420,600,0,3,1,0\n2,x,3.852,2,6,430,610,1,4,0,1\n";
  try {
    ingest_instance(text, kCenters, kDepots, {{"budget", 10}});
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.row, 2);
    EXPECT_EQ(e.column, "lat");
    EXPECT_NE(std::string(e.what()).find("mothers.csv row 2 column 'lat'"), std::string::npos) << e.what();
  }
}

TEST(Csv, BooleansAreZeroOrOne) {
  const std::string text = kMothersHeader + "\n1,7.301,3.851,1,5,420,600,0,3,yes,0\n";
  EXPECT_THROW(ingest_instance(text, kCenters, kDepots, {{"budget", 10}}), SchemaError);
}

TEST(Csv, DuplicateMotherIdIsAValidationError) {
  const std::string text = kMothersHeader + "\n1,7.301,3.851,1,5,420,600,0,3,1,0\n1,7.302,3.852,2,6,430,610,1,4,0,1\n";
  try {
    ingest_instance(text, kCenters, kDepots, {{"budget", 10}});
    FAIL();
  } catch (const InvalidInstance& e) {
    ASSERT_FALSE(e.violations.empty());
    EXPECT_EQ(e.violations[0].rule, "duplicate mother id");
  }
}

TEST(Csv, ProbabilityColumnsAllOrNothing) {
  const std::string text = kMothersHeader + ",p_n,p_c\n1,7.301,3.851,1,5,420,600,0,3,1,0,0.1,0.2\n";
  try {
    ingest_instance(text, kCenters, kDepots, {{"budget", 10}});
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.column, "p_t");
  }
}

TEST(Csv, UnknownColumnRejected) {
  EXPECT_THROW(ingest_instance(three_mothers(), kCenters, "id,lat,lon,name\n1,7.3,3.85,x\n", {{"budget", 10}}), SchemaError);
}

TEST(Csv, QuotesAndCrlf) {
  const auto t = parse_csv("a,b\r\n\"x,1\",\"say \"\"hi\"\"\"\r\n\r\n", "t.csv");
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0][0], "x,1");
  EXPECT_EQ(t.rows[0][1], "say \"hi\"");
  EXPECT_THROW(parse_csv("a,b\n1\n", "t.csv"), SchemaError);
  EXPECT_THROW(parse_csv("", "t.csv"), SchemaError);
}

TEST(Csv, ConfigErrors) {
  EXPECT_THROW(ingest_instance(three_mothers(), kCenters, kDepots, json::object()), InputError);
  EXPECT_THROW(ingest_instance(three_mothers(), kCenters, kDepots, {{"budget", 10}, {"colour", "red"}}), InputError);
  // A negative budget parses but fails domain validation.
  EXPECT_THROW(ingest_instance(three_mothers(), kCenters, kDepots, {{"budget", -1}}), InvalidInstance);
}

TEST(Csv, EstimationIsDeterministic) {
  const json cfg = {{"budget", 10}, {"estimation", {{"seed", 4}}}};
  const auto a = ingest_instance(three_mothers(), kCenters, kDepots, cfg);
  const auto b = ingest_instance(three_mothers(), kCenters, kDepots, cfg);
  EXPECT_EQ(canonical(instance_json(a.instance)), canonical(instance_json(b.instance)));
}
