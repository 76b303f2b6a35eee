#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <fstream>
#include <thread>

#include "adviser/io/csv.hpp"
#include "adviser/pipeline/scenario.hpp"
#include "adviser/service/http.hpp"

using namespace adviser;
using namespace adviser::service;

namespace {

const std::string kCenters = "id,lat,lon,dropoff_earliest,dropoff_latest,depot_id\n1,7.31,3.86,480,960,1\n";
const std::string kDepots = "id,lat,lon\n1,7.30,3.85\n";
const std::string kMothersHeader =
    "id,lat,lon,elig_start,elig_end,pickup_earliest,pickup_latest,income_level,child_age_months,prior_reminder,prior_vaccination";

std::string three_mothers() {
  return kMothersHeader + "\n1,7.301,3.851,1,5,420,600,0,3,1,0\n2,7.302,3.852,2,6,430,610,1,4,0,1\n3,7.303,3.853,1,1,440,620,2,5,0,0\n";
}

// A 120-mother generated instance, small enough to plan in well under a second.
Instance generated(std::uint64_t seed = 2) {
  SyntheticSpec syn;
  syn.population_size = 120;
  syn.seed = seed;
  syn.source_pool = default_source_pool();
  syn.layout.width_km = syn.layout.height_km = 5;
  ScenarioSpec sc;
  sc.centers = 3;
  sc.depots = 2;
  sc.budget = Money::units(30);
  return generate_instance(syn, sc);
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("adviser_service_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

ServiceConfig config_at(const fs::path& dir) {
  ServiceConfig c;
  c.data_dir = dir;
  c.methods.plan.routing.gls.max_evaluations = 2000;
  c.methods.hilp.routing.gls.max_evaluations = 2000;
  c.methods.hilp.k_max = 5;
  return c;
}

// Runs the API on an ephemeral port for the lifetime of the object.
struct Server {
  explicit Server(PlanService& svc, const std::string& ui = "") {
    mount_api(svr, svc, ui);
    port = svr.bind_to_any_port("127.0.0.1");
    th = std::thread([this] { svr.listen_after_bind(); });
    svr.wait_until_ready();
  }
  ~Server() {
    svr.stop();
    th.join();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(60, 0);
    return c;
  }
  httplib::Server svr;
  int port = 0;
  std::thread th;
};

httplib::MultipartFormDataItems upload(const std::string& mothers, const std::string& config = R"({"budget": 10})") {
  return {{"mothers", mothers, "mothers.csv", "text/csv"},
          {"centers", kCenters, "centers.csv", "text/csv"},
          {"depots", kDepots, "depots.csv", "text/csv"},
          {"config", config, "config.json", "application/json"}};
}

json body(const httplib::Result& r) { return json::parse(r->body); }

json wait_done(httplib::Client& c, const std::string& id) {
  for (int i = 0; i < 600; ++i) {
    auto r = c.Get("/plans/" + id);
    const json j = body(r);
    if (j["state"] == "done" || j["state"] == "failed") return j;
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  return {};
}

}  // namespace

TEST(Service, UploadThenSummary) {
  const auto dir = fresh_dir("upload");
  PlanService svc(config_at(dir));
  Server s(svc);
  auto c = s.client();
  auto r = c.Post("/instances", upload(three_mothers()));
  ASSERT_TRUE(r);
  ASSERT_EQ(r->status, 201) << r->body;
  const std::string id = body(r)["id"];
  EXPECT_EQ(body(r)["mothers"], 3);
  EXPECT_TRUE(body(r)["estimated"].get<bool>());

  r = c.Get("/instances/" + id);
  ASSERT_EQ(r->status, 200);
  EXPECT_EQ(body(r)["mothers"], 3);

  // Re-uploading identical files lands on the same id.
  r = c.Post("/instances", upload(three_mothers()));
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(body(r)["id"], id);
  EXPECT_FALSE(body(r)["created"].get<bool>());

  r = c.Get("/instances/" + id + "?full=1");
  EXPECT_EQ(io::instance_from_json(body(r)).mothers.size(), 3u);
  fs::remove_all(dir);
}

TEST(Service, SchemaAndValidationErrors) {
  const auto dir = fresh_dir("errors");
  PlanService svc(config_at(dir));
  Server s(svc);
  auto c = s.client();

  std::string missing = three_mothers();
  missing.replace(missing.find("elig_end"), 8, "elig_finish");
  auto r = c.Post("/instances", upload(missing));
  ASSERT_EQ(r->status, 400);
  EXPECT_EQ(body(r)["code"], "schema_error");
  EXPECT_EQ(body(r)["detail"]["column"], "elig_end");
  EXPECT_TRUE(body(r)["message"].is_string());

  const std::string dup = kMothersHeader + "\n1,7.301,3.851,1,5,420,600,0,3,1,0\n1,7.302,3.852,2,6,430,610,1,4,0,1\n";
  r = c.Post("/instances", upload(dup));
  ASSERT_EQ(r->status, 422);
  EXPECT_EQ(body(r)["code"], "validation_error");
  EXPECT_EQ(body(r)["detail"]["violations"][0]["rule"], "duplicate mother id");

  r = c.Post("/instances", upload(three_mothers(), "{not json"));
  EXPECT_EQ(r->status, 400);
  EXPECT_EQ(body(r)["detail"]["file"], "config.json");

  r = c.Get("/instances/" + std::string(64, 'a'));
  EXPECT_EQ(r->status, 404);
  EXPECT_EQ(body(r)["code"], "not_found");

  r = c.Get("/nowhere");
  EXPECT_EQ(r->status, 404);
  EXPECT_EQ(body(r)["code"], "not_found");
  fs::remove_all(dir);
}

TEST(Service, PlanLifecycleAndDeterminism) {
  const auto dir = fresh_dir("lifecycle");
  const Instance inst = generated();
  PlanService svc(config_at(dir));
  Server s(svc);
  auto c = s.client();
  auto r = c.Post("/instances", io::instance_json(inst).dump(), "application/json");
  ASSERT_EQ(r->status, 201) << r->body;
  const std::string id = body(r)["id"];

  const std::string req = json({{"instance_id", id}, {"overrides", {{"budget", 25}}}}).dump();
  auto a = c.Post("/plans", req, "application/json");
  auto b = c.Post("/plans", req, "application/json");
  ASSERT_EQ(a->status, 202) << a->body;
  const std::string ja = body(a)["id"], jb = body(b)["id"];
  EXPECT_NE(ja, jb);
  EXPECT_EQ(wait_done(c, ja)["state"], "done");
  EXPECT_EQ(wait_done(c, jb)["state"], "done");

  auto alloc_a = c.Get("/plans/" + ja + "/allocation");
  auto alloc_b = c.Get("/plans/" + jb + "/allocation");
  ASSERT_EQ(alloc_a->status, 200);
  EXPECT_EQ(alloc_a->body, alloc_b->body);
  Instance run = inst;
  run.budget = Money::units(25);
  const Allocation got = io::allocation_from_json(json::parse(alloc_a->body));
  EXPECT_TRUE(validate_allocation(run, got).empty());
  const json summary = wait_done(c, ja)["summary"];
  EXPECT_EQ(summary["objective"].get<double>(), got.objective);
  EXPECT_EQ(summary["budget"], 25.0);

  // The log shows the only legal transition order.
  std::ifstream log(dir / "jobs.jsonl");
  std::vector<std::string> events;
  for (std::string line; std::getline(log, line);) {
    const json e = json::parse(line);
    if (e["job"] == ja) events.push_back(e["event"]);
  }
  EXPECT_EQ(events, (std::vector<std::string>{"submit", "running", "done"}));
  fs::remove_all(dir);
}

TEST(Service, SubmissionErrors) {
  const auto dir = fresh_dir("submit");
  PlanService svc(config_at(dir));
  Server s(svc);
  auto c = s.client();
  const std::string id = body(c.Post("/instances", upload(three_mothers())))["id"];

  auto r = c.Post("/plans", json({{"instance_id", std::string(64, 'b')}}).dump(), "application/json");
  EXPECT_EQ(r->status, 404);
  r = c.Post("/plans", json({{"instance_id", id}, {"overrides", {{"budget", -1}}}}).dump(), "application/json");
  EXPECT_EQ(r->status, 400);
  EXPECT_EQ(body(r)["code"], "config_error");
  r = c.Post("/plans", json({{"instance_id", id}, {"overrides", {{"method", "oracle"}}}}).dump(), "application/json");
  EXPECT_EQ(body(r)["code"], "config_error");
  r = c.Post("/plans", "{", "application/json");
  EXPECT_EQ(r->status, 400);
  r = c.Get("/plans/job-999999");
  EXPECT_EQ(r->status, 404);
  fs::remove_all(dir);
}

TEST(Service, WhatIfBudgetDoublingNeverHurts) {
  const auto dir = fresh_dir("whatif");
  const Instance inst = generated(4);
  PlanService svc(config_at(dir));
  Server s(svc);
  auto c = s.client();
  const std::string id = body(c.Post("/instances", io::instance_json(inst).dump(), "application/json"))["id"];
  const json req = {{"instance_id", id}, {"scenarios", {{{"budget", 15}}, {{"budget", 30}}, {{"budget", 15}, {"drive_cap", 0}, {"fleet_size", 4}}}}};
  auto r = c.Post("/whatif", req.dump(), "application/json");
  ASSERT_EQ(r->status, 200) << r->body;
  const json out = body(r);
  EXPECT_EQ(out["mode"], "sync");
  ASSERT_EQ(out["results"].size(), 3u);
  EXPECT_GE(out["results"][1]["summary"]["objective"].get<double>(), out["results"][0]["summary"]["objective"].get<double>());
  EXPECT_EQ(out["results"][2]["summary"]["counts"]["drives"], 0);
  EXPECT_EQ(out["results"][2]["summary"]["fleet_size"], 4);

  // Above the inline limit the same request becomes queued jobs.
  auto cfg = config_at(fresh_dir("whatif_async"));
  cfg.sync_whatif_limit = 10;
  PlanService async_svc(cfg);
  const std::string id2 = async_svc.ingest_json(io::instance_json(inst)).id;
  const json q = async_svc.whatif(id2, req["scenarios"]);
  EXPECT_EQ(q["mode"], "async");
  EXPECT_EQ(q["jobs"].size(), 3u);
  async_svc.wait_idle();
  double prev = -1;
  for (int i = 0; i < 2; ++i) {
    const auto j = async_svc.job(q["jobs"][i]["id"]);
    ASSERT_EQ(j.state, JobState::Done);
    EXPECT_GE(j.summary["objective"].get<double>(), prev);
    prev = j.summary["objective"].get<double>();
  }
  async_svc.stop();
  fs::remove_all(dir);
  fs::remove_all(cfg.data_dir);
}

TEST(Service, SurvivesRestart) {
  const auto dir = fresh_dir("restart");
  const Instance inst = generated(6);
  std::string job_id, bytes;
  {
    PlanService svc(config_at(dir));
    const std::string id = svc.ingest_json(io::instance_json(inst)).id;
    job_id = svc.submit(id, {{"method", "rwb"}}).id;
    svc.wait_idle();
    const auto j = svc.job(job_id);
    ASSERT_EQ(j.state, JobState::Done) << j.reason;
    bytes = *svc.store().get_blob(j.allocation_id);
  }
  PlanService again(config_at(dir));
  Server s(again);
  auto c = s.client();
  auto r = c.Get("/plans/" + job_id + "/allocation");
  ASSERT_EQ(r->status, 200);
  EXPECT_EQ(r->body, bytes);
  // New ids continue after the replayed ones.
  const std::string next = body(c.Post("/plans", json({{"instance_id", again.job(job_id).instance_id}}).dump(), "application/json"))["id"];
  EXPECT_NE(next, job_id);
  again.wait_idle();
  fs::remove_all(dir);
}

TEST(Service, InterruptedJobsFailAndQueuedJobsResume) {
  const auto dir = fresh_dir("interrupted");
  std::string instance_id;
  {
    Store store(dir);
    instance_id = store.put_instance(io::canonical(io::instance_json(generated(8)))).first;
    const auto a = store.create_job(instance_id, {{"method", "rwb"}});
    store.mark_running(a.id);  // the process dies here
    store.create_job(instance_id, {{"method", "rwb"}});
  }
  PlanService svc(config_at(dir));
  svc.wait_idle();
  EXPECT_EQ(svc.job("job-000001").state, JobState::Failed);
  EXPECT_EQ(svc.job("job-000001").reason, "interrupted by a service restart");
  EXPECT_EQ(svc.job("job-000002").state, JobState::Done);
  svc.stop();
  fs::remove_all(dir);
}

TEST(Service, AllocationOfUnfinishedPlanIsAConflict) {
  const auto dir = fresh_dir("conflict");
  {
    Store store(dir);
    const auto id = store.put_instance(io::canonical(io::instance_json(generated(9)))).first;
    const auto a = store.create_job(id, {{"method", "rwb"}});
    store.mark_running(a.id);
    store.mark_failed(a.id, "boom");
    EXPECT_THROW(store.mark_running(a.id), ContractError);
  }
  PlanService svc(config_at(dir));
  Server s(svc);
  auto c = s.client();
  auto r = c.Get("/plans/job-000001/allocation");
  EXPECT_EQ(r->status, 409);
  EXPECT_EQ(body(r)["detail"]["reason"], "boom");
  fs::remove_all(dir);
}

TEST(Service, ServesUiDirectory) {
  const auto dir = fresh_dir("ui");
  fs::create_directories(dir / "ui");
  std::ofstream(dir / "ui" / "index.html") << "<p>planner</p>";
  PlanService svc(config_at(dir / "data"));
  Server s(svc, (dir / "ui").string());
  auto c = s.client();
  auto r = c.Get("/ui/index.html");
  ASSERT_EQ(r->status, 200);
  EXPECT_EQ(r->body, "<p>planner</p>");
  fs::remove_all(dir);
}
