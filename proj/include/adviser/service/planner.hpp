#pragma once

#include <condition_variable>
#include <deque>
#include <thread>

#include "adviser/io/csv.hpp"
#include "adviser/pipeline/experiment.hpp"
#include "adviser/service/store.hpp"

namespace adviser::service {

struct NotFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QueueFull : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// What a plan request may change about a stored instance.
struct Overrides {
  std::optional<Money> budget;
  std::optional<std::optional<int>> drive_cap;  // engaged null: remove the cap
  std::optional<int> fleet_size;                // total buses, dealt round-robin over depots
  Method method = Method::Adviser;
};

inline Overrides overrides_from_json(const json& j) {
  if (j.is_null()) return {};
  if (!j.is_object()) throw ConfigError("overrides must be an object");
  Overrides o;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    if (k == "budget") {
      if (!v.is_number()) throw ConfigError("overrides.budget: expected a number");
      if (v.get<double>() < 0) throw ConfigError("overrides.budget: must be non-negative");
      o.budget = Money::units(v.get<double>());
      if (std::abs(o.budget->in_units() - v.get<double>()) > 1e-9) throw ConfigError("overrides.budget: at most one decimal place");
    } else if (k == "drive_cap") {
      if (v.is_null()) o.drive_cap = std::optional<int>{};
      else if (v.is_number_integer() && v.get<int>() >= 0) o.drive_cap = v.get<int>();
      else throw ConfigError("overrides.drive_cap: expected a non-negative integer or null");
    } else if (k == "fleet_size") {
      if (!v.is_number_integer() || v.get<int>() < 0) throw ConfigError("overrides.fleet_size: expected a non-negative integer");
      o.fleet_size = v.get<int>();
    } else if (k == "method") {
      if (!v.is_string()) throw ConfigError("overrides.method: expected a string");
      o.method = parse_method(v.get<std::string>());
    } else {
      throw ConfigError("unknown override '" + k + "'");
    }
  }
  return o;
}

// Canonical form, so equal requests log equal bytes.
inline json overrides_json(const Overrides& o) {
  json j = {{"method", method_name(o.method)}};
  if (o.budget) j["budget"] = io::money_json(*o.budget);
  if (o.drive_cap) j["drive_cap"] = *o.drive_cap ? json(**o.drive_cap) : json(nullptr);
  if (o.fleet_size) j["fleet_size"] = *o.fleet_size;
  return j;
}

inline Instance apply_overrides(Instance inst, const Overrides& o) {
  if (o.budget) inst.budget = *o.budget;
  if (o.drive_cap) inst.drive_cap = *o.drive_cap;
  if (o.fleet_size) {
    if (inst.depots.empty() && *o.fleet_size > 0) throw ConfigError("fleet_size needs at least one depot");
    inst.fleet.buses.clear();
    for (int b = 0; b < *o.fleet_size; ++b) inst.fleet.buses.push_back({b + 1, inst.depots[static_cast<std::size_t>(b) % inst.depots.size()].id});
  }
  return inst;
}

inline json instance_summary_json(const std::string& id, const Instance& inst) {
  json j = io::instance_json(inst);
  j.erase("mothers");
  j["id"] = id;
  j["mothers"] = inst.mothers.size();
  j["buses"] = inst.fleet.buses.size();
  return j;
}

struct ServiceConfig {
  fs::path data_dir = "adviser-data";
  std::size_t queue_depth = 64;
  // What-if requests on instances with at most this many mothers run inline.
  std::size_t sync_whatif_limit = 200;
  ExperimentConfig methods;  // plan, hilp and rwb settings; other fields unused
};

struct PlanOutcome {
  std::string allocation_bytes;
  json summary;
};

// Owns the store and the single planner worker.
class PlanService {
 public:
  explicit PlanService(ServiceConfig cfg) : cfg_(std::move(cfg)), store_(cfg_.data_dir) {
    for (const auto& id : store_.queued()) queue_.push_back(id);
    worker_ = std::thread([this] { work(); });
  }
  ~PlanService() { stop(); }
  PlanService(const PlanService&) = delete;
  PlanService& operator=(const PlanService&) = delete;

  void stop() {
    {
      std::lock_guard lock(mu_);
      if (stopping_) return;
      stopping_ = true;
    }
    cv_.notify_all();
    if (worker_.joinable()) worker_.join();
  }

  Store& store() { return store_; }
  const ServiceConfig& config() const { return cfg_; }

  struct Ingested {
    std::string id;
    bool created = false;
    bool estimated = false;
    json summary;
  };

  Ingested ingest(std::string_view mothers, std::string_view centers, std::string_view depots, const json& config) {
    auto r = io::ingest_instance(mothers, centers, depots, config);
    return put(r.instance, r.estimated);
  }

  // An instance already in the JSON interchange form.
  Ingested ingest_json(const json& j) {
    Instance inst = io::instance_from_json(j);
    io::throw_if_invalid_instance(inst);
    return put(inst, false);
  }

  Instance instance(const std::string& id) const {
    auto bytes = store_.get_instance(id);
    if (!bytes) throw NotFound("no instance " + id);
    return io::instance_from_json(json::parse(*bytes));
  }

  PlanJob submit(const std::string& instance_id, const json& overrides) {
    const Overrides o = overrides_from_json(overrides);
    if (!store_.has_instance(instance_id)) throw NotFound("no instance " + instance_id);
    {
      std::lock_guard lock(mu_);
      if (queue_.size() >= cfg_.queue_depth) throw QueueFull("planner queue is full (" + std::to_string(cfg_.queue_depth) + " jobs)");
    }
    PlanJob j = store_.create_job(instance_id, overrides_json(o));
    {
      std::lock_guard lock(mu_);
      queue_.push_back(j.id);
    }
    cv_.notify_all();
    return j;
  }

  PlanJob job(const std::string& id) const {
    auto j = store_.job(id);
    if (!j) throw NotFound("no plan " + id);
    return *j;
  }

  // Runs one plan to completion on the calling thread.
  PlanOutcome plan_now(const std::string& instance_id, const Overrides& o) const {
    const Instance inst = apply_overrides(instance(instance_id), o);
    io::throw_if_invalid_instance(inst);
    const Allocation a = run_method(inst, o.method, cfg_.methods);
    // Never hand out an allocation the validator rejects.
    throw_if_invalid(inst, a, "planner");
    PlanOutcome out;
    out.allocation_bytes = io::canonical(io::allocation_json(inst, a));
    out.summary = {{"method", method_name(o.method)},
                   {"objective", a.objective},
                   {"cost", io::money_json(a.total_cost)},
                   {"budget", io::money_json(inst.budget)},
                   {"population", inst.mothers.size()},
                   {"coverage", inst.mothers.empty() ? 0.0 : a.objective / static_cast<double>(inst.mothers.size())},
                   {"drive_cap", inst.drive_cap ? json(*inst.drive_cap) : json(nullptr)},
                   {"fleet_size", inst.fleet.buses.size()},
                   {"counts", io::counts_json(inst, a)}};
    return out;
  }

  // Several scenarios on one instance: inline for small instances, queued
  // jobs otherwise.
  json whatif(const std::string& instance_id, const json& scenarios) {
    if (!scenarios.is_array() || scenarios.empty()) throw ConfigError("scenarios must be a non-empty array");
    std::vector<Overrides> os;
    for (const auto& s : scenarios) os.push_back(overrides_from_json(s));
    const Instance inst = instance(instance_id);
    json out = {{"instance_id", instance_id}};
    if (inst.mothers.size() <= cfg_.sync_whatif_limit) {
      out["mode"] = "sync";
      json results = json::array();
      for (const auto& o : os) {
        const auto r = plan_now(instance_id, o);
        results.push_back({{"overrides", overrides_json(o)}, {"summary", r.summary}, {"allocation", json::parse(r.allocation_bytes)}});
      }
      out["results"] = results;
    } else {
      out["mode"] = "async";
      json jobs = json::array();
      for (const auto& s : scenarios) jobs.push_back(job_json(submit(instance_id, s)));
      out["jobs"] = jobs;
    }
    return out;
  }

  // Blocks until no job is queued or running (tests and the CLI use this).
  void wait_idle() {
    std::unique_lock lock(mu_);
    idle_cv_.wait(lock, [this] { return queue_.empty() && !busy_; });
  }

 private:
  Ingested put(const Instance& inst, bool estimated) {
    Ingested r;
    const auto [id, created] = store_.put_instance(io::canonical(io::instance_json(inst)));
    r.id = id;
    r.created = created;
    r.estimated = estimated;
    r.summary = instance_summary_json(id, inst);
    return r;
  }

  void work() {
    for (;;) {
      std::string id;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
        if (stopping_) return;
        id = queue_.front();
        queue_.pop_front();
        busy_ = true;
      }
      run_job(id);
      {
        std::lock_guard lock(mu_);
        busy_ = false;
      }
      idle_cv_.notify_all();
    }
  }

  void run_job(const std::string& id) {
    const PlanJob j = *store_.job(id);
    store_.mark_running(id);
    try {
      const auto r = plan_now(j.instance_id, overrides_from_json(j.overrides));
      store_.mark_done(id, store_.put_blob(r.allocation_bytes), r.summary);
    } catch (const std::exception& e) {
      store_.mark_failed(id, e.what());
    }
  }

  ServiceConfig cfg_;
  Store store_;
  std::mutex mu_;
  std::condition_variable cv_, idle_cv_;
  std::deque<std::string> queue_;
  bool busy_ = false;
  bool stopping_ = false;
  std::thread worker_;
};

}  // namespace adviser::service
