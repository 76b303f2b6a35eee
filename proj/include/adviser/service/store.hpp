#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "adviser/core/error.hpp"
#include "adviser/io/hash.hpp"
#include "adviser/io/json.hpp"

namespace adviser::service {

namespace fs = std::filesystem;
using io::json;

enum class JobState { Queued, Running, Done, Failed };

inline std::string_view job_state_name(JobState s) {
  switch (s) {
    case JobState::Queued: return "queued";
    case JobState::Running: return "running";
    case JobState::Done: return "done";
    case JobState::Failed: return "failed";
  }
  return "queued";
}

struct PlanJob {
  std::string id;
  std::string instance_id;
  json overrides = json::object();
  JobState state = JobState::Queued;
  std::string reason;         // Failed
  std::string allocation_id;  // Done: blob holding the allocation JSON
  json summary;               // Done: report row
};

inline json job_json(const PlanJob& j) {
  json out = {{"id", j.id}, {"instance_id", j.instance_id}, {"overrides", j.overrides}, {"state", job_state_name(j.state)}};
  if (j.state == JobState::Failed) out["reason"] = j.reason;
  if (j.state == JobState::Done) out["summary"] = j.summary, out["allocation_id"] = j.allocation_id;
  return out;
}

// Directory layout:
//   blobs/<sha256>.json   canonical JSON, immutable, named by content hash
//   instances/<id>        marker: id is the blob hash of the instance JSON
//   jobs.jsonl            append-only job event log, replayed on open
// All methods are safe to call from several threads.
class Store {
 public:
  explicit Store(const fs::path& root) : root_(root) {
    fs::create_directories(root_ / "blobs");
    fs::create_directories(root_ / "instances");
    replay();
  }

  const fs::path& root() const { return root_; }

  // Returns the blob id; writing an existing blob is a no-op.
  std::string put_blob(const std::string& bytes) {
    const std::string id = io::sha256_hex(bytes);
    std::lock_guard lock(mu_);
    const fs::path p = blob_path(id);
    if (!fs::exists(p)) {
      const fs::path tmp = p.string() + ".tmp";
      {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << bytes;
      }
      fs::rename(tmp, p);
    }
    return id;
  }

  std::optional<std::string> get_blob(const std::string& id) const {
    if (!valid_id(id)) return std::nullopt;
    std::ifstream in(blob_path(id), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  // Stores the canonical instance JSON; the id is its content hash.
  std::pair<std::string, bool> put_instance(const std::string& canonical_json) {
    const std::string id = put_blob(canonical_json);
    std::lock_guard lock(mu_);
    const fs::path marker = root_ / "instances" / id;
    const bool created = !fs::exists(marker);
    if (created) std::ofstream(marker).put('\n');
    return {id, created};
  }

  bool has_instance(const std::string& id) const { return valid_id(id) && fs::exists(root_ / "instances" / id); }

  std::optional<std::string> get_instance(const std::string& id) const {
    if (!has_instance(id)) return std::nullopt;
    return get_blob(id);
  }

  // ---- jobs ----

  PlanJob create_job(const std::string& instance_id, const json& overrides) {
    std::lock_guard lock(mu_);
    PlanJob j;
    j.id = next_job_id();
    j.instance_id = instance_id;
    j.overrides = overrides;
    append({{"event", "submit"}, {"job", j.id}, {"instance_id", instance_id}, {"overrides", overrides}});
    jobs_[j.id] = j;
    order_.push_back(j.id);
    return j;
  }

  void mark_running(const std::string& id) { transition(id, JobState::Queued, JobState::Running, {{"event", "running"}, {"job", id}}); }

  void mark_done(const std::string& id, const std::string& allocation_id, const json& summary) {
    transition(id, JobState::Running, JobState::Done, {{"event", "done"}, {"job", id}, {"allocation_id", allocation_id}, {"summary", summary}});
  }

  void mark_failed(const std::string& id, const std::string& reason) {
    std::lock_guard lock(mu_);
    auto& j = jobs_.at(id);
    if (j.state == JobState::Done || j.state == JobState::Failed) throw ContractError("job " + id + " already finished");
    append({{"event", "failed"}, {"job", id}, {"reason", reason}});
    j.state = JobState::Failed;
    j.reason = reason;
  }

  std::optional<PlanJob> job(const std::string& id) const {
    std::lock_guard lock(mu_);
    auto it = jobs_.find(id);
    if (it == jobs_.end()) return std::nullopt;
    return it->second;
  }

  std::vector<PlanJob> jobs() const {
    std::lock_guard lock(mu_);
    std::vector<PlanJob> out;
    for (const auto& id : order_) out.push_back(jobs_.at(id));
    return out;
  }

  // Queued jobs in submission order (to be handed to the worker on start).
  std::vector<std::string> queued() const {
    std::lock_guard lock(mu_);
    std::vector<std::string> out;
    for (const auto& id : order_)
      if (jobs_.at(id).state == JobState::Queued) out.push_back(id);
    return out;
  }

 private:
  static bool valid_id(const std::string& id) {
    if (id.size() != 64) return false;
    for (char c : id)
      if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
    return true;
  }

  fs::path blob_path(const std::string& id) const { return root_ / "blobs" / (id + ".json"); }
  fs::path log_path() const { return root_ / "jobs.jsonl"; }

  std::string next_job_id() {
    char buf[32];
    std::snprintf(buf, sizeof buf, "job-%06ld", ++job_seq_);
    return buf;
  }

  void append(const json& event) {
    std::ofstream out(log_path(), std::ios::binary | std::ios::app);
    if (!out) throw std::runtime_error("cannot append to " + log_path().string());
    out << event.dump() << '\n';
    out.flush();
  }

  void transition(const std::string& id, JobState from, JobState to, const json& event) {
    std::lock_guard lock(mu_);
    auto& j = jobs_.at(id);
    if (j.state != from) throw ContractError("job " + id + " is " + std::string(job_state_name(j.state)) + ", cannot become " + std::string(job_state_name(to)));
    append(event);
    j.state = to;
    if (to == JobState::Done) {
      j.allocation_id = event["allocation_id"].get<std::string>();
      j.summary = event["summary"];
    }
  }

  // A job caught Running by a restart did not finish; it is failed rather
  // than run twice. A torn last line (crash mid-append) is ignored.
  void replay() {
    std::ifstream in(log_path(), std::ios::binary);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json e;
      try {
        e = json::parse(line);
      } catch (const json::parse_error&) {
        continue;
      }
      const std::string ev = e.value("event", ""), id = e.value("job", "");
      if (ev == "submit") {
        PlanJob j;
        j.id = id;
        j.instance_id = e.value("instance_id", "");
        j.overrides = e.value("overrides", json::object());
        jobs_[id] = j;
        order_.push_back(id);
        long seq = 0;
        if (std::sscanf(id.c_str(), "job-%ld", &seq) == 1) job_seq_ = std::max(job_seq_, seq);
        continue;
      }
      auto it = jobs_.find(id);
      if (it == jobs_.end()) continue;
      if (ev == "running") it->second.state = JobState::Running;
      if (ev == "done") {
        it->second.state = JobState::Done;
        it->second.allocation_id = e.value("allocation_id", "");
        it->second.summary = e.value("summary", json::object());
      }
      if (ev == "failed") {
        it->second.state = JobState::Failed;
        it->second.reason = e.value("reason", "");
      }
    }
    for (const auto& id : order_)
      if (jobs_[id].state == JobState::Running) {
        append({{"event", "failed"}, {"job", id}, {"reason", "interrupted by a service restart"}});
        jobs_[id].state = JobState::Failed;
        jobs_[id].reason = "interrupted by a service restart";
      }
  }

  fs::path root_;
  mutable std::mutex mu_;
  std::map<std::string, PlanJob> jobs_;
  std::vector<std::string> order_;
  long job_seq_ = 0;
};

}  // namespace adviser::service
