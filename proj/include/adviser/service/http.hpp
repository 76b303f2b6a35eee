#pragma once

#include <httplib.h>

#include <functional>

#include "adviser/service/planner.hpp"

namespace adviser::service {

struct ApiError {
  int status;
  std::string code;
  std::string message;
  json detail = json::object();
};

inline void send_json(httplib::Response& res, int status, const std::string& body) {
  res.status = status;
  res.set_content(body, "application/json");
}

inline void send_error(httplib::Response& res, const ApiError& e) {
  send_json(res, e.status, json({{"code", e.code}, {"message", e.message}, {"detail", e.detail}}).dump() + "\n");
}

// Maps every library error onto the {code, message, detail} envelope.
inline ApiError classify(std::exception_ptr ep) {
  try {
    std::rethrow_exception(ep);
  } catch (const io::SchemaError& e) {
    return {400, "schema_error", e.what(), {{"file", e.file}, {"row", e.row}, {"column", e.column}}};
  } catch (const io::InvalidInstance& e) {
    return {422, "validation_error", e.what(), {{"violations", io::violations_json(e.violations)}}};
  } catch (const ValidationError& e) {
    return {422, "validation_error", e.what()};
  } catch (const NotFound& e) {
    return {404, "not_found", e.what()};
  } catch (const QueueFull& e) {
    return {503, "queue_full", e.what()};
  } catch (const ConfigError& e) {
    return {400, "config_error", e.what()};
  } catch (const InputError& e) {
    return {400, "input_error", e.what()};
  } catch (const json::exception& e) {
    return {400, "bad_json", e.what()};
  } catch (const std::exception& e) {
    return {500, "internal", e.what()};
  }
  return {500, "internal", "unknown error"};
}

inline json parse_body(const httplib::Request& req) {
  if (req.body.empty()) throw InputError("request body is empty, expected JSON");
  return json::parse(req.body);
}

inline std::string body_string(const json& j) { return j.dump(2) + "\n"; }

// Registers the planning API on `svr`. `ui_dir`, when it exists, is served
// under /ui.
inline void mount_api(httplib::Server& svr, PlanService& svc, const std::string& ui_dir = "") {
  using H = std::function<void(const httplib::Request&, httplib::Response&)>;
  auto guarded = [](H h) {
    return [h](const httplib::Request& req, httplib::Response& res) {
      try {
        h(req, res);
      } catch (const ApiError& e) {
        send_error(res, e);
      } catch (...) {
        send_error(res, classify(std::current_exception()));
      }
    };
  };

  svr.Get("/health", [](const httplib::Request&, httplib::Response& res) { send_json(res, 200, "{\"status\":\"ok\"}\n"); });

  // Multipart fields mothers, centers, depots (CSV) and config (JSON); or a
  // JSON body holding a whole instance.
  svr.Post("/instances", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
             PlanService::Ingested r;
             if (req.is_multipart_form_data()) {
               for (const char* f : {"mothers", "centers", "depots", "config"})
                 if (!req.has_file(f)) throw io::SchemaError(std::string(f) + (std::string(f) == "config" ? ".json" : ".csv"), 0, "", "missing form field '" + std::string(f) + "'");
               json config;
               try {
                 config = json::parse(req.get_file_value("config").content);
               } catch (const json::parse_error& e) {
                 throw io::SchemaError("config.json", 0, "", e.what());
               }
               r = svc.ingest(req.get_file_value("mothers").content, req.get_file_value("centers").content, req.get_file_value("depots").content, config);
             } else {
               r = svc.ingest_json(parse_body(req));
             }
             json out = r.summary;
             out["created"] = r.created;
             out["estimated"] = r.estimated;
             send_json(res, r.created ? 201 : 200, body_string(out));
           }));

  svr.Get(R"(/instances/([0-9a-f]+))", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
            const std::string id = req.matches[1];
            if (req.has_param("full") && req.get_param_value("full") == "1") {
              auto bytes = svc.store().get_instance(id);
              if (!bytes) throw NotFound("no instance " + id);
              send_json(res, 200, *bytes);
              return;
            }
            send_json(res, 200, body_string(instance_summary_json(id, svc.instance(id))));
          }));

  svr.Post("/plans", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
             const json body = parse_body(req);
             if (!body.contains("instance_id") || !body["instance_id"].is_string()) throw ConfigError("instance_id (string) is required");
             const PlanJob j = svc.submit(body["instance_id"].get<std::string>(), body.value("overrides", json::object()));
             send_json(res, 202, body_string(job_json(j)));
           }));

  svr.Get("/plans", guarded([&svc](const httplib::Request&, httplib::Response& res) {
            json out = json::array();
            for (const auto& j : svc.store().jobs()) out.push_back(job_json(j));
            send_json(res, 200, body_string(out));
          }));

  svr.Get(R"(/plans/([A-Za-z0-9-]+))", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
            send_json(res, 200, body_string(job_json(svc.job(req.matches[1]))));
          }));

  svr.Get(R"(/plans/([A-Za-z0-9-]+)/allocation)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
            const PlanJob j = svc.job(req.matches[1]);
            if (j.state != JobState::Done)
              throw ApiError{409, "not_done", "plan " + j.id + " is " + std::string(job_state_name(j.state)), {{"state", job_state_name(j.state)}, {"reason", j.reason}}};
            auto bytes = svc.store().get_blob(j.allocation_id);
            if (!bytes) throw std::runtime_error("allocation blob missing for " + j.id);
            send_json(res, 200, *bytes);
          }));

  svr.Post("/whatif", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
             const json body = parse_body(req);
             if (!body.contains("instance_id") || !body["instance_id"].is_string()) throw ConfigError("instance_id (string) is required");
             const json out = svc.whatif(body["instance_id"].get<std::string>(), body.value("scenarios", json()));
             send_json(res, out["mode"] == "sync" ? 200 : 202, body_string(out));
           }));

  if (!ui_dir.empty() && fs::is_directory(ui_dir)) svr.set_mount_point("/ui", ui_dir);

  svr.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) send_error(res, {res.status, res.status == 404 ? "not_found" : "http_error", "no such resource"});
  });
}

}  // namespace adviser::service
