// Copyright 2026 The fluxqa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "fluxqa/service/rest.h"

#include <fmt/format.h>
#include <httplib.h>

#include <functional>

#include "fluxqa/error.h"
#include "fluxqa/service/run_record.h"

namespace fluxqa::service {

namespace {

void send(httplib::Response &res, int status, const json &body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json error_body(const std::string &reason, const std::string &message) {
  return {{"error", {{"reason", reason}, {"message", message}}}};
}

json parse_body(const httplib::Request &req) {
  if (req.body.empty()) {
    return json::object();
  }
  try {
    return json::parse(req.body);
  } catch (const json::parse_error &e) {
    throw ValidationError("bad_json", std::string("request body is not JSON: ") + e.what());
  }
}

using Handler = std::function<void(const httplib::Request &, httplib::Response &)>;

// Maps library exceptions to status codes; session ids are echoed in errors.
Handler guarded(Handler inner) {
  return [inner = std::move(inner)](const httplib::Request &req, httplib::Response &res) {
    try {
      inner(req, res);
    } catch (const NotFound &e) {
      send(res, 404, error_body("not_found", e.what()));
    } catch (const Conflict &e) {
      send(res, 409, error_body(e.reason(), e.what()));
    } catch (const ValidationError &e) {
      send(res, 422, error_body(e.reason(), e.what()));
    } catch (const json::exception &e) {
      send(res, 422, error_body("bad_request", e.what()));
    } catch (const NumericalError &e) {
      send(res, 500, error_body("numerical_error", e.what()));
    } catch (const std::exception &e) {
      send(res, 500, error_body("internal_error", e.what()));
    }
  };
}

}  // namespace

RestServer::RestServer(ServiceConfig config)
    : config_(std::move(config)),
      store_(std::make_unique<SessionStore>(config_)),
      server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

RestServer::~RestServer() { stop(); }

void RestServer::install_routes() {
  auto &s = *server_;
  auto store = store_.get();
  const std::string sid = R"(/api/v1/sessions/([A-Za-z0-9_-]+))";

  s.Get("/api/v1/health", guarded([](const httplib::Request &, httplib::Response &res) {
          send(res, 200, {{"status", "ok"}, {"version", kVersion}});
        }));
  s.Post("/api/v1/sessions", guarded([store](const httplib::Request &req, httplib::Response &res) {
           auto session = store->create(parse_body(req));
           send(res, 201, session->describe());
         }));
  s.Get("/api/v1/sessions", guarded([store](const httplib::Request &, httplib::Response &res) {
          send(res, 200, {{"sessions", store->list()}});
        }));
  s.Get(sid, guarded([store](const httplib::Request &req, httplib::Response &res) {
          send(res, 200, store->get(req.matches[1])->describe());
        }));
  s.Post(sid + "/scans", guarded([store](const httplib::Request &req, httplib::Response &res) {
           send(res, 202, store->get(req.matches[1])->start_scan(parse_body(req)));
         }));
  s.Get(sid + R"(/scans/([A-Za-z0-9_-]+))", guarded([store](const httplib::Request &req, httplib::Response &res) {
          send(res, 200, store->get(req.matches[1])->scan_status(req.matches[2]));
        }));
  s.Get(sid + R"(/scans/([A-Za-z0-9_-]+)/data)",
        guarded([store](const httplib::Request &req, httplib::Response &res) {
          send(res, 200, store->get(req.matches[1])->scan_data(req.matches[2]));
        }));
  s.Post(sid + "/centers", guarded([store](const httplib::Request &req, httplib::Response &res) {
           send(res, 200, store->get(req.matches[1])->submit_centers(parse_body(req)));
         }));
  s.Post(sid + "/indices", guarded([store](const httplib::Request &req, httplib::Response &res) {
           send(res, 200, store->get(req.matches[1])->propose_indices(parse_body(req)));
         }));
  s.Post(sid + "/fit", guarded([store](const httplib::Request &req, httplib::Response &res) {
           send(res, 200, store->get(req.matches[1])->auto_fit(parse_body(req)));
         }));
  s.Put(sid + "/correction", guarded([store](const httplib::Request &req, httplib::Response &res) {
          send(res, 200, store->get(req.matches[1])->apply_correction(parse_body(req)));
        }));
  s.Delete(sid + "/correction", guarded([store](const httplib::Request &req, httplib::Response &res) {
             send(res, 200, store->get(req.matches[1])->clear_correction());
           }));
  s.Get(sid + "/verification", guarded([store](const httplib::Request &req, httplib::Response &res) {
          uint64_t seed = 0;
          if (req.has_param("seed")) {
            try {
              seed = std::stoull(req.get_param_value("seed"));
            } catch (const std::exception &) {
              throw ValidationError("bad_request", "seed must be a nonnegative integer");
            }
          }
          send(res, 200, store->get(req.matches[1])->verification(seed));
        }));
  s.Get(sid + "/events", guarded([store](const httplib::Request &req, httplib::Response &res) {
          send(res, 200, store->get(req.matches[1])->events());
        }));
  s.set_error_handler([](const httplib::Request &, httplib::Response &res) {
    if (res.body.empty()) {
      res.set_content(error_body(res.status == 404 ? "not_found" : "http_error", "no such route").dump(),
                      "application/json");
    }
  });
}

int RestServer::start(const std::string &host) {
  if (config_.port == 0) {
    port_ = server_->bind_to_any_port(host);
  } else {
    port_ = server_->bind_to_port(host, config_.port) ? config_.port : -1;
  }
  if (port_ < 0) {
    throw ValidationError("bind_failed", fmt::format("cannot bind {}:{}", host, config_.port));
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void RestServer::run(const std::string &host) {
  port_ = config_.port;
  if (!server_->listen(host, config_.port)) {
    throw ValidationError("bind_failed", fmt::format("cannot listen on {}:{}", host, config_.port));
  }
}

void RestServer::stop() {
  if (server_) {
    server_->stop();
  }
  if (thread_.joinable()) {
    thread_.join();
  }
}

}  // namespace fluxqa::service
