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


#ifndef FLUXQA_SERVICE_REST_H
#define FLUXQA_SERVICE_REST_H

#include <memory>
#include <thread>

#include "fluxqa/service/session.h"

namespace httplib {
class Server;
}

namespace fluxqa::service {

/// HTTP/JSON front end over a SessionStore. Routes live under /api/v1; see
/// docs/api.md.
class RestServer {
 public:
  explicit RestServer(ServiceConfig config);
  ~RestServer();
  RestServer(const RestServer &) = delete;
  RestServer &operator=(const RestServer &) = delete;

  /// Binds config.port (0 picks a free port) on `host` and serves on a
  /// background thread. Returns the bound port.
  int start(const std::string &host = "127.0.0.1");
  /// Serves on the calling thread until stop().
  void run(const std::string &host = "0.0.0.0");
  void stop();
  int port() const { return port_; }
  SessionStore &store() { return *store_; }

 private:
  void install_routes();

  ServiceConfig config_;
  std::unique_ptr<SessionStore> store_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace fluxqa::service

#endif  // FLUXQA_SERVICE_REST_H
