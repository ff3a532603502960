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


#ifndef FLUXQA_SERVICE_SESSION_H
#define FLUXQA_SERVICE_SESSION_H

#include <condition_variable>
#include <filesystem>
#include <json.hpp>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "fluxqa/device/device.h"
#include "fluxqa/xtalk/affine.h"
#include "fluxqa/xtalk/lattice.h"
#include "fluxqa/xtalk/scan.h"

namespace fluxqa::service {

using json = nlohmann::json;

/// Unknown session or scan. HTTP 404.
class NotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operation conflicts with session state, e.g. a second scan in flight. HTTP 409.
class Conflict : public std::runtime_error {
 public:
  Conflict(std::string reason, const std::string &message)
      : std::runtime_error(message), reason_(std::move(reason)) {}
  const std::string &reason() const { return reason_; }

 private:
  std::string reason_;
};

struct ServiceConfig {
  int port = 8080;
  std::filesystem::path data_dir = "fluxqa_data";
  /// Simulated acquisition time is divided by this before a scan completes.
  double time_compression = 1000.0;

  /// FLUXQA_PORT, FLUXQA_DATA_DIR and FLUXQA_TIME_COMPRESSION override defaults.
  static ServiceConfig from_environment();
};

enum class ScanState { kRunning, kDone, kFailed };
std::string to_string(ScanState state);

struct ScanEntry {
  std::string id;
  ScanState state = ScanState::kRunning;
  json request;
  std::optional<xtalk::ScanGrid2D> grid;
  std::string error;
  double simulated_time_s = 0;
};

/// One calibration session: a device, its scan archive, the applied correction
/// and an append-only event log. Mutations are serialized by the session lock;
/// each bumps the revision counter and is persisted under the session directory.
class Session {
 public:
  Session(std::string id, DeviceConfig config, std::filesystem::path dir, double time_compression);
  ~Session();
  Session(const Session &) = delete;
  Session &operator=(const Session &) = delete;

  const std::string &id() const { return id_; }
  long revision() const;

  /// Id, revision, device config, correction, scans and pending fit.
  json describe() const;

  /// Starts an asynchronous scan. Body: scan request fields plus
  /// `correction: bool` (scan through the applied correction). Throws Conflict
  /// when a scan is already running, ValidationError for bad requests.
  json start_scan(const json &body);
  json scan_status(const std::string &scan_id) const;
  /// Throws Conflict("scan_running") until the scan has finished.
  json scan_data(const std::string &scan_id) const;

  /// Body: {scan_id, centers: [[x, y], ...], indices?: [[m, n], ...]}.
  /// Fits the lattice and stores the result as the pending fit.
  json submit_centers(const json &body);
  /// Body: {scan_id}. Automatic detection and fit on an archived scan.
  json auto_fit(const json &body);
  /// Body: {scan_id, centers}. Proposed lattice indices for clicked centers.
  json propose_indices(const json &body) const;
  /// Applies the pending fit (or a correction given in the body).
  json apply_correction(const json &body);
  json clear_correction();
  /// Verification rescan through the applied correction.
  json verification(uint64_t seed);
  json events() const;

  /// Waits for any running scan worker.
  void join();

  /// Rebuilds a session from its directory.
  static std::unique_ptr<Session> load(const std::filesystem::path &dir, double time_compression);

 private:
  void record_event(const std::string &operation, json detail);
  void persist() const;
  const ScanEntry &find_scan(const std::string &scan_id) const;
  json envelope(const std::string &operation, json payload) const;
  std::array<std::string, 2> scan_lines(const ScanEntry &scan) const;

  std::string id_;
  DeviceConfig config_;
  DeviceTruth device_;
  std::filesystem::path dir_;
  double time_compression_;

  mutable std::mutex mutex_;
  long revision_ = 0;
  std::optional<xtalk::AffineCorrection> correction_;
  std::optional<json> pending_fit_;
  std::optional<xtalk::AffineCorrection> pending_correction_;
  std::map<std::string, ScanEntry> scans_;
  int scan_counter_ = 0;
  bool scan_in_flight_ = false;
  std::vector<json> events_;
  std::thread worker_;
  std::condition_variable stop_cv_;
  bool stopping_ = false;
};

class SessionStore {
 public:
  explicit SessionStore(ServiceConfig config);
  ~SessionStore();

  /// Body: {device?: config object, device_seed?, crosstalk_fraction?}.
  std::shared_ptr<Session> create(const json &body);
  std::shared_ptr<Session> get(const std::string &id) const;
  json list() const;
  const ServiceConfig &config() const { return config_; }

 private:
  ServiceConfig config_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  uint64_t counter_ = 0;
};

}  // namespace fluxqa::service

#endif  // FLUXQA_SERVICE_SESSION_H
