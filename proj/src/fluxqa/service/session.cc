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


#include "fluxqa/service/session.h"

#include <fmt/format.h>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

#include "fluxqa/error.h"
#include "fluxqa/service/codec.h"
#include "fluxqa/service/run_record.h"
#include "fluxqa/service/workflows.h"
#include "fluxqa/xtalk/calibration.h"

namespace fluxqa::service {

namespace fs = std::filesystem;

namespace {

std::string utc_now() {
  auto now = std::chrono::system_clock::now();
  auto t = std::chrono::system_clock::to_time_t(now);
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}.{:03}Z", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                     tm.tm_hour, tm.tm_min, tm.tm_sec, ms);
}

json read_json_file(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("io_error", "cannot read " + path.string());
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return json::parse(ss.str());
}

void write_json_file(const fs::path &path, const json &j) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << j.dump(2) << "\n";
  }
  fs::rename(tmp, path);
}

json fit_payload(const xtalk::AffineFit &fit, const xtalk::AffineCorrection &composed) {
  return {{"lattice_fit", to_json(fit.lattice)},
          {"correction", to_json(fit.correction)},
          {"composed_correction", to_json(composed)}};
}

}  // namespace

ServiceConfig ServiceConfig::from_environment() {
  ServiceConfig c;
  if (const char *port = std::getenv("FLUXQA_PORT")) {
    c.port = std::atoi(port);
  }
  if (const char *dir = std::getenv("FLUXQA_DATA_DIR")) {
    c.data_dir = dir;
  }
  if (const char *tc = std::getenv("FLUXQA_TIME_COMPRESSION")) {
    c.time_compression = std::atof(tc);
  }
  if (c.port < 0 || c.port > 65535 || !(c.time_compression > 0)) {
    throw ValidationError("bad_config", "invalid port or time compression");
  }
  return c;
}

std::string to_string(ScanState state) {
  switch (state) {
    case ScanState::kRunning:
      return "running";
    case ScanState::kDone:
      return "done";
    case ScanState::kFailed:
      return "failed";
  }
  return "failed";
}

Session::Session(std::string id, DeviceConfig config, fs::path dir, double time_compression)
    : id_(std::move(id)),
      config_(std::move(config)),
      device_(build_device(config_)),
      dir_(std::move(dir)),
      time_compression_(time_compression) {
  fs::create_directories(dir_ / "scans");
  if (!fs::exists(dir_ / "session.json")) {
    std::lock_guard lock(mutex_);
    record_event("create_session", {{"device_seed", config_.seed}});
  }
}

Session::~Session() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  stop_cv_.notify_all();
  join();
}

void Session::join() {
  std::thread t;
  {
    std::lock_guard lock(mutex_);
    t = std::move(worker_);
  }
  if (t.joinable()) {
    t.join();
  }
}

long Session::revision() const {
  std::lock_guard lock(mutex_);
  return revision_;
}

json Session::envelope(const std::string &operation, json payload) const {
  json j = payload.is_object() ? std::move(payload) : json{{"result", std::move(payload)}};
  j["session_id"] = id_;
  j["revision"] = revision_;
  j["provenance"] = {{"service", "fluxqa"},
                     {"version", kVersion},
                     {"operation", operation},
                     {"device_seed", config_.seed},
                     {"timestamp", utc_now()}};
  return j;
}

void Session::record_event(const std::string &operation, json detail) {
  ++revision_;
  json e = {{"timestamp", utc_now()}, {"revision", revision_}, {"operation", operation}, {"detail", std::move(detail)}};
  {
    std::ofstream out(dir_ / "events.jsonl", std::ios::binary | std::ios::app);
    out << e.dump() << "\n";
  }
  events_.push_back(std::move(e));
  persist();
}

void Session::persist() const {
  json scans = json::array();
  for (const auto &[id, s] : scans_) {
    scans.push_back({{"id", id},
                     {"state", to_string(s.state)},
                     {"request", s.request},
                     {"error", s.error},
                     {"simulated_time_s", s.simulated_time_s}});
  }
  json j = {{"id", id_},
            {"device", to_json(config_)},
            {"revision", revision_},
            {"correction", correction_ ? to_json(*correction_) : json(nullptr)},
            {"pending_fit", pending_fit_ ? *pending_fit_ : json(nullptr)},
            {"pending_correction", pending_correction_ ? to_json(*pending_correction_) : json(nullptr)},
            {"scan_counter", scan_counter_},
            {"scans", scans}};
  write_json_file(dir_ / "session.json", j);
}

json Session::describe() const {
  std::lock_guard lock(mutex_);
  json scans = json::array();
  for (const auto &[id, s] : scans_) {
    scans.push_back({{"scan_id", id}, {"state", to_string(s.state)}});
  }
  return envelope("describe", {{"device", to_json(config_)},
                               {"correction", correction_ ? to_json(*correction_) : json(nullptr)},
                               {"pending_fit", pending_fit_ ? *pending_fit_ : json(nullptr)},
                               {"scan_in_flight", scan_in_flight_},
                               {"scans", scans}});
}

json Session::start_scan(const json &body) {
  std::unique_lock lock(mutex_);
  if (scan_in_flight_) {
    throw Conflict("scan_in_flight", "a scan is already running on this session");
  }
  auto request = scan_request_from(body);
  const bool use_correction = body.is_object() && body.value("correction", false);
  if (use_correction) {
    if (!correction_) {
      throw ValidationError("no_correction", "no correction is applied to this session");
    }
    request.correction = correction_;
    request.axis_x.label = correction_->lines[0];
    request.axis_y.label = correction_->lines[1];
  }
  request.axis_x.validate();
  request.axis_y.validate();
  device_.line_index(request.axis_x.label);
  device_.line_index(request.axis_y.label);
  auto timing = xtalk::simulate_acquisition_time(request.axis_x.n_points, request.axis_y.n_points,
                                                 request.acquisition);

  ScanEntry entry;
  entry.id = fmt::format("scan-{}", ++scan_counter_);
  entry.request = to_json(request);
  entry.request["correction"] = use_correction;
  entry.simulated_time_s = timing.total_time_s;
  const std::string scan_id = entry.id;
  scans_[scan_id] = entry;
  scan_in_flight_ = true;
  record_event("start_scan", {{"scan_id", scan_id}, {"request", entry.request}});
  json response = envelope("start_scan", {{"scan_id", scan_id},
                                          {"state", "running"},
                                          {"simulated_time_s", timing.total_time_s},
                                          {"acquisition", to_json(timing)}});

  std::thread previous = std::move(worker_);
  const double wait_s = timing.total_time_s / time_compression_;
  worker_ = std::thread([this, request, scan_id, wait_s] {
    std::optional<xtalk::ScanGrid2D> grid;
    std::string error;
    try {
      grid = xtalk::scan_transmission(device_, request);
    } catch (const std::exception &e) {
      error = e.what();
    }
    std::unique_lock l(mutex_);
    stop_cv_.wait_for(l, std::chrono::duration<double>(wait_s), [&] { return stopping_; });
    auto &s = scans_[scan_id];
    if (grid) {
      xtalk::save_scan(dir_ / "scans" / (scan_id + ".txt"), *grid);
      s.grid = std::move(grid);
      s.state = ScanState::kDone;
    } else {
      s.state = ScanState::kFailed;
      s.error = error;
    }
    scan_in_flight_ = false;
    record_event("scan_finished", {{"scan_id", scan_id}, {"state", to_string(s.state)}});
  });
  lock.unlock();
  if (previous.joinable()) {
    previous.join();
  }
  return response;
}

const ScanEntry &Session::find_scan(const std::string &scan_id) const {
  auto it = scans_.find(scan_id);
  if (it == scans_.end()) {
    throw NotFound(fmt::format("unknown scan '{}'", scan_id));
  }
  return it->second;
}

json Session::scan_status(const std::string &scan_id) const {
  std::lock_guard lock(mutex_);
  const auto &s = find_scan(scan_id);
  json j = {{"scan_id", s.id},
            {"state", to_string(s.state)},
            {"request", s.request},
            {"simulated_time_s", s.simulated_time_s}};
  if (s.state == ScanState::kFailed) {
    j["error"] = s.error;
  }
  if (s.grid) {
    j["acquisition"] = to_json(s.grid->acquisition);
  }
  return envelope("scan_status", j);
}

json Session::scan_data(const std::string &scan_id) const {
  std::lock_guard lock(mutex_);
  const auto &s = find_scan(scan_id);
  if (s.state == ScanState::kRunning) {
    throw Conflict("scan_running", fmt::format("scan '{}' is still running", scan_id));
  }
  if (!s.grid) {
    throw Conflict("scan_failed", fmt::format("scan '{}' failed: {}", scan_id, s.error));
  }
  json j = to_json(*s.grid);
  j["scan_id"] = s.id;
  return envelope("scan_data", j);
}

std::array<std::string, 2> Session::scan_lines(const ScanEntry &scan) const {
  return {scan.grid->axis_x.label, scan.grid->axis_y.label};
}

namespace {

const xtalk::ScanGrid2D &finished_grid(const ScanEntry &s) {
  if (!s.grid) {
    throw Conflict(s.state == ScanState::kRunning ? "scan_running" : "scan_failed",
                   fmt::format("scan '{}' has no data", s.id));
  }
  return *s.grid;
}

std::string scan_id_of(const json &body) {
  if (!body.is_object() || !body.contains("scan_id") || !body.at("scan_id").is_string()) {
    throw ValidationError("bad_request", "body must name a scan_id");
  }
  return body.at("scan_id").get<std::string>();
}

}  // namespace

json Session::submit_centers(const json &body) {
  std::lock_guard lock(mutex_);
  const auto &scan = find_scan(scan_id_of(body));
  const auto &grid = finished_grid(scan);
  auto centers = centers_from(body.value("centers", json(nullptr)));
  auto indices = indices_from(body.value("indices", json(nullptr)));
  std::optional<Eigen::Matrix2d> guess;
  if (indices.empty()) {
    if (centers.size() < 3) {
      throw ValidationError("insufficient_centers", "at least three centers are needed for a fit");
    }
    guess = xtalk::estimate_basis_spectral(grid).basis;
  }
  auto fit = xtalk::fit_manual_centers(centers, indices, guess, scan_lines(scan));
  auto composed = grid.correction ? grid.correction->compose(fit.correction) : fit.correction;
  json payload = fit_payload(fit, composed);
  payload["scan_id"] = scan.id;
  pending_fit_ = payload;
  pending_correction_ = composed;
  record_event("submit_centers", {{"scan_id", scan.id}, {"n_centers", centers.size()}});
  return envelope("submit_centers", payload);
}

json Session::auto_fit(const json &body) {
  std::lock_guard lock(mutex_);
  const auto &scan = find_scan(scan_id_of(body));
  const auto &grid = finished_grid(scan);
  auto result = xtalk::auto_fit(grid);
  auto composed = grid.correction ? grid.correction->compose(result.fit.correction) : result.fit.correction;
  json payload = fit_payload(result.fit, composed);
  payload["scan_id"] = scan.id;
  payload["n_centers_detected"] = result.centers.size();
  pending_fit_ = payload;
  pending_correction_ = composed;
  record_event("auto_fit", {{"scan_id", scan.id}});
  return envelope("auto_fit", payload);
}

json Session::propose_indices(const json &body) const {
  std::lock_guard lock(mutex_);
  const auto &scan = find_scan(scan_id_of(body));
  const auto &grid = finished_grid(scan);
  auto centers = centers_from(body.value("centers", json(nullptr)));
  auto basis = xtalk::estimate_basis_spectral(grid).basis;
  auto assigned = xtalk::assign_lattice_indices(centers, basis);
  json accepted = json::array();
  for (const auto &c : assigned.accepted) {
    accepted.push_back({{"position", to_json(c.position)}, {"index", {c.index(0), c.index(1)}}});
  }
  json rejected = json::array();
  for (const auto &c : assigned.rejected) {
    rejected.push_back(to_json(c));
  }
  return envelope("propose_indices",
                  {{"scan_id", scan.id}, {"basis", to_json(basis)}, {"accepted", accepted}, {"rejected", rejected}});
}

json Session::apply_correction(const json &body) {
  std::lock_guard lock(mutex_);
  if (body.is_object() && body.contains("correction") && !body.at("correction").is_null()) {
    correction_ = correction_from(body.at("correction"));
  } else if (pending_correction_) {
    correction_ = pending_correction_;
  } else {
    throw ValidationError("no_pending_fit", "no fit to apply; submit centers or request a fit first");
  }
  device_.line_index(correction_->lines[0]);
  device_.line_index(correction_->lines[1]);
  record_event("apply_correction", {{"correction", to_json(*correction_)}});
  return envelope("apply_correction", {{"correction", to_json(*correction_)}});
}

json Session::clear_correction() {
  std::lock_guard lock(mutex_);
  correction_.reset();
  record_event("clear_correction", json::object());
  return envelope("clear_correction", {{"correction", nullptr}});
}

json Session::verification(uint64_t seed) {
  std::lock_guard lock(mutex_);
  if (!correction_) {
    throw ValidationError("no_correction", "no correction is applied to this session");
  }
  xtalk::ScanRequest request;
  request.seed = seed;
  auto report = verification_json(device_, *correction_, request);
  record_event("verification", {{"seed", seed}});
  return envelope("verification", report);
}

json Session::events() const {
  std::lock_guard lock(mutex_);
  return envelope("events", {{"events", events_}});
}

std::unique_ptr<Session> Session::load(const fs::path &dir, double time_compression) {
  json j;
  try {
    j = read_json_file(dir / "session.json");
  } catch (const json::exception &e) {
    throw ValidationError("bad_session", fmt::format("corrupt session file in {}: {}", dir.string(), e.what()));
  }
  auto s = std::make_unique<Session>(j.at("id").get<std::string>(), device_config_from(j.at("device")), dir,
                                     time_compression);
  s->revision_ = j.at("revision").get<long>();
  if (!j.at("correction").is_null()) {
    s->correction_ = correction_from(j.at("correction"));
  }
  if (!j.at("pending_fit").is_null()) {
    s->pending_fit_ = j.at("pending_fit");
  }
  if (j.contains("pending_correction") && !j.at("pending_correction").is_null()) {
    s->pending_correction_ = correction_from(j.at("pending_correction"));
  }
  s->scan_counter_ = j.at("scan_counter").get<int>();
  for (const auto &e : j.at("scans")) {
    ScanEntry entry;
    entry.id = e.at("id").get<std::string>();
    entry.request = e.at("request");
    entry.error = e.at("error").get<std::string>();
    entry.simulated_time_s = e.at("simulated_time_s").get<double>();
    auto path = dir / "scans" / (entry.id + ".txt");
    if (fs::exists(path)) {
      entry.grid = xtalk::load_scan(path);
      entry.state = ScanState::kDone;
    } else {
      entry.state = ScanState::kFailed;
      if (entry.error.empty()) {
        entry.error = "interrupted";
      }
    }
    s->scans_[entry.id] = std::move(entry);
  }
  s->persist();
  std::ifstream events(dir / "events.jsonl");
  for (std::string line; std::getline(events, line);) {
    if (!line.empty()) {
      s->events_.push_back(json::parse(line));
    }
  }
  return s;
}

SessionStore::SessionStore(ServiceConfig config) : config_(std::move(config)) {
  auto root = config_.data_dir / "sessions";
  fs::create_directories(root);
  for (const auto &entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::exists(entry.path() / "session.json")) {
      std::shared_ptr<Session> s = Session::load(entry.path(), config_.time_compression);
      sessions_[s->id()] = s;
    }
  }
}

SessionStore::~SessionStore() = default;

std::shared_ptr<Session> SessionStore::create(const json &body) {
  DeviceConfig config;
  if (body.is_object() && body.contains("device") && !body.at("device").is_null()) {
    config = device_config_from(body.at("device"));
  }
  if (body.is_object()) {
    if (body.contains("device_seed")) {
      config.seed = body.at("device_seed").get<uint64_t>();
    }
    if (body.contains("crosstalk_fraction")) {
      config.crosstalk_fraction = body.at("crosstalk_fraction").get<double>();
    }
  }
  config.validate();
  std::lock_guard lock(mutex_);
  std::random_device rd;
  std::string id;
  do {
    id = fmt::format("s{:04x}{:08x}", ++counter_ & 0xffff, rd());
  } while (sessions_.count(id));
  auto s = std::make_shared<Session>(id, config, config_.data_dir / "sessions" / id, config_.time_compression);
  sessions_[id] = s;
  return s;
}

std::shared_ptr<Session> SessionStore::get(const std::string &id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) {
    throw NotFound(fmt::format("unknown session '{}'", id));
  }
  return it->second;
}

json SessionStore::list() const {
  std::lock_guard lock(mutex_);
  json out = json::array();
  for (const auto &[id, s] : sessions_) {
    out.push_back({{"session_id", id}, {"revision", s->revision()}});
  }
  return out;
}

}  // namespace fluxqa::service
