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


#include "fluxqa/service/workflows.h"

#include <fmt/format.h>

#include <chrono>
#include <fstream>

#include "fluxqa/characterization/coherence.h"
#include "fluxqa/error.h"
#include "fluxqa/io/text_matrix.h"
#include "fluxqa/service/codec.h"

namespace fluxqa::service {

namespace {

namespace fs = std::filesystem;

class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) {
      throw ValidationError("io_error", fmt::format("cannot create {}: {}", dir_.string(), ec.message()));
    }
  }

  fs::path claim(const std::string &name) {
    files_.push_back(name);
    return dir_ / name;
  }

  void write_json(const std::string &name, const json &j) {
    std::ofstream out(claim(name), std::ios::binary);
    if (!out) {
      throw ValidationError("io_error", "cannot write " + (dir_ / name).string());
    }
    out << j.dump(2) << "\n";
  }

  std::vector<std::string> files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

template <typename T>
T get_or(const json &j, const char *key, T fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) {
    return fallback;
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception &e) {
    throw ValidationError("bad_request", fmt::format("parameter '{}': {}", key, e.what()));
  }
}

json sub(const json &j, const char *key) {
  return j.is_object() && j.contains(key) && !j.at(key).is_null() ? j.at(key) : json::object();
}

std::array<std::string, 2> lines_of(const xtalk::ScanRequest &r) { return {r.axis_x.label, r.axis_y.label}; }

WorkflowResult run_device(const json &p, Outputs &out) {
  WorkflowResult r;
  auto config = device_config_from(sub(p, "device"));
  auto device = build_device(config);
  r.parameters = {{"device", to_json(config)}};
  r.seed = config.seed;
  save_device_config(out.claim("device_config.json"), config);
  json truth = {{"note", "hidden simulator truth; diagnostic only"},
                {"line_labels", device.line_labels()},
                {"loop_labels", device.loop_labels()},
                {"control_matrix_phi0_per_ma", to_json(device.true_control_matrix())},
                {"flux_offsets_phi0", std::vector<double>(device.flux_offsets().data(),
                                                           device.flux_offsets().data() + device.n_loops())},
                {"pattern_offset_phi0",
                 std::vector<double>(device.pattern_fractional_offset().data(),
                                     device.pattern_fractional_offset().data() + device.n_loops())}};
  out.write_json("device_truth.json", truth);
  r.summary = {{"n_qubits", config.n_qubits()}, {"n_lines", config.n_lines()}, {"seed", config.seed}};
  return r;
}

xtalk::ScanRequest request_with_correction(const json &p) {
  auto request = scan_request_from(sub(p, "scan"));
  if (p.contains("correction") && !p.at("correction").is_null()) {
    request.correction = correction_from(p.at("correction"));
    request.axis_x.label = request.correction->lines[0];
    request.axis_y.label = request.correction->lines[1];
  }
  return request;
}

WorkflowResult run_scan(const json &p, Outputs &out) {
  WorkflowResult r;
  auto config = device_config_from(sub(p, "device"));
  auto device = build_device(config);
  auto request = request_with_correction(p);
  auto scan = xtalk::scan_transmission(device, request);
  r.parameters = {{"device", to_json(config)},
                  {"scan", to_json(request)},
                  {"correction", request.correction ? to_json(*request.correction) : json(nullptr)}};
  r.seed = request.seed;
  xtalk::save_scan(out.claim("scan.txt"), scan);
  r.summary = {{"acquisition", to_json(scan.acquisition)}, {"corrected", scan.corrected}, {"warning", scan.warning}};
  return r;
}

json centers_json(const xtalk::AutoFitResult &fit) {
  json accepted = json::array();
  for (const auto &c : fit.indexed.accepted) {
    accepted.push_back({{"position", to_json(c.position)}, {"index", {c.index(0), c.index(1)}}});
  }
  json rejected = json::array();
  for (const auto &c : fit.indexed.rejected) {
    rejected.push_back(to_json(c));
  }
  return {{"detected", fit.centers.size()}, {"accepted", accepted}, {"rejected", rejected}};
}

WorkflowResult run_fit(const json &p, Outputs &out) {
  WorkflowResult r;
  auto config = device_config_from(sub(p, "device"));
  auto device = build_device(config);
  const auto mode = get_or<std::string>(p, "mode", "auto");
  auto request = request_with_correction(p);
  const bool verify = get_or(p, "verify", true);
  r.seed = request.seed;
  r.parameters = {{"device", to_json(config)},
                  {"mode", mode},
                  {"scan", to_json(request)},
                  {"correction", request.correction ? to_json(*request.correction) : json(nullptr)}};

  std::optional<xtalk::AffineCorrection> result;
  if (mode == "auto") {
    r.parameters["verify"] = verify;
    auto cal = xtalk::calibrate_auto(device, request);
    xtalk::save_scan(out.claim("scan.txt"), cal.scan);
    out.write_json("centers.json", centers_json(cal.fit));
    out.write_json("fit.json", to_json(cal.fit.fit));
    result = cal.correction;
    r.summary["lattice_fit"] = to_json(cal.fit.fit.lattice);
  } else if (mode == "centers") {
    auto centers = centers_from(p.contains("centers") ? p.at("centers") : json(nullptr));
    auto indices = indices_from(p.contains("indices") ? p.at("indices") : json(nullptr));
    std::optional<Eigen::Matrix2d> guess;
    if (indices.empty()) {
      guess = xtalk::estimate_basis_spectral(xtalk::scan_transmission(device, request)).basis;
    }
    auto fit = xtalk::fit_manual_centers(centers, indices, guess, lines_of(request));
    r.parameters["centers"] = p.at("centers");
    r.parameters["indices"] = p.contains("indices") ? p.at("indices") : json(nullptr);
    r.parameters["verify"] = verify;
    out.write_json("fit.json", to_json(fit));
    result = request.correction ? request.correction->compose(fit.correction) : fit.correction;
    r.summary["lattice_fit"] = to_json(fit.lattice);
  } else if (mode == "verify") {
    if (!request.correction) {
      throw ValidationError("no_correction", "verify mode needs a correction");
    }
    auto report = verification_json(device, *request.correction, request);
    out.write_json("verification.json", report);
    r.summary["verification"] = report;
    return r;
  } else {
    throw ValidationError("bad_request", fmt::format("unknown calibrate mode '{}'", mode));
  }

  xtalk::save_correction(out.claim("correction.json"), *result);
  if (verify) {
    xtalk::ScanRequest vreq = request;
    vreq.correction.reset();
    auto report = verification_json(device, *result, vreq);
    out.write_json("verification.json", report);
    r.summary["residual_offdiag_fraction"] = report.at("residual_offdiag_fraction");
    r.summary["verification"] = report;
  }
  return r;
}

WorkflowResult run_characterize(const json &p, Outputs &out) {
  namespace ch = characterization;
  WorkflowResult r;
  const auto kind_text = get_or<std::string>(p, "kind", "t1");
  const bool ramsey = kind_text == "ramsey";
  if (!ramsey && kind_text != "t1") {
    throw ValidationError("bad_request", fmt::format("unknown characterization kind '{}'", kind_text));
  }
  const double t1_us = get_or(p, "t1_us", 3.5);
  const double t2_ns = get_or(p, "t2_star_ns", 130.0);
  const double detuning = get_or(p, "detuning_mhz", 5.0);
  const double sigma = get_or(p, "noise_sigma", 0.02);
  const auto seed = get_or<uint64_t>(p, "seed", 0);
  const auto trace_file = get_or<std::string>(p, "trace_file", "");
  r.seed = seed;

  ch::DecayTrace trace;
  if (!trace_file.empty()) {
    trace = ch::load_trace(trace_file);
    r.parameters = {{"trace_file", trace_file}};
  } else {
    Eigen::VectorXd delays;
    if (p.contains("delays_ns") && !p.at("delays_ns").is_null()) {
      auto d = get_or(p, "delays_ns", std::vector<double>{});
      delays = Eigen::Map<Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size()));
    } else {
      delays = ramsey ? ch::default_ramsey_delays_ns(t2_ns, detuning) : ch::default_t1_delays_ns(t1_us);
    }
    trace = ramsey ? ch::simulate_ramsey_trace(t2_ns, detuning, delays, sigma, seed)
                   : ch::simulate_t1_trace(t1_us, delays, sigma, seed);
    r.parameters = {{"kind", kind_text},
                    {"t1_us", t1_us},
                    {"t2_star_ns", t2_ns},
                    {"detuning_mhz", detuning},
                    {"noise_sigma", sigma},
                    {"seed", seed},
                    {"delays_ns", std::vector<double>(delays.data(), delays.data() + delays.size())}};
  }
  ch::save_trace(out.claim("trace.txt"), trace);
  auto fit = ch::fit_decay(trace);
  json fit_json = to_json(fit);
  if (trace_file.empty()) {
    double planted = ramsey ? t2_ns : t1_us * 1e3;
    fit_json["planted_time_constant_ns"] = planted;
    fit_json["relative_error"] = std::abs(fit.time_constant_ns - planted) / planted;
  }
  out.write_json("fit.json", fit_json);
  r.summary = fit_json;
  return r;
}

WorkflowResult run_readout(const json &p, Outputs &out) {
  WorkflowResult r;
  auto resonator = resonator_from(sub(p, "resonator"));
  readout::ShotSettings settings;
  settings.probe_ghz = get_or(p, "probe_ghz", resonator.f_down_ghz);
  settings.integration_time_us = get_or(p, "integration_time_us", settings.integration_time_us);
  settings.sigma_unit = get_or(p, "sigma_unit", settings.sigma_unit);
  const int n_shots = get_or(p, "n_shots", 100000);
  const auto seed = get_or<uint64_t>(p, "seed", 0);
  const int bins = get_or(p, "bins", 100);
  const bool save = get_or(p, "save_shots", false);
  r.seed = seed;
  r.parameters = {{"resonator", to_json(resonator)},
                  {"probe_ghz", settings.probe_ghz},
                  {"integration_time_us", settings.integration_time_us},
                  {"sigma_unit", settings.sigma_unit},
                  {"n_shots", n_shots},
                  {"seed", seed},
                  {"bins", bins},
                  {"save_shots", save}};
  auto down = readout::simulate_shots(resonator, readout::SpinState::kDown, settings, n_shots, seed);
  auto up = readout::simulate_shots(resonator, readout::SpinState::kUp, settings, n_shots, seed);
  auto d = readout::discriminate(down, up);
  io::save_text_matrix(out.claim("histogram.txt"), readout::histogram_to_text_matrix(readout::histogram(down, up, bins)));
  if (save) {
    readout::save_shots(out.claim("shots_down.txt"), down);
    readout::save_shots(out.claim("shots_up.txt"), up);
  }
  json dj = to_json(d);
  dj["qubit_flux_signal_mphi0"] = readout::qubit_flux_into_squid_mphi0(100.0, resonator.mutual_to_squid_ph);
  dj["shift_in_linewidths"] = resonator.shift_in_linewidths();
  out.write_json("discrimination.json", dj);
  r.summary = dj;
  return r;
}

io::TextMatrix populations_matrix(const Eigen::VectorXd &pops, const anneal::IsingProblem &problem, double success) {
  io::TextMatrix m;
  m.set("kind", "populations");
  m.set("columns", "state population classical_energy");
  m.set("n_qubits", static_cast<double>(problem.n));
  m.set("success_probability", success);
  m.values.resize(pops.size(), 3);
  for (Eigen::Index k = 0; k < pops.size(); ++k) {
    m.values(k, 0) = static_cast<double>(k);
    m.values(k, 1) = pops(k);
    m.values(k, 2) = anneal::classical_energy(problem, static_cast<uint32_t>(k));
  }
  return m;
}

WorkflowResult run_anneal(const json &p, Outputs &out) {
  WorkflowResult r;
  auto problem = problem_from(p.contains("problem") ? p.at("problem") : json("k3_afm"));
  auto schedule = schedule_from(sub(p, "schedule"));
  anneal::StepControl control;
  control.rtol = get_or(p, "rtol", control.rtol);
  control.atol = get_or(p, "atol", control.atol);
  const int resolution = get_or(p, "resolution", 256);
  const bool open = p.contains("noise") && !p.at("noise").is_null();
  auto temperatures = get_or(p, "temperatures_ghz", std::vector<double>{});
  r.parameters = {{"problem", to_json(problem)},
                  {"schedule", to_json(schedule)},
                  {"rtol", control.rtol},
                  {"atol", control.atol},
                  {"resolution", resolution},
                  {"temperatures_ghz", temperatures}};

  auto gap = anneal::find_min_gap(problem, schedule, resolution);
  json result = {{"tolerances", {{"rtol", control.rtol}, {"atol", control.atol}}}};
  double success = 0;
  Eigen::VectorXd pops;
  if (open) {
    auto noise = noise_from(p.at("noise"));
    auto coupler = sub(p, "readout_coupler");
    r.parameters["readout_coupler"] = coupler.empty() ? json(nullptr) : coupler;
    r.parameters["noise"] = to_json(noise);
    if (!coupler.empty()) {
      noise = noise_with_readout_coupler(noise, resonator_from(coupler));
    }
    auto run = anneal::evolve_open(problem, schedule, noise, std::nullopt, control);
    success = anneal::success_probability(run.rho, problem);
    pops = anneal::populations(run.rho);
    result["model"] = "lindblad";
    result["effective_noise"] = to_json(noise);
    result["trace_error"] = run.trace_error;
    result["hermiticity_error"] = run.hermiticity_error;
    result["min_eigenvalue"] = run.min_eigenvalue;
    result["steps"] = run.stats.accepted;
    result["rejected_steps"] = run.stats.rejected;
    if (!temperatures.empty()) {
      auto sweep = anneal::thermal_depopulation_sweep(problem, schedule, noise, temperatures, control);
      io::TextMatrix m;
      m.set("kind", "thermal_sweep");
      m.set("columns", "temperature_ghz success_probability");
      m.values.resize(static_cast<Eigen::Index>(sweep.size()), 2);
      for (size_t i = 0; i < sweep.size(); ++i) {
        m.values(static_cast<Eigen::Index>(i), 0) = sweep[i].temperature_ghz;
        m.values(static_cast<Eigen::Index>(i), 1) = sweep[i].success;
      }
      io::save_text_matrix(out.claim("thermal_sweep.txt"), m);
    }
  } else {
    r.parameters["noise"] = nullptr;
    auto run = anneal::evolve_closed(problem, schedule, std::nullopt, control);
    success = anneal::success_probability(run.state, problem);
    pops = anneal::populations(run.state);
    result["model"] = "schrodinger";
    result["norm_drift"] = run.norm_drift;
    result["steps"] = run.stats.accepted;
    result["rejected_steps"] = run.stats.rejected;
  }
  result["success_probability"] = success;
  result["min_gap"] = to_json(gap);
  io::save_text_matrix(out.claim("populations.txt"), populations_matrix(pops, problem, success));
  out.write_json("min_gap.json", to_json(gap));
  out.write_json("result.json", result);
  r.summary = result;
  return r;
}

WorkflowResult run_search_gaps(const json &p, Outputs &out) {
  WorkflowResult r;
  anneal::FamilySpec family;
  auto f = sub(p, "family");
  family.n = get_or(f, "n", family.n);
  family.h_max = get_or(f, "h_max", family.h_max);
  family.j_min = get_or(f, "j_min", family.j_min);
  family.j_max = get_or(f, "j_max", family.j_max);
  family.grid_step = get_or(f, "grid_step", family.grid_step);
  if (f.contains("edges")) {
    family.edges = get_or(f, "edges", std::vector<std::pair<int, int>>{});
  }
  if (f.contains("fixed") && !f.at("fixed").is_null()) {
    family.fixed = problem_from(f.at("fixed"));
  }
  const int n_samples = get_or(p, "n_samples", 200);
  const auto seed = get_or<uint64_t>(p, "seed", 0);
  const int resolution = get_or(p, "resolution", 128);
  auto schedule = schedule_from(sub(p, "schedule"));
  auto ranking = anneal::search_small_gap_instances(family, n_samples, seed, schedule, resolution);
  json rj = to_json(ranking);
  r.seed = seed;
  r.parameters = {{"family", rj.at("family")},
                  {"n_samples", n_samples},
                  {"seed", seed},
                  {"resolution", resolution},
                  {"schedule", to_json(schedule)}};
  rj["schedule"] = to_json(schedule);
  out.write_json("ranking.json", rj);
  r.summary = {{"n_ranked", ranking.ranked.size()},
               {"smallest_gap_ghz", ranking.ranked.front().min_gap.gap},
               {"largest_gap_ghz", ranking.ranked.back().min_gap.gap}};
  return r;
}

}  // namespace

DeviceConfig device_config_from(const json &j) {
  if (j.is_null() || (j.is_object() && j.empty())) {
    return DeviceConfig{};
  }
  return device_config_from_json(j.dump());
}

json to_json(const DeviceConfig &config) { return json::parse(device_config_to_json(config)); }

anneal::IsingProblem problem_from(const json &j) {
  if (j.is_string()) {
    return anneal::named_problem(j.get<std::string>());
  }
  if (!j.is_object()) {
    throw ValidationError("bad_problem", "problem must be a name or an {n, h, J} object");
  }
  if (j.contains("text")) {
    return anneal::problem_from_text(j.at("text").get<std::string>());
  }
  try {
    anneal::IsingProblem p;
    p.n = j.at("n").get<int>();
    p.h = j.value("h", std::vector<double>(static_cast<size_t>(std::max(p.n, 0)), 0.0));
    if (j.contains("J")) {
      for (const auto &c : j.at("J")) {
        int a = c.at(0).get<int>(), b = c.at(1).get<int>();
        p.J[{a, b}] = c.at(2).get<double>();
      }
    }
    p.validate();
    return p;
  } catch (const json::exception &e) {
    throw ValidationError("bad_problem", std::string("malformed problem: ") + e.what());
  }
}

json verification_json(const DeviceTruth &device, const xtalk::AffineCorrection &correction,
                       const xtalk::ScanRequest &request) {
  auto report = xtalk::verify_orthogonality(device, correction, request);
  json j = to_json(report);
  j["correction"] = to_json(correction);
  j["seed"] = request.seed;
  return j;
}

anneal::NoiseSpec noise_with_readout_coupler(const anneal::NoiseSpec &noise, const ResonatorParams &resonator) {
  anneal::NoiseSpec out = noise;
  constexpr double kReferenceT1 = 1.0;
  out.relaxation.coupling_rate_per_us *= kReferenceT1 / readout::readout_backaction_t1_us(resonator, kReferenceT1);
  return out;
}

WorkflowResult run_workflow(RunKind kind, const json &parameters, const fs::path &out_dir) {
  Outputs out(out_dir);
  const json p = parameters.is_null() ? json::object() : parameters;
  WorkflowResult r;
  switch (kind) {
    case RunKind::kDevice:
      r = run_device(p, out);
      break;
    case RunKind::kScan:
      r = run_scan(p, out);
      break;
    case RunKind::kFit:
      r = run_fit(p, out);
      break;
    case RunKind::kCharacterize:
      r = run_characterize(p, out);
      break;
    case RunKind::kReadout:
      r = run_readout(p, out);
      break;
    case RunKind::kAnneal:
      r = run_anneal(p, out);
      break;
    case RunKind::kSearchGaps:
      r = run_search_gaps(p, out);
      break;
  }
  r.files = out.files();
  return r;
}

RunRecord execute(RunKind kind, const json &parameters, const fs::path &out_dir, WorkflowResult *result) {
  auto start = std::chrono::steady_clock::now();
  auto r = run_workflow(kind, parameters, out_dir);
  RunRecord record;
  record.kind = kind;
  record.parameters = r.parameters;
  record.seed = r.seed;
  for (const auto &name : r.files) {
    record.results.push_back({name, file_digest(out_dir / name)});
  }
  record.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  save_run_record(out_dir / "run_record.json", record);
  if (result) {
    *result = std::move(r);
  }
  return record;
}

ReplayReport replay(const RunRecord &record, const fs::path &out_dir) {
  auto r = run_workflow(record.kind, record.parameters, out_dir);
  ReplayReport report;
  for (const auto &f : record.results) {
    std::error_code ec;
    if (!fs::exists(out_dir / f.name, ec) || file_digest(out_dir / f.name) != f.digest) {
      report.identical = false;
      report.mismatched.push_back(f.name);
    }
  }
  if (r.files.size() != record.results.size()) {
    report.identical = false;
  }
  return report;
}

}  // namespace fluxqa::service
