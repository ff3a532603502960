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

#include "fluxqa/device/device.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "fluxqa/error.h"
#include "fluxqa/random.h"

namespace fluxqa {

namespace {

constexpr size_t kMaxQubits = 8;
constexpr int kMaxMatrixRetries = 16;
constexpr double kDefaultDesignedMutual = 0.5;

std::vector<double> designed_mutuals_or_default(const DeviceConfig &config) {
  if (!config.designed_mutuals.empty()) {
    return config.designed_mutuals;
  }
  return std::vector<double>(config.n_lines(), kDefaultDesignedMutual);
}

bool full_row_rank(const Eigen::MatrixXd &m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto &sv = svd.singularValues();
  if (sv.size() == 0) {
    return false;
  }
  return sv(sv.size() - 1) > 1e-9 * sv(0) && svd.rank() == m.rows();
}

void fill_labels(size_t n_qubits, std::vector<std::string> &loops, std::vector<std::string> &lines) {
  loops.clear();
  lines.clear();
  for (size_t q = 0; q < n_qubits; ++q) {
    loops.push_back(loop_label(q, false));
    loops.push_back(loop_label(q, true));
    lines.push_back(line_label(q, false));
    lines.push_back(line_label(q, true));
  }
}

template <class Tag>
void check_labels(const LabeledVector<Tag> &v, Eigen::Index expected, const char *what) {
  if (v.values.size() != expected) {
    throw ValidationError("dimension_mismatch", fmt::format("{} vector has length {}, expected {}", what,
                                                            v.values.size(), expected));
  }
  if (!v.labels.empty()) {
    if (static_cast<Eigen::Index>(v.labels.size()) != expected) {
      throw ValidationError("dimension_mismatch", fmt::format("{} labels do not match values", what));
    }
    std::set<std::string> unique(v.labels.begin(), v.labels.end());
    if (unique.size() != v.labels.size()) {
      throw ValidationError("duplicate_label", fmt::format("{} labels are not unique", what));
    }
  }
}

}  // namespace

void QubitParams::validate() const {
  if (!(persistent_current_na > 0) || !(x_junction_critical_current_na > 0) ||
      !(z_junction_critical_current_na > 0)) {
    throw ValidationError("bad_qubit", "persistent and critical currents must be positive");
  }
  if (!(ref_ip_na > 0) || !(base_t1_us > 0) || !(base_tphi_ns > 0)) {
    throw ValidationError("bad_qubit", "reference current and base coherence times must be positive");
  }
}

Coherence effective_coherence(const QubitParams &qubit, double ip_operating_na) {
  if (!(ip_operating_na > 0)) {
    throw ValidationError("bad_current", "operating persistent current must be positive");
  }
  double ratio = qubit.ref_ip_na / ip_operating_na;
  return {qubit.base_t1_us * ratio * ratio, qubit.base_tphi_ns * ratio};
}

void DeviceConfig::validate() const {
  if (qubits.empty() || qubits.size() > kMaxQubits) {
    throw ValidationError("bad_device", fmt::format("device must have 1..{} qubits", kMaxQubits));
  }
  for (const auto &q : qubits) {
    q.validate();
  }
  if (!resonators.empty() && resonators.size() != qubits.size()) {
    throw ValidationError("bad_device", "need exactly one resonator per qubit");
  }
  for (const auto &r : resonators) {
    r.validate();
  }
  if (!designed_mutuals.empty() && designed_mutuals.size() != n_lines()) {
    throw ValidationError("bad_device", "need one designed mutual per control line");
  }
  for (double m : designed_mutuals) {
    if (!(m != 0) || !std::isfinite(m)) {
      throw ValidationError("bad_device", "designed mutuals must be finite and nonzero");
    }
  }
  if (!(crosstalk_fraction >= 0 && crosstalk_fraction <= 0.5)) {
    throw ValidationError("bad_device", "crosstalk_fraction must lie in [0, 0.5]");
  }
  if (!(neighbor_crosstalk_fraction >= 0 && neighbor_crosstalk_fraction <= crosstalk_fraction)) {
    throw ValidationError("bad_device", "neighbor_crosstalk_fraction must lie in [0, crosstalk_fraction]");
  }
  if (!(noise.bump_width_phi0 > 0 && noise.bump_width_phi0 < 0.25) || !(noise.pull_linewidths > 0) ||
      !(noise.noise_sigma >= 0)) {
    throw ValidationError("bad_device", "scan model: need 0 < bump width < 0.25, pull > 0, noise >= 0");
  }
}

std::string line_label(size_t qubit, bool z_line) { return fmt::format("{}{}", z_line ? 'z' : 'x', qubit); }

std::string loop_label(size_t qubit, bool z_loop) {
  return fmt::format("phi_{}{}", z_loop ? 'z' : 'x', qubit);
}

Eigen::Index DeviceTruth::line_index(const std::string &label) const {
  auto it = std::find(line_labels_.begin(), line_labels_.end(), label);
  if (it == line_labels_.end()) {
    throw ValidationError("unknown_axis", "unknown control line '" + label + "'");
  }
  return it - line_labels_.begin();
}

Eigen::Index DeviceTruth::loop_index(const std::string &label) const {
  auto it = std::find(loop_labels_.begin(), loop_labels_.end(), label);
  if (it == loop_labels_.end()) {
    throw ValidationError("unknown_loop", "unknown loop '" + label + "'");
  }
  return it - loop_labels_.begin();
}

DeviceTruth build_device(const DeviceConfig &config) {
  config.validate();
  const auto n_lines = static_cast<Eigen::Index>(config.n_lines());
  const auto designed = designed_mutuals_or_default(config);

  Rng rng(config.seed);
  Eigen::MatrixXd m(n_lines, n_lines);
  bool ok = false;
  for (int attempt = 0; attempt < kMaxMatrixRetries && !ok; ++attempt) {
    for (Eigen::Index i = 0; i < n_lines; ++i) {
      for (Eigen::Index j = 0; j < n_lines; ++j) {
        if (i == j) {
          m(i, j) = designed[j];
          continue;
        }
        auto qi = i / 2;
        auto qj = j / 2;
        double fraction = 0;
        if (qi == qj) {
          fraction = config.crosstalk_fraction;
        } else if (std::abs(qi - qj) == 1) {
          fraction = config.neighbor_crosstalk_fraction;
        }
        m(i, j) = fraction > 0 ? rng.uniform(-fraction, fraction) * designed[j] : 0.0;
      }
    }
    ok = full_row_rank(m);
  }
  if (!ok) {
    throw NumericalError("could not generate an invertible control matrix");
  }

  Eigen::VectorXd offsets = Eigen::VectorXd::Zero(n_lines);
  if (config.offsets_enabled) {
    for (Eigen::Index i = 0; i < n_lines; ++i) {
      offsets(i) = rng.uniform(-0.5, 0.5);
    }
  }
  Eigen::VectorXd pattern(n_lines);
  for (Eigen::Index i = 0; i < n_lines; ++i) {
    pattern(i) = rng.uniform();
  }
  return make_device_truth(config, std::move(m), std::move(offsets), std::move(pattern));
}

DeviceTruth make_device_truth(DeviceConfig config, Eigen::MatrixXd control_matrix, Eigen::VectorXd flux_offsets,
                              Eigen::VectorXd pattern_offset) {
  config.validate();
  if (config.resonators.empty()) {
    config.resonators.assign(config.n_qubits(), ResonatorParams{});
  }
  const auto n = static_cast<Eigen::Index>(config.n_lines());
  if (control_matrix.rows() != n || control_matrix.cols() != n || flux_offsets.size() != n ||
      pattern_offset.size() != n) {
    throw ValidationError("dimension_mismatch", "planted device arrays do not match the qubit count");
  }
  if (!full_row_rank(control_matrix)) {
    throw ValidationError("singular_matrix", "control matrix does not have full row rank");
  }
  DeviceTruth d;
  d.config_ = std::move(config);
  d.control_matrix_ = std::move(control_matrix);
  d.flux_offsets_ = std::move(flux_offsets);
  d.pattern_offset_ = std::move(pattern_offset);
  fill_labels(d.config_.n_qubits(), d.loop_labels_, d.line_labels_);
  return d;
}

FluxVector true_flux(const DeviceTruth &device, const CurrentVector &currents) {
  check_labels(currents, device.n_lines(), "current");
  if (!currents.labels.empty() && currents.labels != device.line_labels()) {
    throw ValidationError("dimension_mismatch", "current labels do not match the device's control lines");
  }
  FluxVector out;
  out.values = device.true_control_matrix() * currents.values + device.flux_offsets();
  out.labels = device.loop_labels();
  return out;
}

CurrentVector zero_currents(const DeviceTruth &device) {
  return make_currents(device, Eigen::VectorXd::Zero(device.n_lines()));
}

CurrentVector make_currents(const DeviceTruth &device, const Eigen::VectorXd &values) {
  CurrentVector c;
  c.values = values;
  c.labels = device.line_labels();
  check_labels(c, device.n_lines(), "current");
  return c;
}

Coherence effective_coherence(const DeviceTruth &device, size_t qubit, double ip_operating_na) {
  if (qubit >= device.qubits().size()) {
    throw ValidationError("bad_index", fmt::format("qubit index {} out of range", qubit));
  }
  return effective_coherence(device.qubits()[qubit], ip_operating_na);
}

// ---------------------------------------------------------------------------
// JSON config

namespace {

using nlohmann::json;

json to_json(const QubitParams &q) {
  return json{{"persistent_current_na", q.persistent_current_na},
              {"x_junction_critical_current_na", q.x_junction_critical_current_na},
              {"z_junction_critical_current_na", q.z_junction_critical_current_na},
              {"shunt_capacitance_ff", q.shunt_capacitance_ff},
              {"base_t1_us", q.base_t1_us},
              {"base_tphi_ns", q.base_tphi_ns},
              {"ref_ip_na", q.ref_ip_na},
              {"f01_ghz", q.f01_ghz}};
}

json to_json(const ResonatorParams &r) {
  return json{{"f_down_ghz", r.f_down_ghz},
              {"state_shift_mhz", r.state_shift_mhz},
              {"loaded_q", r.loaded_q},
              {"depth", r.depth},
              {"qubit_flux_signal_mphi0", r.qubit_flux_signal_mphi0},
              {"mutual_to_squid_ph", r.mutual_to_squid_ph},
              {"coupler_engaged", r.coupler_engaged},
              {"coupler_penalty_factor", r.coupler_penalty_factor},
              {"nominal_q", r.nominal_q}};
}

template <class T>
void read_field(const json &j, const char *key, T &out) {
  if (j.contains(key)) {
    try {
      out = j.at(key).get<T>();
    } catch (const json::exception &e) {
      throw ValidationError("bad_config", fmt::format("config key '{}': {}", key, e.what()));
    }
  }
}

QubitParams qubit_from_json(const json &j) {
  QubitParams q;
  read_field(j, "persistent_current_na", q.persistent_current_na);
  read_field(j, "x_junction_critical_current_na", q.x_junction_critical_current_na);
  read_field(j, "z_junction_critical_current_na", q.z_junction_critical_current_na);
  read_field(j, "shunt_capacitance_ff", q.shunt_capacitance_ff);
  read_field(j, "base_t1_us", q.base_t1_us);
  read_field(j, "base_tphi_ns", q.base_tphi_ns);
  read_field(j, "ref_ip_na", q.ref_ip_na);
  read_field(j, "f01_ghz", q.f01_ghz);
  return q;
}

ResonatorParams resonator_from_json(const json &j) {
  ResonatorParams r;
  read_field(j, "f_down_ghz", r.f_down_ghz);
  read_field(j, "state_shift_mhz", r.state_shift_mhz);
  read_field(j, "loaded_q", r.loaded_q);
  read_field(j, "depth", r.depth);
  read_field(j, "qubit_flux_signal_mphi0", r.qubit_flux_signal_mphi0);
  read_field(j, "mutual_to_squid_ph", r.mutual_to_squid_ph);
  read_field(j, "coupler_engaged", r.coupler_engaged);
  read_field(j, "coupler_penalty_factor", r.coupler_penalty_factor);
  read_field(j, "nominal_q", r.nominal_q);
  return r;
}

}  // namespace

std::string device_config_to_json(const DeviceConfig &config) {
  json j;
  j["qubits"] = json::array();
  for (const auto &q : config.qubits) {
    j["qubits"].push_back(to_json(q));
  }
  j["resonators"] = json::array();
  for (const auto &r : config.resonators) {
    j["resonators"].push_back(to_json(r));
  }
  j["designed_mutuals"] = config.designed_mutuals;
  j["crosstalk_fraction"] = config.crosstalk_fraction;
  j["neighbor_crosstalk_fraction"] = config.neighbor_crosstalk_fraction;
  j["offsets_enabled"] = config.offsets_enabled;
  j["seed"] = config.seed;
  j["noise"] = json{{"bump_width_phi0", config.noise.bump_width_phi0},
                    {"pull_linewidths", config.noise.pull_linewidths},
                    {"noise_sigma", config.noise.noise_sigma}};
  return j.dump(2) + "\n";
}

DeviceConfig device_config_from_json(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ValidationError("bad_config", std::string("device config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) {
    throw ValidationError("bad_config", "device config must be a JSON object");
  }
  DeviceConfig c;
  if (j.contains("qubits")) {
    c.qubits.clear();
    for (const auto &q : j.at("qubits")) {
      c.qubits.push_back(qubit_from_json(q));
    }
  }
  if (j.contains("resonators")) {
    for (const auto &r : j.at("resonators")) {
      c.resonators.push_back(resonator_from_json(r));
    }
  }
  read_field(j, "designed_mutuals", c.designed_mutuals);
  read_field(j, "crosstalk_fraction", c.crosstalk_fraction);
  read_field(j, "neighbor_crosstalk_fraction", c.neighbor_crosstalk_fraction);
  read_field(j, "offsets_enabled", c.offsets_enabled);
  read_field(j, "seed", c.seed);
  if (j.contains("noise")) {
    const auto &n = j.at("noise");
    read_field(n, "bump_width_phi0", c.noise.bump_width_phi0);
    read_field(n, "pull_linewidths", c.noise.pull_linewidths);
    read_field(n, "noise_sigma", c.noise.noise_sigma);
  }
  c.validate();
  return c;
}

void save_device_config(const std::filesystem::path &path, const DeviceConfig &config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ValidationError("io_error", "cannot write " + path.string());
  }
  out << device_config_to_json(config);
}

DeviceConfig load_device_config(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("io_error", "cannot read " + path.string());
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return device_config_from_json(ss.str());
}

}  // namespace fluxqa
