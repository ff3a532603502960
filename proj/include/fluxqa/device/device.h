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

#ifndef FLUXQA_DEVICE_DEVICE_H
#define FLUXQA_DEVICE_DEVICE_H

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fluxqa/device/resonator.h"

namespace fluxqa {

/// Effective two-level flux qubit. Junction critical currents and shunt
/// capacitance are carried as metadata only.
struct QubitParams {
  double persistent_current_na = 100.0;
  double x_junction_critical_current_na = 90.0;
  double z_junction_critical_current_na = 186.0;
  double shunt_capacitance_ff = 45.0;
  double base_t1_us = 3.5;
  double base_tphi_ns = 130.0;
  double ref_ip_na = 100.0;
  double f01_ghz = 4.2;

  void validate() const;
  bool operator==(const QubitParams &) const = default;
};

struct Coherence {
  double t1_us = 0;
  double tphi_ns = 0;
};

/// T1 ∝ 1/Ip², Tphi ∝ 1/Ip, anchored at the qubit's reference persistent current.
Coherence effective_coherence(const QubitParams &qubit, double ip_operating_na);

/// Values with unique labels. FluxVector holds loop fluxes (Φ0), CurrentVector
/// holds control-line currents (mA).
template <class Tag>
struct LabeledVector {
  Eigen::VectorXd values;
  std::vector<std::string> labels;

  Eigen::Index size() const { return values.size(); }
};
using FluxVector = LabeledVector<struct FluxTag>;
using CurrentVector = LabeledVector<struct CurrentTag>;

/// Parameters of the synthetic periodic transmission map seen during flux scans.
struct ScanModel {
  /// Width of each wrapped-Gaussian feature, in Φ0.
  double bump_width_phi0 = 0.08;
  /// Peak flux-induced resonance pull, in resonator linewidths.
  double pull_linewidths = 2.0;
  /// Default additive measurement noise on scan transmission.
  double noise_sigma = 0.002;

  bool operator==(const ScanModel &) const = default;
};

/// Declarative description from which a DeviceTruth is generated.
///
/// Each qubit owns an X and a Z loop and one bias line for each; lines and
/// loops are ordered x0, z0, x1, z1, ...
struct DeviceConfig {
  std::vector<QubitParams> qubits = {QubitParams{}};
  /// One per qubit; filled with defaults when empty.
  std::vector<ResonatorParams> resonators;
  /// Designed diagonal mutuals (Φ0/mA), one per line; 0.5 for every line when empty.
  std::vector<double> designed_mutuals;
  /// Bound on off-diagonal entries between the two lines of one qubit, relative to the line's diagonal.
  double crosstalk_fraction = 0.3;
  /// Same bound for lines of adjacent qubits. Must not exceed crosstalk_fraction.
  double neighbor_crosstalk_fraction = 0.0;
  bool offsets_enabled = true;
  uint64_t seed = 1;
  ScanModel noise;

  size_t n_qubits() const { return qubits.size(); }
  size_t n_lines() const { return 2 * qubits.size(); }
  void validate() const;
  bool operator==(const DeviceConfig &) const = default;
};

/// Hidden ground truth of a simulated device. Immutable after construction.
class DeviceTruth {
 public:
  const DeviceConfig &config() const { return config_; }
  /// n_loops × n_lines, Φ0/mA.
  const Eigen::MatrixXd &true_control_matrix() const { return control_matrix_; }
  const Eigen::VectorXd &flux_offsets() const { return flux_offsets_; }
  const Eigen::VectorXd &pattern_fractional_offset() const { return pattern_offset_; }
  const std::vector<QubitParams> &qubits() const { return config_.qubits; }
  const std::vector<ResonatorParams> &resonators() const { return config_.resonators; }
  const std::vector<std::string> &loop_labels() const { return loop_labels_; }
  const std::vector<std::string> &line_labels() const { return line_labels_; }
  uint64_t rng_seed() const { return config_.seed; }

  Eigen::Index n_loops() const { return control_matrix_.rows(); }
  Eigen::Index n_lines() const { return control_matrix_.cols(); }

  /// Throws ValidationError for unknown labels.
  Eigen::Index line_index(const std::string &label) const;
  Eigen::Index loop_index(const std::string &label) const;

  friend DeviceTruth build_device(const DeviceConfig &config);
  friend DeviceTruth make_device_truth(DeviceConfig config, Eigen::MatrixXd control_matrix,
                                       Eigen::VectorXd flux_offsets, Eigen::VectorXd pattern_offset);

 private:
  DeviceTruth() = default;

  DeviceConfig config_;
  Eigen::MatrixXd control_matrix_;
  Eigen::VectorXd flux_offsets_;
  Eigen::VectorXd pattern_offset_;
  std::vector<std::string> loop_labels_;
  std::vector<std::string> line_labels_;
};

/// Deterministic in config.seed. Off-diagonal entries are uniform in
/// ±fraction·diag of their column; offsets uniform in [−0.5, 0.5) Φ0.
DeviceTruth build_device(const DeviceConfig &config);

/// Builds a device with an explicitly planted control matrix, offsets and
/// pattern offset. Used for tests and synthetic round trips.
DeviceTruth make_device_truth(DeviceConfig config, Eigen::MatrixXd control_matrix,
                              Eigen::VectorXd flux_offsets, Eigen::VectorXd pattern_offset);

/// Φ = M·I + offsets.
FluxVector true_flux(const DeviceTruth &device, const CurrentVector &currents);

CurrentVector zero_currents(const DeviceTruth &device);
CurrentVector make_currents(const DeviceTruth &device, const Eigen::VectorXd &values);

Coherence effective_coherence(const DeviceTruth &device, size_t qubit, double ip_operating_na);

std::string line_label(size_t qubit, bool z_line);
std::string loop_label(size_t qubit, bool z_loop);

// Config files are JSON. Every field is written, so load(save(c)) == c.
std::string device_config_to_json(const DeviceConfig &config);
DeviceConfig device_config_from_json(const std::string &text);
void save_device_config(const std::filesystem::path &path, const DeviceConfig &config);
DeviceConfig load_device_config(const std::filesystem::path &path);

}  // namespace fluxqa

#endif  // FLUXQA_DEVICE_DEVICE_H
