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

#ifndef FLUXQA_XTALK_SCAN_H
#define FLUXQA_XTALK_SCAN_H

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "fluxqa/device/device.h"
#include "fluxqa/io/text_matrix.h"
#include "fluxqa/xtalk/acquisition.h"
#include "fluxqa/xtalk/affine.h"

namespace fluxqa::xtalk {

/// One scan axis: a control line label and a coordinate range (Φ0, nominal or
/// corrected depending on the scan).
struct ScanAxis {
  std::string label;
  double start = 0.0;
  double stop = 2.5;
  int n_points = 101;

  double step() const { return (stop - start) / (n_points - 1); }
  double at(int index) const { return start + step() * index; }
  void validate() const;
};

struct ScanRequest {
  ScanAxis axis_x{"x0"};
  ScanAxis axis_y{"z0"};
  /// Defaults to the feature resonance, f_down + pull·κ.
  std::optional<double> probe_ghz;
  AcquisitionParams acquisition;
  /// When set, grid coordinates are corrected coordinates mapped to nominal
  /// setpoints through the correction before driving the device.
  std::optional<AffineCorrection> correction;
  /// Defaults to the device's scan noise.
  std::optional<double> noise_sigma;
  uint64_t seed = 0;
};

/// Transmission magnitude map. values(i, j) is taken at (axis_x.at(j), axis_y.at(i)).
struct ScanGrid2D {
  ScanAxis axis_x;
  ScanAxis axis_y;
  Eigen::MatrixXd values;
  AcquisitionReport acquisition;
  bool corrected = false;
  std::optional<AffineCorrection> correction;
  double probe_ghz = 0;
  double noise_sigma = 0;
  uint64_t seed = 0;
  size_t resonator = 0;
  /// Non-empty when the probe sits outside the resonator band (flat map).
  std::string warning;

  Eigen::Vector2d coordinate(double col, double row) const;
  /// Inverse of coordinate(): fractional (col, row) of a point.
  Eigen::Vector2d pixel(const Eigen::Vector2d &point) const;
};

/// Probe frequency at which lattice centers sit on resonance.
double default_probe_ghz(const DeviceTruth &device, size_t resonator);

/// Synthetic periodic response of `resonator` to loop fluxes.
///
/// The resonance is pulled by `pull_linewidths·κ·bump(Φx, Φz)`, where bump is a
/// product of 1-periodic wrapped Gaussians centred on the device's pattern
/// offset in the resonator's qubit loops. The result is passed through the
/// notch lineshape at the probe frequency.
double transmission_model(const DeviceTruth &device, const FluxVector &flux, double probe_ghz,
                          size_t resonator = 0);

/// Loop fluxes produced by setting the two named lines to nominal coordinates
/// `nominal` (Φ0, i.e. current × designed mutual); other lines are at zero.
FluxVector flux_at_nominal(const DeviceTruth &device, const std::array<std::string, 2> &lines,
                           const Eigen::Vector2d &nominal);

/// Throws ValidationError for unknown axes, invalid grids, or a correction
/// for other lines.
ScanGrid2D scan_transmission(const DeviceTruth &device, const ScanRequest &request);

io::TextMatrix scan_to_text_matrix(const ScanGrid2D &scan);
ScanGrid2D scan_from_text_matrix(const io::TextMatrix &matrix);
void save_scan(const std::filesystem::path &path, const ScanGrid2D &scan);
ScanGrid2D load_scan(const std::filesystem::path &path);

}  // namespace fluxqa::xtalk

#endif  // FLUXQA_XTALK_SCAN_H
