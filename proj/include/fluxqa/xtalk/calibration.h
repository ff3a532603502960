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

#ifndef FLUXQA_XTALK_CALIBRATION_H
#define FLUXQA_XTALK_CALIBRATION_H

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fluxqa/device/device.h"
#include "fluxqa/xtalk/affine.h"
#include "fluxqa/xtalk/lattice.h"
#include "fluxqa/xtalk/scan.h"

namespace fluxqa::xtalk {

/// max over columns j and rows i ≠ j of |A_ij| / |A_jj|.
double residual_offdiag_fraction(const Eigen::Matrix2d &basis);

/// Angle in degrees between each basis column and its coordinate axis.
Eigen::Vector2d axis_angle_errors_deg(const Eigen::Matrix2d &basis);

/// The exact correction for two lines, computed from the hidden truth.
/// Lines must belong to one qubit's loops in the same order (x_q, z_q).
AffineCorrection analytic_correction(const DeviceTruth &device, const std::array<std::string, 2> &lines);

/// Map from corrected coordinates to the two loop fluxes, u ↦ Φ, restricted to
/// the lines' own loops: Φ = G·(T·v + offset) + p. Its linear part is the
/// effective control matrix seen through the correction.
Eigen::Matrix2d effective_control_matrix(const DeviceTruth &device, const AffineCorrection &correction);

/// Analytic feature centers (scan coordinates) inside the scan window.
std::vector<Eigen::Vector2d> true_centers(const DeviceTruth &device, const ScanGrid2D &scan);

struct CalibrationResult {
  ScanGrid2D scan;
  AutoFitResult fit;
  /// Fitted correction composed with any correction the scan was taken through.
  AffineCorrection correction;
};

/// Scans through `request` (honouring request.correction), fits the lattice
/// and returns the refined correction.
CalibrationResult calibrate_auto(const DeviceTruth &device, const ScanRequest &request,
                                 const DetectionOptions &options = {});

struct OrthogonalityReport {
  Eigen::Vector2d axis_angle_errors_deg = Eigen::Vector2d::Zero();
  double residual_offdiag_fraction = 0;
  /// Lattice re-fitted on the corrected rescan.
  LatticeFit refit;
  /// Off-diagonal fraction of the effective control matrix computed from the
  /// hidden truth. Diagnostic only; not observable on hardware.
  double model_offdiag_fraction = 0;
};

/// Rescans with the correction applied, re-detects, re-fits and reports how
/// far the refitted lattice is from the coordinate axes. `request` supplies the
/// grid, acquisition and seed; its lines and correction are replaced.
OrthogonalityReport verify_orthogonality(const DeviceTruth &device, const AffineCorrection &correction,
                                         const ScanRequest &request = {}, const DetectionOptions &options = {});

/// Pairwise per-qubit calibration over (x_q, z_q). The corrections together
/// form a block-diagonal correction of the whole device.
std::vector<CalibrationResult> calibrate_all_qubits(const DeviceTruth &device, const ScanRequest &request = {},
                                                    const DetectionOptions &options = {});

}  // namespace fluxqa::xtalk

#endif  // FLUXQA_XTALK_CALIBRATION_H
