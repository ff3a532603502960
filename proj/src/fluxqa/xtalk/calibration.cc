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

#include "fluxqa/xtalk/calibration.h"

#include <cmath>
#include <numbers>

#include "fluxqa/error.h"

namespace fluxqa::xtalk {

namespace {

struct LinePair {
  Eigen::Index line[2];
  // u ↦ Φ_sub = G·u + p for the lines' own loops.
  Eigen::Matrix2d G;
  Eigen::Vector2d p;
  Eigen::Vector2d pattern;
};

LinePair line_pair(const DeviceTruth &device, const std::array<std::string, 2> &lines) {
  LinePair lp;
  lp.line[0] = device.line_index(lines[0]);
  lp.line[1] = device.line_index(lines[1]);
  if (lp.line[0] == lp.line[1]) {
    throw ValidationError("bad_grid", "calibration needs two different control lines");
  }
  const auto &m = device.true_control_matrix();
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      lp.G(r, c) = m(lp.line[r], lp.line[c]) / m(lp.line[c], lp.line[c]);
    }
    lp.p(r) = device.flux_offsets()(lp.line[r]);
    lp.pattern(r) = device.pattern_fractional_offset()(lp.line[r]);
  }
  return lp;
}

}  // namespace

double residual_offdiag_fraction(const Eigen::Matrix2d &basis) {
  return std::max(std::abs(basis(1, 0) / basis(0, 0)), std::abs(basis(0, 1) / basis(1, 1)));
}

Eigen::Vector2d axis_angle_errors_deg(const Eigen::Matrix2d &basis) {
  Eigen::Vector2d out;
  for (int j = 0; j < 2; ++j) {
    Eigen::Vector2d a = basis.col(j);
    double along = a(j);
    double across = a(1 - j);
    out(j) = std::atan2(std::abs(across), along) * 180.0 / std::numbers::pi;
  }
  return out;
}

AffineCorrection analytic_correction(const DeviceTruth &device, const std::array<std::string, 2> &lines) {
  auto lp = line_pair(device, lines);
  Eigen::Matrix2d g_inv = lp.G.inverse();
  return AffineCorrection::from_basis(lines, g_inv, g_inv * (lp.pattern - lp.p));
}

Eigen::Matrix2d effective_control_matrix(const DeviceTruth &device, const AffineCorrection &correction) {
  return line_pair(device, correction.lines).G * correction.T;
}

std::vector<Eigen::Vector2d> true_centers(const DeviceTruth &device, const ScanGrid2D &scan) {
  std::array<std::string, 2> lines{scan.axis_x.label, scan.axis_y.label};
  auto lp = line_pair(device, lines);
  // Centers in scan coordinates w satisfy Φ(w) = pattern + k for integer k.
  Eigen::Matrix2d lin = lp.G;
  Eigen::Vector2d shift = lp.p;
  if (scan.correction) {
    shift = lp.G * scan.correction->offset + lp.p;
    lin = lp.G * scan.correction->T;
  }
  Eigen::Matrix2d lin_inv = lin.inverse();
  const double x0 = scan.axis_x.start, x1 = scan.axis_x.stop;
  const double y0 = scan.axis_y.start, y1 = scan.axis_y.stop;
  // Range of k from the window corners.
  Eigen::Vector2d lo = Eigen::Vector2d::Constant(1e300);
  Eigen::Vector2d hi = Eigen::Vector2d::Constant(-1e300);
  for (double x : {x0, x1}) {
    for (double y : {y0, y1}) {
      Eigen::Vector2d k = lin * Eigen::Vector2d(x, y) + shift - lp.pattern;
      lo = lo.cwiseMin(k);
      hi = hi.cwiseMax(k);
    }
  }
  std::vector<Eigen::Vector2d> out;
  for (int a = static_cast<int>(std::floor(lo(0))) - 1; a <= static_cast<int>(std::ceil(hi(0))) + 1; ++a) {
    for (int b = static_cast<int>(std::floor(lo(1))) - 1; b <= static_cast<int>(std::ceil(hi(1))) + 1; ++b) {
      Eigen::Vector2d w = lin_inv * (lp.pattern + Eigen::Vector2d(a, b) - shift);
      if (w(0) >= x0 && w(0) <= x1 && w(1) >= y0 && w(1) <= y1) {
        out.push_back(w);
      }
    }
  }
  return out;
}

CalibrationResult calibrate_auto(const DeviceTruth &device, const ScanRequest &request,
                                 const DetectionOptions &options) {
  CalibrationResult out;
  out.scan = scan_transmission(device, request);
  out.fit = auto_fit(out.scan, options);
  out.correction = request.correction ? request.correction->compose(out.fit.fit.correction) : out.fit.fit.correction;
  return out;
}

OrthogonalityReport verify_orthogonality(const DeviceTruth &device, const AffineCorrection &correction,
                                         const ScanRequest &request, const DetectionOptions &options) {
  ScanRequest rescan = request;
  rescan.axis_x.label = correction.lines[0];
  rescan.axis_y.label = correction.lines[1];
  rescan.correction = correction;
  auto scan = scan_transmission(device, rescan);
  auto fit = auto_fit(scan, options);

  OrthogonalityReport report;
  report.refit = fit.fit.lattice;
  report.axis_angle_errors_deg = axis_angle_errors_deg(report.refit.primitive_vectors);
  report.residual_offdiag_fraction = residual_offdiag_fraction(report.refit.primitive_vectors);
  // Lattice basis in corrected coordinates is the inverse of the effective control matrix.
  report.model_offdiag_fraction = residual_offdiag_fraction(effective_control_matrix(device, correction).inverse());
  return report;
}

std::vector<CalibrationResult> calibrate_all_qubits(const DeviceTruth &device, const ScanRequest &request,
                                                    const DetectionOptions &options) {
  std::vector<CalibrationResult> out;
  for (size_t q = 0; q < device.qubits().size(); ++q) {
    ScanRequest r = request;
    r.axis_x.label = line_label(q, false);
    r.axis_y.label = line_label(q, true);
    r.correction.reset();
    out.push_back(calibrate_auto(device, r, options));
  }
  return out;
}

}  // namespace fluxqa::xtalk
