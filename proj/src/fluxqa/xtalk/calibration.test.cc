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

#include <gtest/gtest.h>

#include "fluxqa/error.h"
#include "fluxqa/xtalk/test_support.h"

namespace fluxqa::xtalk {
namespace {

using testing::planted_centers;
using testing::planted_device;

const std::array<std::string, 2> kLines{"x0", "z0"};

DeviceConfig thirty_percent(uint64_t seed) {
  DeviceConfig c;
  c.crosstalk_fraction = 0.3;
  c.seed = seed;
  return c;
}

TEST(Calibration, AnalyticCorrectionIsPerfect) {
  auto d = build_device(thirty_percent(7));
  auto c = analytic_correction(d, kLines);
  Eigen::Matrix2d eff = effective_control_matrix(d, c);
  EXPECT_LT((eff - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), 1e-12);
  auto report = verify_orthogonality(d, c);
  EXPECT_LT(report.model_offdiag_fraction, 1e-6);
  EXPECT_LT(report.residual_offdiag_fraction, 0.01);
  EXPECT_LT(report.axis_angle_errors_deg.maxCoeff(), 0.5);
}

TEST(Calibration, AutoPipelineOnThirtyPercentDevice) {
  auto d = build_device(thirty_percent(7));
  auto result = calibrate_auto(d, ScanRequest{});
  EXPECT_GE(result.fit.fit.lattice.n_centers_used, 3);
  EXPECT_LT(result.fit.fit.lattice.residual_rms, 0.02);
  auto report = verify_orthogonality(d, result.correction);
  EXPECT_LT(report.residual_offdiag_fraction, 0.01);
  EXPECT_LT(report.model_offdiag_fraction, 0.01);
}

TEST(Calibration, CorrectedScanCentersOnIntegers) {
  auto d = build_device(thirty_percent(3));
  auto result = calibrate_auto(d, ScanRequest{});
  ScanRequest corrected;
  corrected.correction = result.correction;
  corrected.noise_sigma = 0.0;
  auto scan = scan_transmission(d, corrected);
  auto centers = true_centers(d, scan);
  ASSERT_GE(centers.size(), 4u);
  for (const auto &c : centers) {
    // Relative to one center, every other one sits at integer offsets.
    Eigen::Vector2d rel = c - centers.front();
    EXPECT_NEAR(rel(0), std::round(rel(0)), 0.02);
    EXPECT_NEAR(rel(1), std::round(rel(1)), 0.02);
  }
}

TEST(Calibration, TrueCentersMatchPlantedSolve) {
  auto d = build_device(thirty_percent(12));
  ScanRequest r;
  r.axis_x.n_points = 10;
  r.axis_y.n_points = 10;
  auto scan = scan_transmission(d, r);
  auto ours = true_centers(d, scan);
  auto oracle = planted_centers(d, 0.0, 2.5);
  ASSERT_EQ(ours.size(), oracle.size());
  for (const auto &c : ours) EXPECT_LT(testing::nearest(oracle, c), 1e-12);
}

TEST(Calibration, IdentityCorrectionShowsThirtyPercent) {
  Eigen::Matrix2d m;
  m << 0.5, 0.15, 0.15, 0.5;
  auto d = planted_device(m, Eigen::Vector2d(0.1, 0.2), Eigen::Vector2d(0.5, 0.5));
  auto report = verify_orthogonality(d, AffineCorrection::identity(kLines));
  EXPECT_NEAR(report.residual_offdiag_fraction, 0.3, 0.02);
  EXPECT_NEAR(report.model_offdiag_fraction, 0.3, 1e-12);
}

TEST(Calibration, SecondPassDoesNotDegrade) {
  auto d = build_device(thirty_percent(21));
  auto first = calibrate_auto(d, ScanRequest{});
  ScanRequest again;
  again.correction = first.correction;
  again.seed = 1;
  auto second = calibrate_auto(d, again);
  auto r1 = verify_orthogonality(d, first.correction);
  auto r2 = verify_orthogonality(d, second.correction);
  EXPECT_LE(r2.model_offdiag_fraction, std::max(r1.model_offdiag_fraction, 2e-3));
}

TEST(Calibration, ManualAndAutoAgree) {
  auto d = build_device(thirty_percent(4));
  auto scan = scan_transmission(d, ScanRequest{});
  auto automatic = auto_fit(scan);
  auto manual_centers = planted_centers(d, 0.0, 2.5);
  ASSERT_GE(manual_centers.size(), 6u);
  auto manual = fit_manual_centers(manual_centers, {}, std::nullopt, kLines);
  double tol = 3 * std::max({automatic.fit.lattice.residual_rms, manual.lattice.residual_rms, 1e-4});
  EXPECT_LT((automatic.fit.lattice.primitive_vectors - manual.lattice.primitive_vectors).cwiseAbs().maxCoeff(), tol);
}

TEST(Calibration, RoundTripOverRandomShears) {
  for (uint64_t seed : {31u, 32u, 33u}) {
    DeviceConfig c;
    c.crosstalk_fraction = 0.4;
    c.seed = seed;
    auto d = build_device(c);
    ScanRequest r;
    auto clean = scan_transmission(d, [] {
      ScanRequest q;
      q.noise_sigma = 0.0;
      return q;
    }());
    r.noise_sigma = (clean.values.maxCoeff() - clean.values.minCoeff()) / 10.0;
    auto result = calibrate_auto(d, r);
    auto report = verify_orthogonality(d, result.correction, r);
    EXPECT_LT(report.residual_offdiag_fraction, 0.01) << "seed " << seed;
  }
}

TEST(Calibration, AllQubitsPairwise) {
  DeviceConfig c = thirty_percent(8);
  c.qubits = {QubitParams{}, QubitParams{}};
  c.neighbor_crosstalk_fraction = 0.05;
  auto d = build_device(c);
  auto results = calibrate_all_qubits(d);
  ASSERT_EQ(results.size(), 2u);
  EXPECT_EQ(results[1].correction.lines[0], "x1");
  for (const auto &r : results) {
    EXPECT_LT(verify_orthogonality(d, r.correction).residual_offdiag_fraction, 0.01);
  }
}

TEST(Calibration, OffdiagAndAngleMetrics) {
  Eigen::Matrix2d b;
  b << 2, 0.2, -0.4, 1;
  EXPECT_DOUBLE_EQ(residual_offdiag_fraction(b), 0.2);
  auto angles = axis_angle_errors_deg(Eigen::Matrix2d::Identity());
  EXPECT_EQ(angles, Eigen::Vector2d::Zero());
  Eigen::Matrix2d tilted;
  tilted << 1, 1, 1, 1e9;
  EXPECT_NEAR(axis_angle_errors_deg(tilted)(0), 45.0, 1e-12);
}

}  // namespace
}  // namespace fluxqa::xtalk
