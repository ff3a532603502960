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


#include "fluxqa/xtalk/scan.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "fluxqa/error.h"
#include "fluxqa/xtalk/test_support.h"

namespace fluxqa::xtalk {
namespace {

using testing::planted_centers;
using testing::planted_device;

DeviceTruth sheared() {
  Eigen::Matrix2d m;
  m << 0.5, 0.15, 0.025, 0.5;
  return planted_device(m, Eigen::Vector2d(0.13, -0.21), Eigen::Vector2d(0.35, 0.6));
}

FluxVector flux(double a, double b) {
  FluxVector f;
  f.values = Eigen::Vector2d(a, b);
  return f;
}

TEST(Transmission, PeriodicInEachLoop) {
  auto d = sheared();
  double probe = default_probe_ghz(d, 0);
  for (double a : {0.0, 0.2, 0.77}) {
    for (double b : {-0.3, 0.45}) {
      double v = transmission_model(d, flux(a, b), probe);
      EXPECT_NEAR(transmission_model(d, flux(a + 1, b), probe), v, 1e-12);
      EXPECT_NEAR(transmission_model(d, flux(a, b - 1), probe), v, 1e-12);
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Transmission, ExtremumSitsAtPatternOffset) {
  auto d = sheared();
  double probe = default_probe_ghz(d, 0);
  const auto &pat = d.pattern_fractional_offset();
  // Dense-grid search over one unit cell.
  double best = 2;
  Eigen::Vector2d arg;
  const int n = 400;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double a = static_cast<double>(i) / n, b = static_cast<double>(j) / n;
      double v = transmission_model(d, flux(a, b), probe);
      if (v < best) {
        best = v;
        arg = {a, b};
      }
    }
  }
  EXPECT_NEAR(arg(0), pat(0), 1.0 / n);
  EXPECT_NEAR(arg(1), pat(1), 1.0 / n);
  EXPECT_LE(transmission_model(d, flux(pat(0), pat(1)), probe), best + 1e-15);
}

TEST(Scan, ValuesBoundedAndShaped) {
  auto d = build_device(DeviceConfig{});
  ScanRequest r;
  r.axis_x.n_points = 21;
  r.axis_y.n_points = 17;
  auto scan = scan_transmission(d, r);
  EXPECT_EQ(scan.values.rows(), 17);
  EXPECT_EQ(scan.values.cols(), 21);
  EXPECT_GE(scan.values.minCoeff(), 0.0);
  EXPECT_LE(scan.values.maxCoeff(), 1.0);
  EXPECT_FALSE(scan.corrected);
  EXPECT_TRUE(scan.warning.empty());
}

TEST(Scan, NoiselessScanMatchesModelAtEveryPoint) {
  auto d = sheared();
  ScanRequest r;
  r.axis_x.n_points = 12;
  r.axis_y.n_points = 9;
  r.noise_sigma = 0.0;
  auto scan = scan_transmission(d, r);
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j < 12; ++j) {
      // Nominal coordinate u drives line k with current u_k / m_kk.
      Eigen::Vector2d u(r.axis_x.at(j), r.axis_y.at(i));
      Eigen::Vector2d cur(u(0) / 0.5, u(1) / 0.5);
      Eigen::Vector2d phi = d.true_control_matrix() * cur + d.flux_offsets();
      EXPECT_NEAR(scan.values(i, j), transmission_model(d, flux(phi(0), phi(1)), scan.probe_ghz), 1e-14);
    }
  }
}

TEST(Scan, DeterministicInSeed) {
  auto d = build_device(DeviceConfig{});
  ScanRequest r;
  r.axis_x.n_points = 16;
  r.axis_y.n_points = 16;
  r.seed = 4;
  auto a = scan_transmission(d, r);
  auto b = scan_transmission(d, r);
  EXPECT_EQ(a.values, b.values);
  r.seed = 5;
  EXPECT_NE(scan_transmission(d, r).values, a.values);
}

TEST(Scan, FeatureMinimaAtPlantedCenters) {
  auto d = sheared();
  ScanRequest r;
  r.noise_sigma = 0.0;
  auto scan = scan_transmission(d, r);
  auto centers = planted_centers(d, 0.0, 2.5);
  ASSERT_GE(centers.size(), 4u);
  for (const auto &c : centers) {
    auto px = scan.pixel(c);
    int col = static_cast<int>(std::lround(px(0)));
    int row = static_cast<int>(std::lround(px(1)));
    if (col < 1 || row < 1 || col > 99 || row > 99) continue;
    // Pixel nearest to the planted center is a local minimum of the clean map.
    double v = scan.values(row, col);
    EXPECT_LE(v, scan.values(row, col + 1) + 0.02);
    EXPECT_LE(v, scan.values(row + 1, col) + 0.02);
    EXPECT_LT(v, 0.9);
  }
}

TEST(Scan, ProbeOutsideBandWarnsAndIsFlat) {
  auto d = build_device(DeviceConfig{});
  ScanRequest r;
  r.axis_x.n_points = 10;
  r.axis_y.n_points = 10;
  r.probe_ghz = 7.5;
  r.noise_sigma = 0.0;
  auto scan = scan_transmission(d, r);
  EXPECT_FALSE(scan.warning.empty());
  EXPECT_GT(scan.values.minCoeff(), 0.99);
}

TEST(Scan, RejectsBadRequests) {
  auto d = build_device(DeviceConfig{});
  ScanRequest r;
  r.axis_x.label = "q9";
  EXPECT_THROW(scan_transmission(d, r), ValidationError);
  r = ScanRequest{};
  r.axis_x.n_points = 4;
  EXPECT_THROW(scan_transmission(d, r), ValidationError);
  r = ScanRequest{};
  r.axis_y.label = "x0";
  EXPECT_THROW(scan_transmission(d, r), ValidationError);
  r = ScanRequest{};
  r.axis_x.stop = -1;
  EXPECT_THROW(scan_transmission(d, r), ValidationError);
}

TEST(Scan, TextRoundTripIsByteStable) {
  auto d = build_device(DeviceConfig{});
  ScanRequest r;
  r.axis_x.n_points = 11;
  r.axis_y.n_points = 13;
  r.seed = 2;
  auto scan = scan_transmission(d, r);
  std::stringstream a, b;
  io::write_text_matrix(a, scan_to_text_matrix(scan));
  auto back = scan_from_text_matrix(io::read_text_matrix(a));
  io::write_text_matrix(b, scan_to_text_matrix(back));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(back.values, scan.values);
  EXPECT_EQ(back.axis_x.label, "x0");
  EXPECT_DOUBLE_EQ(back.acquisition.total_time_s, scan.acquisition.total_time_s);

  auto path = std::filesystem::temp_directory_path() / "fluxqa_scan_test.txt";
  save_scan(path, scan);
  EXPECT_EQ(load_scan(path).values, scan.values);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace fluxqa::xtalk
