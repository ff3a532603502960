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


#ifndef FLUXQA_XTALK_TEST_SUPPORT_H
#define FLUXQA_XTALK_TEST_SUPPORT_H

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "fluxqa/device/device.h"
#include "fluxqa/xtalk/scan.h"

namespace fluxqa::xtalk::testing {

// Nominal coordinates of feature centers for lines (x0, z0), found by solving
// the planted 2x2 flux map directly.
inline std::vector<Eigen::Vector2d> planted_centers(const DeviceTruth &d, double lo, double hi) {
  const Eigen::MatrixXd &m = d.true_control_matrix();
  Eigen::Matrix2d g;
  g << m(0, 0) / m(0, 0), m(0, 1) / m(1, 1), m(1, 0) / m(0, 0), m(1, 1) / m(1, 1);
  Eigen::Vector2d off = d.flux_offsets().head<2>();
  Eigen::Vector2d pat = d.pattern_fractional_offset().head<2>();
  std::vector<Eigen::Vector2d> out;
  for (int a = -10; a <= 10; ++a) {
    for (int b = -10; b <= 10; ++b) {
      Eigen::Vector2d u = g.lu().solve(pat + Eigen::Vector2d(a, b) - off);
      if (u(0) >= lo && u(0) <= hi && u(1) >= lo && u(1) <= hi) out.push_back(u);
    }
  }
  return out;
}

inline DeviceTruth planted_device(const Eigen::Matrix2d &m, Eigen::Vector2d offsets, Eigen::Vector2d pattern) {
  return make_device_truth(DeviceConfig{}, m, offsets, pattern);
}

inline double nearest(const std::vector<Eigen::Vector2d> &points, const Eigen::Vector2d &p) {
  double best = 1e300;
  for (const auto &q : points) best = std::min(best, (q - p).norm());
  return best;
}

}  // namespace fluxqa::xtalk::testing

#endif  // FLUXQA_XTALK_TEST_SUPPORT_H
