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

#include <gtest/gtest.h>

#include <filesystem>

#include "fluxqa/error.h"
#include "oracles.h"

namespace fluxqa {
namespace {

DeviceConfig two_qubit_config(uint64_t seed) {
  DeviceConfig c;
  c.qubits = {QubitParams{}, QubitParams{}};
  c.neighbor_crosstalk_fraction = 0.1;
  c.seed = seed;
  return c;
}

TEST(Device, ZeroCurrentGivesOffsets) {
  auto d = build_device(DeviceConfig{});
  auto flux = true_flux(d, zero_currents(d));
  EXPECT_EQ(flux.values, d.flux_offsets());
  EXPECT_EQ(flux.labels, d.loop_labels());

  DeviceConfig no_offsets;
  no_offsets.offsets_enabled = false;
  auto d0 = build_device(no_offsets);
  EXPECT_EQ(true_flux(d0, zero_currents(d0)).values.norm(), 0.0);
}

TEST(Device, IdentityControlMatrix) {
  DeviceConfig c;
  auto d = make_device_truth(c, Eigen::Matrix2d::Identity(), Eigen::Vector2d(0.1, -0.2), Eigen::Vector2d(0.3, 0.4));
  auto flux = true_flux(d, make_currents(d, Eigen::Vector2d(1, 2)));
  EXPECT_DOUBLE_EQ(flux.values(0), 1.1);
  EXPECT_DOUBLE_EQ(flux.values(1), 1.8);
}

TEST(Device, MatchesBruteForceMatvec) {
  auto d = build_device(two_qubit_config(11));
  Eigen::VectorXd i(4);
  i << 0.3, -1.2, 2.5, 0.7;
  oracle::Real m(4, std::vector<double>(4));
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m[r][c] = d.true_control_matrix()(r, c);
  auto expect = oracle::matvec(m, {0.3, -1.2, 2.5, 0.7});
  auto flux = true_flux(d, make_currents(d, i));
  for (int r = 0; r < 4; ++r) {
    EXPECT_NEAR(flux.values(r), expect[static_cast<size_t>(r)] + d.flux_offsets()(r), 1e-14);
  }
}

TEST(Device, FluxIsLinearInCurrents) {
  auto d = build_device(two_qubit_config(5));
  Eigen::VectorXd i1 = Eigen::VectorXd::LinSpaced(4, -1, 2);
  Eigen::VectorXd i2 = Eigen::VectorXd::LinSpaced(4, 3, 0.5);
  double a = 0.7, b = -1.9;
  auto f = [&](const Eigen::VectorXd &i) -> Eigen::VectorXd {
    return true_flux(d, make_currents(d, i)).values - d.flux_offsets();
  };
  EXPECT_LT((f(a * i1 + b * i2) - (a * f(i1) + b * f(i2))).norm(), 1e-13);
}

TEST(Device, CrosstalkWithinConfiguredBounds) {
  auto c = two_qubit_config(3);
  auto d = build_device(c);
  const auto &m = d.true_control_matrix();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i == j) {
        EXPECT_DOUBLE_EQ(m(i, j), 0.5);
        continue;
      }
      double bound = (i / 2 == j / 2) ? c.crosstalk_fraction : c.neighbor_crosstalk_fraction;
      EXPECT_LE(std::abs(m(i, j)), bound * 0.5 + 1e-15);
    }
  }
}

TEST(Device, DeterministicInSeed) {
  auto a = build_device(two_qubit_config(9));
  auto b = build_device(two_qubit_config(9));
  auto c = build_device(two_qubit_config(10));
  EXPECT_EQ(a.true_control_matrix(), b.true_control_matrix());
  EXPECT_EQ(a.flux_offsets(), b.flux_offsets());
  EXPECT_EQ(a.pattern_fractional_offset(), b.pattern_fractional_offset());
  EXPECT_NE(a.true_control_matrix(), c.true_control_matrix());
}

TEST(Device, CoherenceUnchangedAtReference) {
  QubitParams q;
  auto c = effective_coherence(q, q.ref_ip_na);
  EXPECT_DOUBLE_EQ(c.t1_us, q.base_t1_us);
  EXPECT_DOUBLE_EQ(c.tphi_ns, q.base_tphi_ns);
}

TEST(Device, CoherenceScalingLaws) {
  QubitParams q;
  for (double k : {2.0, 3.0, 10.0, 0.5}) {
    auto base = effective_coherence(q, 80.0);
    auto scaled = effective_coherence(q, 80.0 * k);
    EXPECT_NEAR(base.t1_us / scaled.t1_us, k * k, 1e-12 * k * k);
    EXPECT_NEAR(base.tphi_ns / scaled.tphi_ns, k, 1e-12 * k);
  }
  auto doubled = effective_coherence(q, 2 * q.ref_ip_na);
  EXPECT_DOUBLE_EQ(doubled.t1_us, q.base_t1_us / 4);
  EXPECT_DOUBLE_EQ(doubled.tphi_ns, q.base_tphi_ns / 2);
}

TEST(Device, HalfCurrentQuadruplesT1) {
  QubitParams q;
  EXPECT_NEAR(effective_coherence(q, 50.0).t1_us, 14.0, 1e-12);
}

TEST(Device, RejectsInvalidInput) {
  QubitParams q;
  EXPECT_THROW(effective_coherence(q, 0.0), ValidationError);
  EXPECT_THROW(effective_coherence(q, -1.0), ValidationError);
  auto d = build_device(DeviceConfig{});
  EXPECT_THROW(effective_coherence(d, 3, 100.0), ValidationError);
  EXPECT_THROW(d.line_index("nope"), ValidationError);
  EXPECT_THROW(make_currents(d, Eigen::VectorXd::Zero(3)), ValidationError);
  DeviceConfig bad;
  bad.crosstalk_fraction = 0.9;
  EXPECT_THROW(build_device(bad), ValidationError);
  EXPECT_THROW(make_device_truth(DeviceConfig{}, Eigen::Matrix2d::Zero(), Eigen::Vector2d::Zero(),
                                 Eigen::Vector2d::Zero()),
               ValidationError);
}

TEST(Device, ConfigJsonRoundTrip) {
  auto c = two_qubit_config(77);
  c.resonators.clear();
  auto back = device_config_from_json(device_config_to_json(c));
  EXPECT_EQ(build_device(back).true_control_matrix(), build_device(c).true_control_matrix());
  EXPECT_EQ(back.seed, 77u);
  auto path = std::filesystem::temp_directory_path() / "fluxqa_device_test.json";
  save_device_config(path, c);
  EXPECT_EQ(load_device_config(path).seed, 77u);
  std::filesystem::remove(path);
  EXPECT_THROW(device_config_from_json("{not json"), ValidationError);
}

TEST(Device, LabelsFollowQubitOrder) {
  auto d = build_device(two_qubit_config(1));
  EXPECT_EQ(d.line_labels(), (std::vector<std::string>{line_label(0, false), line_label(0, true),
                                                       line_label(1, false), line_label(1, true)}));
  EXPECT_EQ(d.line_index(line_label(1, true)), 3);
}

}  // namespace
}  // namespace fluxqa
