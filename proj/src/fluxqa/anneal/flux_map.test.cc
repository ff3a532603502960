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


#include "fluxqa/anneal/flux_map.h"

#include <gtest/gtest.h>

#include <filesystem>

#include "fluxqa/error.h"

namespace fluxqa::anneal {
namespace {

TEST(FluxMap, InterpolatesNodes) {
  FluxMap m;
  EXPECT_NO_THROW(m.validate());
  for (size_t i = 0; i < m.phi_x_mphi0.size(); ++i) {
    EXPECT_DOUBLE_EQ(m.a_at(m.phi_x_mphi0[i]), m.a_ghz[i]);
  }
  EXPECT_DOUBLE_EQ(m.a_at(585.0), 4.6);
  EXPECT_DOUBLE_EQ(m.a_at(0.0), 5.0);
  EXPECT_DOUBLE_EQ(m.a_at(2000.0), 0.0);
}

TEST(FluxMap, InverseRoundTrip) {
  FluxMap m;
  for (double a : {5.0, 4.5, 3.0, 0.7, 0.0}) {
    EXPECT_NEAR(m.a_at(m.phi_x_for(a)), a, 1e-12);
  }
  EXPECT_THROW(m.phi_x_for(6.0), ValidationError);
}

TEST(FluxMap, FieldsAreScaledAndClamped) {
  FluxMap m;
  m.h_scale_mphi0 = 2.0;
  AnnealControlPoint pt{700, {1.0, -3.0, 10.0}};
  auto h = m.fields(pt);
  EXPECT_EQ(h, (std::vector<double>{0.5, -1.5, 2.0}));
  EXPECT_DOUBLE_EQ(m.phi_z_for(-0.75), -1.5);
  EXPECT_THROW(m.phi_z_for(2.5), ValidationError);
}

TEST(FluxMap, ValidationRejectsNonMonotone) {
  FluxMap m;
  m.a_ghz = {5, 5, 1, 0};
  EXPECT_THROW(m.validate(), ValidationError);
  m = FluxMap{};
  m.phi_x_mphi0 = {500, 400, 800, 1000};
  EXPECT_THROW(m.validate(), ValidationError);
  m = FluxMap{};
  m.h_scale_mphi0 = 0;
  EXPECT_THROW(m.validate(), ValidationError);
}

TEST(FluxMap, TrajectoryFollowsSchedule) {
  FluxMap m;
  auto sched = AnnealSchedule::linear(100);
  auto traj = phi_x_trajectory(m, sched, 11);
  ASSERT_EQ(traj.size(), 11u);
  for (size_t i = 0; i < traj.size(); ++i) {
    EXPECT_NEAR(m.a_at(traj[i]), sched.A(i / 10.0), 1e-12);
    if (i > 0) EXPECT_GT(traj[i], traj[i - 1]);
  }
  EXPECT_THROW(phi_x_trajectory(m, sched, 1), ValidationError);
}

TEST(FluxMap, FileRoundTrip) {
  FluxMap m;
  m.h_scale_mphi0 = 1.7;
  auto path = std::filesystem::temp_directory_path() / "fluxqa_flux_map_test.txt";
  save_flux_map(path, m);
  auto back = load_flux_map(path);
  EXPECT_EQ(back.phi_x_mphi0, m.phi_x_mphi0);
  EXPECT_EQ(back.a_ghz, m.a_ghz);
  EXPECT_DOUBLE_EQ(back.h_scale_mphi0, 1.7);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace fluxqa::anneal
