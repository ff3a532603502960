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


#include "fluxqa/xtalk/acquisition.h"

#include <gtest/gtest.h>

#include "fluxqa/error.h"

namespace fluxqa::xtalk {
namespace {

TEST(Acquisition, RasterFormulaIsExact) {
  AcquisitionParams p = AcquisitionParams::raster_defaults();
  p.settle_ms = 3.0;
  p.dwell_us = 4.0;
  p.n_averages = 5;
  auto r = simulate_acquisition_time(20, 30, p);
  EXPECT_DOUBLE_EQ(r.total_time_s, 600 * (3e-3 + 5 * 4e-6));
  EXPECT_EQ(r.mode, AcquisitionMode::kRaster);
  EXPECT_EQ(r.n_points_x, 20);
  EXPECT_EQ(r.n_points_y, 30);
}

TEST(Acquisition, DefaultRasterGridTakesAboutThreeHours) {
  auto r = simulate_acquisition_time(101, 101, AcquisitionParams::raster_defaults());
  double hours = r.total_time_s / 3600.0;
  EXPECT_GT(hours, 3.0 * 0.8);
  EXPECT_LT(hours, 3.0 * 1.2);
}

TEST(Acquisition, SawtoothFormulaIsExact) {
  AcquisitionParams p = AcquisitionParams::sawtooth_defaults();
  auto r = simulate_acquisition_time(101, 101, p, 2);
  EXPECT_DOUBLE_EQ(r.total_time_s, 2 * (1000 / 500.0 + 1.0));
  EXPECT_GT(r.total_time_s, 1.0);
  EXPECT_LT(r.total_time_s, 100.0);
}

TEST(Acquisition, SpeedupExceedsThousand) {
  auto slow = simulate_acquisition_time(101, 101, AcquisitionParams::raster_defaults());
  for (double ramp : {100.0, 500.0, 1000.0}) {
    for (double dwell : {1.0, 2.0}) {
      auto p = AcquisitionParams::sawtooth_defaults();
      p.ramp_frequency_hz = ramp;
      p.dwell_us = dwell;
      auto fast = simulate_acquisition_time(101, 101, p);
      if (ramp == 500.0 && dwell == 2.0) {
        EXPECT_GE(speedup(slow, fast), 1000.0);
      }
      EXPECT_GT(speedup(slow, fast), 1.0);
    }
  }
}

TEST(Acquisition, RejectsBadParameters) {
  auto p = AcquisitionParams::raster_defaults();
  EXPECT_THROW(simulate_acquisition_time(0, 10, p), ValidationError);
  p.dwell_us = 0;
  EXPECT_THROW(simulate_acquisition_time(10, 10, p), ValidationError);
  auto s = AcquisitionParams::sawtooth_defaults();
  s.ramp_frequency_hz = -1;
  EXPECT_THROW(simulate_acquisition_time(10, 10, s), ValidationError);
  s = AcquisitionParams::sawtooth_defaults();
  s.ramp_frequency_hz = 1000;
  s.dwell_us = 5;
  EXPECT_THROW(simulate_acquisition_time(1000, 10, s), ValidationError);
  EXPECT_THROW(acquisition_mode_from_string("spiral"), ValidationError);
  EXPECT_EQ(acquisition_mode_from_string(to_string(AcquisitionMode::kSawtooth)), AcquisitionMode::kSawtooth);
}

}  // namespace
}  // namespace fluxqa::xtalk
