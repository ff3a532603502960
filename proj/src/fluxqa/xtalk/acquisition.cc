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

#include <fmt/format.h>

#include "fluxqa/error.h"

namespace fluxqa::xtalk {

std::string to_string(AcquisitionMode mode) { return mode == AcquisitionMode::kRaster ? "raster" : "sawtooth"; }

AcquisitionMode acquisition_mode_from_string(const std::string &text) {
  if (text == "raster") {
    return AcquisitionMode::kRaster;
  }
  if (text == "sawtooth") {
    return AcquisitionMode::kSawtooth;
  }
  throw ValidationError("bad_mode", "acquisition mode must be 'raster' or 'sawtooth', got '" + text + "'");
}

AcquisitionParams AcquisitionParams::raster_defaults() { return AcquisitionParams{}; }

AcquisitionParams AcquisitionParams::sawtooth_defaults() {
  AcquisitionParams p;
  p.mode = AcquisitionMode::kSawtooth;
  p.dwell_us = 2.0;
  p.ramp_frequency_hz = 500.0;
  p.n_averages = 1000;
  p.frame_overhead_s = 1.0;
  return p;
}

AcquisitionReport simulate_acquisition_time(int n_points_x, int n_points_y, const AcquisitionParams &params,
                                            int n_lines_scanned) {
  if (n_points_x <= 0 || n_points_y <= 0 || n_lines_scanned <= 0) {
    throw ValidationError("bad_acquisition", "grid sizes and line count must be positive");
  }
  if (!(params.dwell_us > 0) || params.n_averages <= 0) {
    throw ValidationError("bad_acquisition", "dwell and averages must be positive");
  }
  AcquisitionReport r;
  r.mode = params.mode;
  r.per_point_dwell_us = params.dwell_us;
  r.n_averages = params.n_averages;
  r.n_points_x = n_points_x;
  r.n_points_y = n_points_y;
  r.n_lines_scanned = n_lines_scanned;

  if (params.mode == AcquisitionMode::kRaster) {
    if (!(params.settle_ms > 0)) {
      throw ValidationError("bad_acquisition", "raster settle time must be positive");
    }
    r.settle_ms = params.settle_ms;
    double per_point_s = params.settle_ms * 1e-3 + params.n_averages * params.dwell_us * 1e-6;
    r.total_time_s = static_cast<double>(n_points_x) * n_points_y * per_point_s;
    return r;
  }

  if (!(params.ramp_frequency_hz > 0) || !(params.frame_overhead_s >= 0)) {
    throw ValidationError("bad_acquisition", "ramp frequency must be positive and overhead nonnegative");
  }
  double ramp_period_us = 1e6 / params.ramp_frequency_hz;
  if (n_points_x * params.dwell_us > ramp_period_us) {
    throw ValidationError("bad_acquisition",
                          fmt::format("{} points x {} us dwell do not fit in one {} Hz ramp", n_points_x,
                                      params.dwell_us, params.ramp_frequency_hz));
  }
  r.ramp_frequency_hz = params.ramp_frequency_hz;
  r.frame_overhead_s = params.frame_overhead_s;
  r.total_time_s = n_lines_scanned * (params.n_averages / params.ramp_frequency_hz + params.frame_overhead_s);
  return r;
}

double speedup(const AcquisitionReport &slow, const AcquisitionReport &fast) {
  if (!(fast.total_time_s > 0)) {
    throw ValidationError("bad_acquisition", "cannot compute speedup against a zero-duration acquisition");
  }
  return slow.total_time_s / fast.total_time_s;
}

}  // namespace fluxqa::xtalk
