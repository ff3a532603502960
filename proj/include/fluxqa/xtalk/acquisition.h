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

#ifndef FLUXQA_XTALK_ACQUISITION_H
#define FLUXQA_XTALK_ACQUISITION_H

#include <string>

namespace fluxqa::xtalk {

enum class AcquisitionMode { kRaster, kSawtooth };

std::string to_string(AcquisitionMode mode);
AcquisitionMode acquisition_mode_from_string(const std::string &text);

/// Instrument timing parameters.
///
/// Raster stepping visits every grid point, waits `settle_ms` for the bias to
/// settle and integrates for `dwell_us` per average:
///
///     total = nx · ny · (settle + n_averages · dwell)
///
/// Sawtooth acquisition ramps each swept control line at `ramp_frequency_hz`;
/// the digitizer samples `dwell_us` per point along the ramp and averages
/// `n_averages` ramp cycles, plus a fixed transfer overhead per swept line:
///
///     total = n_lines_scanned · (n_averages / ramp_frequency + frame_overhead)
///
/// The raster defaults (1 s settle per point) are a calibration of the time
/// model: they make the default 101×101 grid take ≈ 2.8 h.
struct AcquisitionParams {
  AcquisitionMode mode = AcquisitionMode::kRaster;
  double dwell_us = 2.0;
  double settle_ms = 1000.0;
  double ramp_frequency_hz = 500.0;
  int n_averages = 1;
  double frame_overhead_s = 1.0;

  static AcquisitionParams raster_defaults();
  static AcquisitionParams sawtooth_defaults();
};

struct AcquisitionReport {
  AcquisitionMode mode = AcquisitionMode::kRaster;
  double per_point_dwell_us = 0;
  double settle_ms = 0;
  double ramp_frequency_hz = 0;
  int n_averages = 0;
  double frame_overhead_s = 0;
  int n_points_x = 0;
  int n_points_y = 0;
  int n_lines_scanned = 0;
  double total_time_s = 0;
};

/// Throws ValidationError on nonpositive parameters, or when one ramp is too
/// short to sample every point of the fast axis.
AcquisitionReport simulate_acquisition_time(int n_points_x, int n_points_y, const AcquisitionParams &params,
                                            int n_lines_scanned = 2);

double speedup(const AcquisitionReport &slow, const AcquisitionReport &fast);

}  // namespace fluxqa::xtalk

#endif  // FLUXQA_XTALK_ACQUISITION_H
