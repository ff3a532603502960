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


#ifndef FLUXQA_ANNEAL_FLUX_MAP_H
#define FLUXQA_ANNEAL_FLUX_MAP_H

#include <filesystem>
#include <vector>

#include "fluxqa/anneal/schedule.h"

namespace fluxqa::anneal {

/// Per-qubit control fluxes in mΦ0.
struct AnnealControlPoint {
  double phi_x_mphi0 = 0;
  std::vector<double> phi_z_mphi0;
};

/// Monotone lookup from control fluxes to Hamiltonian coefficients.
///
/// Φx → A is piecewise linear through the table and strictly decreasing
/// (larger Φx suppresses tunneling). Φz → h is linear, h = Φz / h_scale,
/// clamped to ±h_clamp.
struct FluxMap {
  std::vector<double> phi_x_mphi0 = {500.0, 670.0, 800.0, 1000.0};
  std::vector<double> a_ghz = {5.0, 4.2, 1.0, 0.0};
  double h_scale_mphi0 = 1.0;
  double h_clamp = 2.0;

  void validate() const;
  double a_at(double phi_x_mphi0) const;
  /// Inverse of a_at on [a_ghz.back(), a_ghz.front()].
  double phi_x_for(double a_ghz) const;
  double h_at(double phi_z_mphi0) const;
  double phi_z_for(double h) const;
  /// Local fields for every qubit of a control point.
  std::vector<double> fields(const AnnealControlPoint &point) const;
};

/// Flux trajectory that realizes A(s) of `schedule` on `samples` points.
std::vector<double> phi_x_trajectory(const FluxMap &map, const AnnealSchedule &schedule, int samples);

/// Text matrix kind=flux_map with columns (phi_x_mphi0, a_ghz) and an h_scale_mphi0 key.
void save_flux_map(const std::filesystem::path &path, const FluxMap &map);
FluxMap load_flux_map(const std::filesystem::path &path);

}  // namespace fluxqa::anneal

#endif  // FLUXQA_ANNEAL_FLUX_MAP_H
