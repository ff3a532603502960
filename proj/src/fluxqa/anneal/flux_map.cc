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

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "fluxqa/error.h"
#include "fluxqa/io/text_matrix.h"

namespace fluxqa::anneal {

void FluxMap::validate() const {
  if (phi_x_mphi0.size() < 2 || phi_x_mphi0.size() != a_ghz.size()) {
    throw ValidationError("bad_flux_map", "flux map needs at least two (phi_x, A) rows");
  }
  for (size_t i = 1; i < phi_x_mphi0.size(); ++i) {
    if (!(phi_x_mphi0[i] > phi_x_mphi0[i - 1]) || !(a_ghz[i] < a_ghz[i - 1])) {
      throw ValidationError("bad_flux_map", "flux map must be strictly increasing in phi_x and decreasing in A");
    }
  }
  if (a_ghz.back() < 0) {
    throw ValidationError("bad_flux_map", "A must be nonnegative");
  }
  if (!(h_scale_mphi0 > 0) || !(h_clamp > 0)) {
    throw ValidationError("bad_flux_map", "h scale and clamp must be positive");
  }
}

double FluxMap::a_at(double phi_x) const {
  if (phi_x <= phi_x_mphi0.front()) {
    return a_ghz.front();
  }
  if (phi_x >= phi_x_mphi0.back()) {
    return a_ghz.back();
  }
  auto i = static_cast<size_t>(std::upper_bound(phi_x_mphi0.begin(), phi_x_mphi0.end(), phi_x) - phi_x_mphi0.begin());
  double t = (phi_x - phi_x_mphi0[i - 1]) / (phi_x_mphi0[i] - phi_x_mphi0[i - 1]);
  return a_ghz[i - 1] + t * (a_ghz[i] - a_ghz[i - 1]);
}

double FluxMap::phi_x_for(double a) const {
  if (a > a_ghz.front() || a < a_ghz.back()) {
    throw ValidationError("bad_flux_map",
                          fmt::format("A = {} GHz outside the map range [{}, {}]", a, a_ghz.back(), a_ghz.front()));
  }
  for (size_t i = 1; i < a_ghz.size(); ++i) {
    if (a >= a_ghz[i]) {
      double t = (a_ghz[i - 1] - a) / (a_ghz[i - 1] - a_ghz[i]);
      return phi_x_mphi0[i - 1] + t * (phi_x_mphi0[i] - phi_x_mphi0[i - 1]);
    }
  }
  return phi_x_mphi0.back();
}

double FluxMap::h_at(double phi_z) const { return std::clamp(phi_z / h_scale_mphi0, -h_clamp, h_clamp); }

double FluxMap::phi_z_for(double h) const {
  if (std::abs(h) > h_clamp) {
    throw ValidationError("bad_flux_map", fmt::format("|h| = {} exceeds the clamp {}", std::abs(h), h_clamp));
  }
  return h * h_scale_mphi0;
}

std::vector<double> FluxMap::fields(const AnnealControlPoint &point) const {
  std::vector<double> out;
  for (double z : point.phi_z_mphi0) {
    out.push_back(h_at(z));
  }
  return out;
}

std::vector<double> phi_x_trajectory(const FluxMap &map, const AnnealSchedule &schedule, int samples) {
  map.validate();
  if (samples < 2) {
    throw ValidationError("bad_flux_map", "trajectory needs at least two samples");
  }
  std::vector<double> out;
  for (int i = 0; i < samples; ++i) {
    out.push_back(map.phi_x_for(schedule.A(i / double(samples - 1))));
  }
  return out;
}

void save_flux_map(const std::filesystem::path &path, const FluxMap &map) {
  map.validate();
  io::TextMatrix m;
  m.set("kind", "flux_map");
  m.set("columns", "phi_x_mphi0 a_ghz");
  m.set("h_scale_mphi0", map.h_scale_mphi0);
  m.set("h_clamp", map.h_clamp);
  m.values.resize(static_cast<Eigen::Index>(map.a_ghz.size()), 2);
  for (size_t i = 0; i < map.a_ghz.size(); ++i) {
    m.values(static_cast<Eigen::Index>(i), 0) = map.phi_x_mphi0[i];
    m.values(static_cast<Eigen::Index>(i), 1) = map.a_ghz[i];
  }
  io::save_text_matrix(path, m);
}

FluxMap load_flux_map(const std::filesystem::path &path) {
  auto m = io::load_text_matrix(path);
  if (m.require("kind") != "flux_map" || m.values.cols() != 2) {
    throw ValidationError("bad_format", "file is not a flux map");
  }
  FluxMap map;
  map.phi_x_mphi0.clear();
  map.a_ghz.clear();
  for (Eigen::Index r = 0; r < m.values.rows(); ++r) {
    map.phi_x_mphi0.push_back(m.values(r, 0));
    map.a_ghz.push_back(m.values(r, 1));
  }
  map.h_scale_mphi0 = m.require_double("h_scale_mphi0");
  map.h_clamp = m.require_double("h_clamp");
  map.validate();
  return map;
}

}  // namespace fluxqa::anneal
