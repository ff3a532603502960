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

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fluxqa/error.h"
#include "fluxqa/random.h"

namespace fluxqa::xtalk {

namespace {

constexpr int kMinPoints = 8;
// Probe frequencies further than this many linewidths outside the pulled
// resonance range give an essentially flat map.
constexpr double kBandMarginLinewidths = 20.0;

double wrapped_gaussian(double x, double center, double width) {
  double d = (x - center) - std::round(x - center);
  double sum = 0;
  for (int k = -2; k <= 2; ++k) {
    double e = (d - k) / width;
    sum += std::exp(-0.5 * e * e);
  }
  return sum;
}

double designed_mutual(const DeviceTruth &device, Eigen::Index line) {
  return device.true_control_matrix()(line, line);
}

}  // namespace

void ScanAxis::validate() const {
  if (n_points < kMinPoints) {
    throw ValidationError("bad_grid", fmt::format("axis '{}' needs at least {} points", label, kMinPoints));
  }
  if (!std::isfinite(start) || !std::isfinite(stop) || !(stop > start)) {
    throw ValidationError("bad_grid", fmt::format("axis '{}' must satisfy start < stop", label));
  }
}

Eigen::Vector2d ScanGrid2D::coordinate(double col, double row) const {
  return {axis_x.start + axis_x.step() * col, axis_y.start + axis_y.step() * row};
}

Eigen::Vector2d ScanGrid2D::pixel(const Eigen::Vector2d &point) const {
  return {(point(0) - axis_x.start) / axis_x.step(), (point(1) - axis_y.start) / axis_y.step()};
}

double default_probe_ghz(const DeviceTruth &device, size_t resonator) {
  const auto &r = device.resonators().at(resonator);
  return r.f_down_ghz + device.config().noise.pull_linewidths * r.linewidth_ghz();
}

double transmission_model(const DeviceTruth &device, const FluxVector &flux, double probe_ghz, size_t resonator) {
  if (resonator >= device.resonators().size()) {
    throw ValidationError("bad_index", fmt::format("resonator {} out of range", resonator));
  }
  if (flux.values.size() != device.n_loops()) {
    throw ValidationError("dimension_mismatch", "flux vector does not cover every loop");
  }
  const auto &r = device.resonators()[resonator];
  const auto &model = device.config().noise;
  const auto &pattern = device.pattern_fractional_offset();
  auto lx = static_cast<Eigen::Index>(2 * resonator);
  auto lz = lx + 1;
  double w = model.bump_width_phi0;
  double norm = wrapped_gaussian(0.0, 0.0, w);
  double bump = wrapped_gaussian(flux.values(lx), pattern(lx), w) *
                wrapped_gaussian(flux.values(lz), pattern(lz), w) / (norm * norm);
  double kappa = r.linewidth_ghz();
  double resonance = r.f_down_ghz + model.pull_linewidths * kappa * bump;
  return std::clamp(notch_transmission(probe_ghz, resonance, kappa, r.depth), 0.0, 1.0);
}

FluxVector flux_at_nominal(const DeviceTruth &device, const std::array<std::string, 2> &lines,
                           const Eigen::Vector2d &nominal) {
  Eigen::VectorXd currents = Eigen::VectorXd::Zero(device.n_lines());
  for (int k = 0; k < 2; ++k) {
    auto j = device.line_index(lines[k]);
    currents(j) = nominal(k) / designed_mutual(device, j);
  }
  return true_flux(device, make_currents(device, currents));
}

ScanGrid2D scan_transmission(const DeviceTruth &device, const ScanRequest &request) {
  request.axis_x.validate();
  request.axis_y.validate();
  std::array<std::string, 2> lines{request.axis_x.label, request.axis_y.label};
  auto ix = device.line_index(lines[0]);
  auto iy = device.line_index(lines[1]);
  if (ix == iy) {
    throw ValidationError("bad_grid", "scan axes must be two different control lines");
  }
  if (request.correction && request.correction->lines != lines) {
    throw ValidationError("line_mismatch", "correction was fitted for different control lines");
  }

  ScanGrid2D scan;
  scan.axis_x = request.axis_x;
  scan.axis_y = request.axis_y;
  scan.resonator = static_cast<size_t>(ix / 2);
  scan.probe_ghz = request.probe_ghz.value_or(default_probe_ghz(device, scan.resonator));
  scan.noise_sigma = request.noise_sigma.value_or(device.config().noise.noise_sigma);
  scan.seed = request.seed;
  scan.corrected = request.correction.has_value();
  scan.correction = request.correction;
  if (!(scan.noise_sigma >= 0)) {
    throw ValidationError("bad_noise", "noise sigma must be nonnegative");
  }
  scan.acquisition =
      simulate_acquisition_time(request.axis_x.n_points, request.axis_y.n_points, request.acquisition, 2);

  const auto &res = device.resonators()[scan.resonator];
  double kappa = res.linewidth_ghz();
  double band_lo = res.f_down_ghz - kBandMarginLinewidths * kappa;
  double band_hi = res.f_down_ghz + (device.config().noise.pull_linewidths + kBandMarginLinewidths) * kappa;
  if (scan.probe_ghz < band_lo || scan.probe_ghz > band_hi) {
    scan.warning = fmt::format("probe {} GHz is outside the resonator band [{}, {}] GHz; map is flat",
                               scan.probe_ghz, band_lo, band_hi);
  }

  Rng rng = Rng::derive(device.rng_seed(), request.seed);
  const int nx = request.axis_x.n_points;
  const int ny = request.axis_y.n_points;
  scan.values.resize(ny, nx);
  for (int i = 0; i < ny; ++i) {
    for (int j = 0; j < nx; ++j) {
      Eigen::Vector2d point(request.axis_x.at(j), request.axis_y.at(i));
      Eigen::Vector2d nominal = scan.corrected ? request.correction->to_nominal(point) : point;
      double clean = transmission_model(device, flux_at_nominal(device, lines, nominal), scan.probe_ghz,
                                        scan.resonator);
      double noisy = scan.noise_sigma > 0 ? clean + scan.noise_sigma * rng.normal() : clean;
      scan.values(i, j) = std::clamp(noisy, 0.0, 1.0);
    }
  }
  return scan;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

void put_axis(io::TextMatrix &m, const char *name, const ScanAxis &a) {
  m.set(fmt::format("{}.label", name), a.label);
  m.set(fmt::format("{}.start", name), a.start);
  m.set(fmt::format("{}.stop", name), a.stop);
  m.set(fmt::format("{}.n_points", name), std::to_string(a.n_points));
}

ScanAxis get_axis(const io::TextMatrix &m, const char *name) {
  ScanAxis a;
  a.label = m.require(fmt::format("{}.label", name));
  a.start = m.require_double(fmt::format("{}.start", name));
  a.stop = m.require_double(fmt::format("{}.stop", name));
  a.n_points = static_cast<int>(m.require_double(fmt::format("{}.n_points", name)));
  return a;
}

}  // namespace

io::TextMatrix scan_to_text_matrix(const ScanGrid2D &scan) {
  io::TextMatrix m;
  m.set("kind", "scan");
  m.set("units", "transmission magnitude; axes in Phi0");
  put_axis(m, "axis_x", scan.axis_x);
  put_axis(m, "axis_y", scan.axis_y);
  m.set("corrected", scan.corrected ? "true" : "false");
  if (scan.correction) {
    const auto &c = *scan.correction;
    m.set("correction.T", fmt::format("{} {} {} {}", io::format_double(c.T(0, 0)), io::format_double(c.T(0, 1)),
                                      io::format_double(c.T(1, 0)), io::format_double(c.T(1, 1))));
    m.set("correction.offset", fmt::format("{} {}", io::format_double(c.offset(0)), io::format_double(c.offset(1))));
  }
  m.set("probe_ghz", scan.probe_ghz);
  m.set("noise_sigma", scan.noise_sigma);
  m.set("seed", std::to_string(scan.seed));
  m.set("resonator", std::to_string(scan.resonator));
  const auto &a = scan.acquisition;
  m.set("acquisition.mode", to_string(a.mode));
  m.set("acquisition.per_point_dwell_us", a.per_point_dwell_us);
  m.set("acquisition.settle_ms", a.settle_ms);
  m.set("acquisition.ramp_frequency_hz", a.ramp_frequency_hz);
  m.set("acquisition.n_averages", std::to_string(a.n_averages));
  m.set("acquisition.frame_overhead_s", a.frame_overhead_s);
  m.set("acquisition.n_lines_scanned", std::to_string(a.n_lines_scanned));
  m.set("acquisition.total_time_s", a.total_time_s);
  if (!scan.warning.empty()) {
    m.set("warning", scan.warning);
  }
  m.values = scan.values;
  return m;
}

ScanGrid2D scan_from_text_matrix(const io::TextMatrix &m) {
  if (m.require("kind") != "scan") {
    throw ValidationError("bad_format", "text matrix is not a scan");
  }
  ScanGrid2D s;
  s.axis_x = get_axis(m, "axis_x");
  s.axis_y = get_axis(m, "axis_y");
  s.axis_x.validate();
  s.axis_y.validate();
  s.corrected = m.require("corrected") == "true";
  if (auto t = m.get("correction.T")) {
    std::istringstream ts(*t);
    std::istringstream os(m.require("correction.offset"));
    Eigen::Matrix2d T;
    Eigen::Vector2d off;
    std::string tok;
    for (int k = 0; k < 4; ++k) {
      ts >> tok;
      T(k / 2, k % 2) = io::parse_double(tok);
    }
    for (int k = 0; k < 2; ++k) {
      os >> tok;
      off(k) = io::parse_double(tok);
    }
    s.correction = AffineCorrection::from_basis({s.axis_x.label, s.axis_y.label}, T, off);
  }
  s.probe_ghz = m.require_double("probe_ghz");
  s.noise_sigma = m.require_double("noise_sigma");
  s.seed = std::stoull(m.require("seed"));
  s.resonator = std::stoul(m.require("resonator"));
  auto &a = s.acquisition;
  a.mode = acquisition_mode_from_string(m.require("acquisition.mode"));
  a.per_point_dwell_us = m.require_double("acquisition.per_point_dwell_us");
  a.settle_ms = m.require_double("acquisition.settle_ms");
  a.ramp_frequency_hz = m.require_double("acquisition.ramp_frequency_hz");
  a.n_averages = static_cast<int>(m.require_double("acquisition.n_averages"));
  a.frame_overhead_s = m.require_double("acquisition.frame_overhead_s");
  a.n_lines_scanned = static_cast<int>(m.require_double("acquisition.n_lines_scanned"));
  a.total_time_s = m.require_double("acquisition.total_time_s");
  a.n_points_x = s.axis_x.n_points;
  a.n_points_y = s.axis_y.n_points;
  s.warning = m.get("warning").value_or("");
  if (m.values.rows() != s.axis_y.n_points || m.values.cols() != s.axis_x.n_points) {
    throw ValidationError("bad_format", "scan matrix shape does not match its axes");
  }
  s.values = m.values;
  return s;
}

void save_scan(const std::filesystem::path &path, const ScanGrid2D &scan) {
  io::save_text_matrix(path, scan_to_text_matrix(scan));
}

ScanGrid2D load_scan(const std::filesystem::path &path) { return scan_from_text_matrix(io::load_text_matrix(path)); }

}  // namespace fluxqa::xtalk
