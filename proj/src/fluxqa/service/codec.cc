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


#include "fluxqa/service/codec.h"

#include <string>

#include "fluxqa/error.h"

namespace fluxqa::service {

namespace {

template <typename T>
T field(const json &j, const char *key, T fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) {
    return fallback;
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception &e) {
    throw ValidationError("bad_request", std::string("field '") + key + "': " + e.what());
  }
}

xtalk::ScanAxis axis_from(const json &j, xtalk::ScanAxis axis) {
  axis.label = field(j, "label", axis.label);
  axis.start = field(j, "start", axis.start);
  axis.stop = field(j, "stop", axis.stop);
  axis.n_points = field(j, "n_points", axis.n_points);
  return axis;
}

json axis_json(const xtalk::ScanAxis &a) {
  return {{"label", a.label}, {"start", a.start}, {"stop", a.stop}, {"n_points", a.n_points}};
}

anneal::Envelope envelope_from(const json &j) {
  anneal::Envelope e;
  e.s = field(j, "s", std::vector<double>{});
  e.value = field(j, "value", std::vector<double>{});
  return e;
}

}  // namespace

json to_json(const Eigen::MatrixXd &m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(m(r, c));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const Eigen::Matrix2d &m) { return to_json(Eigen::MatrixXd(m)); }

json to_json(const Eigen::Vector2d &v) { return json::array({v(0), v(1)}); }

Eigen::MatrixXd matrix_from_json(const json &j) {
  try {
    if (!j.is_array() || j.empty()) {
      throw ValidationError("bad_request", "matrix must be a non-empty array of rows");
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j.at(0).size()));
    for (size_t r = 0; r < j.size(); ++r) {
      if (j.at(r).size() != static_cast<size_t>(m.cols())) {
        throw ValidationError("bad_request", "matrix rows differ in length");
      }
      for (size_t c = 0; c < j.at(r).size(); ++c) {
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j.at(r).at(c).get<double>();
      }
    }
    return m;
  } catch (const json::exception &e) {
    throw ValidationError("bad_request", std::string("malformed matrix: ") + e.what());
  }
}

Eigen::Vector2d vector2_from_json(const json &j) {
  try {
    if (!j.is_array() || j.size() != 2) {
      throw ValidationError("bad_request", "expected a two-element array");
    }
    return {j.at(0).get<double>(), j.at(1).get<double>()};
  } catch (const json::exception &e) {
    throw ValidationError("bad_request", std::string("malformed vector: ") + e.what());
  }
}

json to_json(const xtalk::AffineCorrection &c) { return json::parse(xtalk::correction_to_json(c)); }

xtalk::AffineCorrection correction_from(const json &j) { return xtalk::correction_from_json(j.dump()); }

json to_json(const xtalk::AcquisitionReport &r) {
  return {{"mode", xtalk::to_string(r.mode)},
          {"per_point_dwell_us", r.per_point_dwell_us},
          {"settle_ms", r.settle_ms},
          {"ramp_frequency_hz", r.ramp_frequency_hz},
          {"n_averages", r.n_averages},
          {"frame_overhead_s", r.frame_overhead_s},
          {"n_points_x", r.n_points_x},
          {"n_points_y", r.n_points_y},
          {"n_lines_scanned", r.n_lines_scanned},
          {"total_time_s", r.total_time_s}};
}

json to_json(const xtalk::LatticeFit &fit) {
  return {{"primitive_vectors", to_json(fit.primitive_vectors)},
          {"primitive_stddev", to_json(fit.primitive_stddev)},
          {"origin", to_json(fit.origin)},
          {"residual_rms", fit.residual_rms},
          {"n_centers_used", fit.n_centers_used},
          {"center_source", xtalk::to_string(fit.center_source)},
          {"residual_offdiag_fraction", xtalk::residual_offdiag_fraction(fit.primitive_vectors)}};
}

json to_json(const xtalk::AffineFit &fit) {
  return {{"lattice_fit", to_json(fit.lattice)}, {"correction", to_json(fit.correction)}};
}

json to_json(const xtalk::OrthogonalityReport &report) {
  return {{"axis_angle_errors_deg", to_json(report.axis_angle_errors_deg)},
          {"residual_offdiag_fraction", report.residual_offdiag_fraction},
          {"model_offdiag_fraction", report.model_offdiag_fraction},
          {"refit", to_json(report.refit)}};
}

json to_json(const xtalk::ScanGrid2D &scan) {
  json j;
  j["axis_x"] = axis_json(scan.axis_x);
  j["axis_y"] = axis_json(scan.axis_y);
  j["values"] = to_json(scan.values);
  j["corrected"] = scan.corrected;
  j["correction"] = scan.correction ? to_json(*scan.correction) : json(nullptr);
  j["probe_ghz"] = scan.probe_ghz;
  j["noise_sigma"] = scan.noise_sigma;
  j["seed"] = scan.seed;
  j["resonator"] = scan.resonator;
  j["acquisition"] = to_json(scan.acquisition);
  j["warning"] = scan.warning;
  return j;
}

xtalk::ScanRequest scan_request_from(const json &j) {
  xtalk::ScanRequest r;
  if (!j.is_object()) {
    return r;
  }
  if (j.contains("axis_x")) {
    r.axis_x = axis_from(j.at("axis_x"), r.axis_x);
  }
  if (j.contains("axis_y")) {
    r.axis_y = axis_from(j.at("axis_y"), r.axis_y);
  }
  auto mode = xtalk::acquisition_mode_from_string(field<std::string>(j, "mode", "raster"));
  r.acquisition = mode == xtalk::AcquisitionMode::kSawtooth ? xtalk::AcquisitionParams::sawtooth_defaults()
                                                             : xtalk::AcquisitionParams::raster_defaults();
  if (j.contains("acquisition")) {
    const auto &a = j.at("acquisition");
    r.acquisition.dwell_us = field(a, "dwell_us", r.acquisition.dwell_us);
    r.acquisition.settle_ms = field(a, "settle_ms", r.acquisition.settle_ms);
    r.acquisition.ramp_frequency_hz = field(a, "ramp_frequency_hz", r.acquisition.ramp_frequency_hz);
    r.acquisition.n_averages = field(a, "n_averages", r.acquisition.n_averages);
    r.acquisition.frame_overhead_s = field(a, "frame_overhead_s", r.acquisition.frame_overhead_s);
  }
  if (j.contains("probe_ghz") && !j.at("probe_ghz").is_null()) {
    r.probe_ghz = field(j, "probe_ghz", 0.0);
  }
  if (j.contains("noise_sigma") && !j.at("noise_sigma").is_null()) {
    r.noise_sigma = field(j, "noise_sigma", 0.0);
  }
  r.seed = field<uint64_t>(j, "seed", 0);
  return r;
}

json to_json(const xtalk::ScanRequest &r) {
  json j;
  j["axis_x"] = axis_json(r.axis_x);
  j["axis_y"] = axis_json(r.axis_y);
  j["mode"] = xtalk::to_string(r.acquisition.mode);
  j["acquisition"] = {{"dwell_us", r.acquisition.dwell_us},
                      {"settle_ms", r.acquisition.settle_ms},
                      {"ramp_frequency_hz", r.acquisition.ramp_frequency_hz},
                      {"n_averages", r.acquisition.n_averages},
                      {"frame_overhead_s", r.acquisition.frame_overhead_s}};
  j["probe_ghz"] = r.probe_ghz ? json(*r.probe_ghz) : json(nullptr);
  j["noise_sigma"] = r.noise_sigma ? json(*r.noise_sigma) : json(nullptr);
  j["seed"] = r.seed;
  return j;
}

json to_json(const characterization::CoherenceFitResult &fit) {
  json j;
  j["kind"] = characterization::to_string(fit.kind);
  j["time_constant_ns"] = fit.time_constant_ns;
  j["time_constant_stddev_ns"] = fit.time_constant_stddev_ns;
  if (fit.kind == characterization::TraceKind::kRamsey) {
    j["detuning_mhz"] = fit.detuning_mhz;
    j["detuning_stddev_mhz"] = fit.detuning_stddev_mhz;
    j["phase_rad"] = fit.phase_rad;
  }
  j["amplitude"] = fit.amplitude;
  j["offset"] = fit.offset;
  j["fit_rms"] = fit.fit_rms;
  j["stddev"] = std::vector<double>(fit.stddev.data(), fit.stddev.data() + fit.stddev.size());
  j["starts_tried"] = fit.starts_tried;
  return j;
}

json to_json(const readout::DiscriminationResult &d) {
  return {{"threshold", d.threshold},
          {"mean_down", d.mean_down},
          {"mean_up", d.mean_up},
          {"sigma_down", d.sigma_down},
          {"sigma_up", d.sigma_up},
          {"separation_sigma", d.separation_sigma},
          {"fidelity_estimate", d.fidelity_estimate},
          {"analytic_error", d.analytic_error},
          {"misclassified_down", d.misclassified_down},
          {"misclassified_up", d.misclassified_up},
          {"low_confidence", d.low_confidence}};
}

json to_json(const ResonatorParams &p) {
  return {{"f_down_ghz", p.f_down_ghz},
          {"state_shift_mhz", p.state_shift_mhz},
          {"loaded_q", p.loaded_q},
          {"depth", p.depth},
          {"qubit_flux_signal_mphi0", p.qubit_flux_signal_mphi0},
          {"mutual_to_squid_ph", p.mutual_to_squid_ph},
          {"coupler_engaged", p.coupler_engaged},
          {"coupler_penalty_factor", p.coupler_penalty_factor},
          {"nominal_q", p.nominal_q}};
}

ResonatorParams resonator_from(const json &j, ResonatorParams base) {
  base.f_down_ghz = field(j, "f_down_ghz", base.f_down_ghz);
  base.state_shift_mhz = field(j, "state_shift_mhz", base.state_shift_mhz);
  base.loaded_q = field(j, "loaded_q", base.loaded_q);
  base.depth = field(j, "depth", base.depth);
  base.qubit_flux_signal_mphi0 = field(j, "qubit_flux_signal_mphi0", base.qubit_flux_signal_mphi0);
  base.mutual_to_squid_ph = field(j, "mutual_to_squid_ph", base.mutual_to_squid_ph);
  base.coupler_engaged = field(j, "coupler_engaged", base.coupler_engaged);
  base.coupler_penalty_factor = field(j, "coupler_penalty_factor", base.coupler_penalty_factor);
  base.nominal_q = field(j, "nominal_q", base.nominal_q);
  base.validate();
  return base;
}

json to_json(const anneal::IsingProblem &p) {
  json couplings = json::array();
  for (const auto &[key, value] : p.J) {
    couplings.push_back(json::array({key.first, key.second, value}));
  }
  return {{"n", p.n}, {"h", p.h}, {"J", couplings}};
}

json to_json(const anneal::MinGap &g) {
  return {{"s", g.s}, {"gap_ghz", g.gap}, {"degeneracy", g.degeneracy}, {"resolution", g.resolution}};
}

json to_json(const anneal::AnnealSchedule &s) {
  json j;
  j["kind"] = anneal::to_string(s.kind);
  j["t_f_ns"] = s.t_f_ns;
  j["t_hold_ns"] = s.t_hold_ns;
  j["a0_ghz"] = s.a0_ghz;
  j["b0_ghz"] = s.b0_ghz;
  if (s.kind == anneal::ScheduleKind::kTabulated) {
    j["a_table"] = {{"s", s.a_table.s}, {"value", s.a_table.value}};
    j["b_table"] = {{"s", s.b_table.s}, {"value", s.b_table.value}};
  }
  return j;
}

anneal::AnnealSchedule schedule_from(const json &j) {
  anneal::AnnealSchedule s;
  s.kind = anneal::schedule_kind_from_string(field<std::string>(j, "kind", "linear"));
  s.t_f_ns = field(j, "t_f_ns", s.t_f_ns);
  s.t_hold_ns = field(j, "t_hold_ns", s.t_hold_ns);
  s.a0_ghz = field(j, "a0_ghz", s.a0_ghz);
  s.b0_ghz = field(j, "b0_ghz", s.b0_ghz);
  if (s.kind == anneal::ScheduleKind::kTabulated) {
    if (!j.contains("a_table") || !j.contains("b_table")) {
      throw ValidationError("bad_schedule", "tabulated schedule needs a_table and b_table");
    }
    s.a_table = envelope_from(j.at("a_table"));
    s.b_table = envelope_from(j.at("b_table"));
  }
  s.validate();
  return s;
}

json to_json(const anneal::NoiseSpec &n) {
  return {{"basis", anneal::to_string(n.basis)},
          {"dephasing_rate_per_us", n.dephasing_rate_per_us},
          {"relaxation",
           {{"enabled", n.relaxation.enabled},
            {"bath_temperature_ghz", n.relaxation.bath_temperature_ghz},
            {"coupling_rate_per_us", n.relaxation.coupling_rate_per_us},
            {"ohmic", n.relaxation.ohmic}}}};
}

anneal::NoiseSpec noise_from(const json &j) {
  anneal::NoiseSpec n;
  n.basis = anneal::decoherence_basis_from_string(field<std::string>(j, "basis", "instantaneous_eigenbasis"));
  n.dephasing_rate_per_us = field(j, "dephasing_rate_per_us", n.dephasing_rate_per_us);
  if (j.is_object() && j.contains("relaxation")) {
    const auto &r = j.at("relaxation");
    n.relaxation.enabled = field(r, "enabled", n.relaxation.enabled);
    n.relaxation.bath_temperature_ghz = field(r, "bath_temperature_ghz", n.relaxation.bath_temperature_ghz);
    n.relaxation.coupling_rate_per_us = field(r, "coupling_rate_per_us", n.relaxation.coupling_rate_per_us);
    n.relaxation.ohmic = field(r, "ohmic", n.relaxation.ohmic);
  }
  n.validate();
  return n;
}

json to_json(const anneal::InstanceRanking &r) {
  json j;
  j["seed"] = r.seed;
  j["n_samples"] = r.n_samples;
  j["resolution"] = r.resolution;
  json edges = json::array();
  for (auto [a, b] : r.family.edges) {
    edges.push_back(json::array({a, b}));
  }
  j["family"] = {{"n", r.family.n},
                 {"edges", edges},
                 {"h_max", r.family.h_max},
                 {"j_min", r.family.j_min},
                 {"j_max", r.family.j_max},
                 {"grid_step", r.family.grid_step},
                 {"fixed", r.family.fixed ? to_json(*r.family.fixed) : json(nullptr)}};
  json ranked = json::array();
  for (const auto &inst : r.ranked) {
    ranked.push_back(
        {{"sample_index", inst.sample_index}, {"problem", to_json(inst.problem)}, {"min_gap", to_json(inst.min_gap)}});
  }
  j["ranked"] = ranked;
  return j;
}

std::vector<Eigen::Vector2d> centers_from(const json &j) {
  if (!j.is_array()) {
    throw ValidationError("bad_request", "centers must be an array of [x, y] pairs");
  }
  std::vector<Eigen::Vector2d> out;
  for (const auto &c : j) {
    out.push_back(vector2_from_json(c));
  }
  return out;
}

std::vector<Eigen::Vector2i> indices_from(const json &j) {
  std::vector<Eigen::Vector2i> out;
  if (j.is_null()) {
    return out;
  }
  if (!j.is_array()) {
    throw ValidationError("bad_request", "indices must be an array of [m, n] pairs");
  }
  try {
    for (const auto &c : j) {
      if (!c.is_array() || c.size() != 2) {
        throw ValidationError("bad_request", "each index must be an [m, n] pair");
      }
      out.emplace_back(c.at(0).get<int>(), c.at(1).get<int>());
    }
  } catch (const json::exception &e) {
    throw ValidationError("bad_request", std::string("malformed indices: ") + e.what());
  }
  return out;
}

}  // namespace fluxqa::service
