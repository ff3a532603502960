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


#include "fluxqa/anneal/schedule.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "fluxqa/error.h"
#include "fluxqa/io/text_matrix.h"

namespace fluxqa::anneal {

namespace {

constexpr double kEndpointRatio = 20.0;

void validate_envelope(const Envelope &e, const char *name) {
  if (e.s.size() < 2 || e.s.size() != e.value.size()) {
    throw ValidationError("bad_schedule", fmt::format("envelope {} needs at least two (s, value) rows", name));
  }
  for (size_t i = 0; i < e.s.size(); ++i) {
    if (!std::isfinite(e.s[i]) || !std::isfinite(e.value[i]) || (i > 0 && !(e.s[i] > e.s[i - 1]))) {
      throw ValidationError("bad_schedule", fmt::format("envelope {} must have finite values and increasing s", name));
    }
  }
  if (e.s.front() > 0 || e.s.back() < 1) {
    throw ValidationError("bad_schedule", fmt::format("envelope {} must cover s in [0, 1]", name));
  }
}

}  // namespace

std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::kLinear:
      return "linear";
    case ScheduleKind::kTabulated:
      return "tabulated";
    case ScheduleKind::kLandauZener:
      return "landau_zener";
    case ScheduleKind::kConstant:
      return "constant";
  }
  return "linear";
}

ScheduleKind schedule_kind_from_string(const std::string &text) {
  for (auto k : {ScheduleKind::kLinear, ScheduleKind::kTabulated, ScheduleKind::kLandauZener, ScheduleKind::kConstant}) {
    if (to_string(k) == text) {
      return k;
    }
  }
  throw ValidationError("bad_schedule", fmt::format("unknown schedule kind '{}'", text));
}

double Envelope::at(double x) const {
  if (x <= s.front()) {
    return value.front();
  }
  if (x >= s.back()) {
    return value.back();
  }
  auto it = std::upper_bound(s.begin(), s.end(), x);
  auto i = static_cast<size_t>(it - s.begin());
  double t = (x - s[i - 1]) / (s[i] - s[i - 1]);
  return value[i - 1] + t * (value[i] - value[i - 1]);
}

AnnealSchedule AnnealSchedule::linear(double t_f_ns, double a0_ghz, double b0_ghz) {
  AnnealSchedule s;
  s.kind = ScheduleKind::kLinear;
  s.t_f_ns = t_f_ns;
  s.a0_ghz = a0_ghz;
  s.b0_ghz = b0_ghz;
  return s;
}

AnnealSchedule AnnealSchedule::tabulated(Envelope a, Envelope b, double t_f_ns) {
  AnnealSchedule s;
  s.kind = ScheduleKind::kTabulated;
  s.a_table = std::move(a);
  s.b_table = std::move(b);
  s.t_f_ns = t_f_ns;
  return s;
}

AnnealSchedule AnnealSchedule::landau_zener(double gap_ghz, double sweep_ghz, double t_f_ns) {
  AnnealSchedule s;
  s.kind = ScheduleKind::kLandauZener;
  s.a0_ghz = gap_ghz;
  s.b0_ghz = sweep_ghz;
  s.t_f_ns = t_f_ns;
  return s;
}

AnnealSchedule AnnealSchedule::constant(double a_ghz, double b_ghz, double t_f_ns) {
  AnnealSchedule s;
  s.kind = ScheduleKind::kConstant;
  s.a0_ghz = a_ghz;
  s.b0_ghz = b_ghz;
  s.t_f_ns = t_f_ns;
  return s;
}

double AnnealSchedule::A(double s) const {
  switch (kind) {
    case ScheduleKind::kLinear:
      return a0_ghz * (1 - s);
    case ScheduleKind::kTabulated:
      return a_table.at(s);
    case ScheduleKind::kLandauZener:
    case ScheduleKind::kConstant:
      return a0_ghz;
  }
  return 0;
}

double AnnealSchedule::B(double s) const {
  switch (kind) {
    case ScheduleKind::kLinear:
      return b0_ghz * s;
    case ScheduleKind::kTabulated:
      return b_table.at(s);
    case ScheduleKind::kLandauZener:
      return b0_ghz * (2 * s - 1);
    case ScheduleKind::kConstant:
      return b0_ghz;
  }
  return 0;
}

double AnnealSchedule::s_at(double t_ns) const { return std::clamp(t_ns / t_f_ns, 0.0, 1.0); }

void AnnealSchedule::validate() const {
  if (!(t_f_ns > 0) || !std::isfinite(t_f_ns) || !(t_hold_ns >= 0) || !std::isfinite(t_hold_ns)) {
    throw ValidationError("bad_schedule", "anneal time must be positive and hold time nonnegative");
  }
  if (!std::isfinite(a0_ghz) || !std::isfinite(b0_ghz)) {
    throw ValidationError("bad_schedule", "envelope scales must be finite");
  }
  if (kind == ScheduleKind::kLandauZener || kind == ScheduleKind::kConstant) {
    return;
  }
  if (kind == ScheduleKind::kTabulated) {
    validate_envelope(a_table, "A");
    validate_envelope(b_table, "B");
    for (size_t i = 0; i < a_table.value.size(); ++i) {
      if (a_table.value[i] < 0) {
        throw ValidationError("bad_schedule", "envelope A must be nonnegative");
      }
    }
    for (size_t i = 0; i < b_table.value.size(); ++i) {
      if (b_table.value[i] < 0) {
        throw ValidationError("bad_schedule", "envelope B must be nonnegative");
      }
    }
  } else if (!(a0_ghz > 0) || !(b0_ghz > 0)) {
    throw ValidationError("bad_schedule", "linear envelope scales must be positive");
  }
  if (!(A(0) >= kEndpointRatio * B(0)) || !(B(1) >= kEndpointRatio * A(1)) || !(A(0) > 0) || !(B(1) > 0)) {
    throw ValidationError("bad_schedule", "schedule must start driver-dominated and end problem-dominated");
  }
}

void save_envelope(const std::filesystem::path &path, const Envelope &envelope, const std::string &name) {
  io::TextMatrix m;
  m.set("kind", "schedule_envelope");
  m.set("envelope", name);
  m.set("columns", "s value_ghz");
  m.values.resize(static_cast<Eigen::Index>(envelope.s.size()), 2);
  for (size_t i = 0; i < envelope.s.size(); ++i) {
    m.values(static_cast<Eigen::Index>(i), 0) = envelope.s[i];
    m.values(static_cast<Eigen::Index>(i), 1) = envelope.value[i];
  }
  io::save_text_matrix(path, m);
}

Envelope load_envelope(const std::filesystem::path &path) {
  auto m = io::load_text_matrix(path);
  if (m.require("kind") != "schedule_envelope" || m.values.cols() != 2) {
    throw ValidationError("bad_format", "file is not a two-column schedule envelope");
  }
  Envelope e;
  for (Eigen::Index r = 0; r < m.values.rows(); ++r) {
    e.s.push_back(m.values(r, 0));
    e.value.push_back(m.values(r, 1));
  }
  validate_envelope(e, m.require("envelope").c_str());
  return e;
}

}  // namespace fluxqa::anneal
