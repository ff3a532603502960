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


#ifndef FLUXQA_ANNEAL_SCHEDULE_H
#define FLUXQA_ANNEAL_SCHEDULE_H

#include <filesystem>
#include <string>
#include <vector>

namespace fluxqa::anneal {

enum class ScheduleKind {
  /// A = A0·(1 − s), B = B0·s.
  kLinear,
  /// Piecewise-linear tables over s.
  kTabulated,
  /// Two-level crossing: A = A0 (the gap), B = B0·(2s − 1). B is signed.
  kLandauZener,
  /// A = A0, B = B0 for all s.
  kConstant,
};

std::string to_string(ScheduleKind kind);
ScheduleKind schedule_kind_from_string(const std::string &text);

/// Piecewise-linear table with strictly increasing s covering [0, 1].
struct Envelope {
  std::vector<double> s;
  std::vector<double> value;

  double at(double s_value) const;
  bool operator==(const Envelope &) const = default;
};

/// Driver and problem envelopes A(s), B(s) in GHz and the time map s(t) = t/t_f,
/// followed by an optional hold at s = 1.
struct AnnealSchedule {
  ScheduleKind kind = ScheduleKind::kLinear;
  double a0_ghz = 5.0;
  double b0_ghz = 5.0;
  Envelope a_table;
  Envelope b_table;
  double t_f_ns = 100.0;
  double t_hold_ns = 0.0;

  static AnnealSchedule linear(double t_f_ns, double a0_ghz = 5.0, double b0_ghz = 5.0);
  static AnnealSchedule tabulated(Envelope a, Envelope b, double t_f_ns);
  static AnnealSchedule landau_zener(double gap_ghz, double sweep_ghz, double t_f_ns);
  static AnnealSchedule constant(double a_ghz, double b_ghz, double t_f_ns);

  double A(double s) const;
  double B(double s) const;
  double s_at(double t_ns) const;
  double total_time_ns() const { return t_f_ns + t_hold_ns; }

  /// Positive times always. Linear and tabulated schedules must also be
  /// nonnegative with A(0) ≫ B(0) and B(1) ≫ A(1) (ratio ≥ 20). The
  /// Landau-Zener and constant reductions are exempt from the envelope rules.
  void validate() const;
  bool operator==(const AnnealSchedule &) const = default;
};

/// Envelope tables are two-column text matrices (s, value in GHz).
void save_envelope(const std::filesystem::path &path, const Envelope &envelope, const std::string &name);
Envelope load_envelope(const std::filesystem::path &path);

}  // namespace fluxqa::anneal

#endif  // FLUXQA_ANNEAL_SCHEDULE_H
