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


#ifndef FLUXQA_CHARACTERIZATION_COHERENCE_H
#define FLUXQA_CHARACTERIZATION_COHERENCE_H

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "fluxqa/io/text_matrix.h"

namespace fluxqa::characterization {

enum class TraceKind { kT1Decay, kRamsey };

std::string to_string(TraceKind kind);
TraceKind trace_kind_from_string(const std::string &text);

/// Excited-state population versus delay. Delays are in ns.
struct DecayTrace {
  TraceKind kind = TraceKind::kT1Decay;
  Eigen::VectorXd delays_ns;
  Eigen::VectorXd populations;
  double shot_noise_sigma = 0;
  uint64_t seed = 0;
};

/// 25 log-spaced delays from T1/50 to 4·T1.
Eigen::VectorXd default_t1_delays_ns(double t1_us);

/// 60 linear delays from 0 to max(3·T2*, 3.5 detuning periods).
Eigen::VectorXd default_ramsey_delays_ns(double t2_star_ns, double detuning_mhz);

/// populations = exp(−t/T1) + N(0, σ²).
DecayTrace simulate_t1_trace(double t1_us, const Eigen::VectorXd &delays_ns, double noise_sigma, uint64_t seed);

/// populations = ½ + ½·exp(−t/T2*)·cos(2π·detuning·t) + N(0, σ²).
/// Detuning must lie in [1, 20] MHz.
DecayTrace simulate_ramsey_trace(double t2_star_ns, double detuning_mhz, const Eigen::VectorXd &delays_ns,
                                 double noise_sigma, uint64_t seed);

struct CoherenceFitResult {
  TraceKind kind = TraceKind::kT1Decay;
  /// T1 or T2*, in ns.
  double time_constant_ns = 0;
  double time_constant_stddev_ns = 0;
  /// Ramsey only.
  double detuning_mhz = 0;
  double detuning_stddev_mhz = 0;
  double phase_rad = 0;
  double amplitude = 0;
  double offset = 0;
  double fit_rms = 0;
  /// Model parameter standard deviations, in model order:
  /// T1: (amplitude, T1 ns, offset); Ramsey: (offset, amplitude, T2* ns, detuning GHz, phase).
  Eigen::VectorXd stddev;
  Eigen::VectorXd residuals;
  int starts_tried = 0;
};

/// Nonlinear least squares: a·exp(−t/T1) + c, or c + a·exp(−t/T2*)·cos(2πft + φ).
///
/// Throws ValidationError for fewer than 8 points, non-increasing delays, or a
/// trace spanning fewer than 1.5 decay constants (T1) or 3 oscillation
/// periods (Ramsey). Throws NumericalError when no start converges.
CoherenceFitResult fit_decay(const DecayTrace &trace);

/// Model value at each delay for a fitted result.
Eigen::VectorXd model_values(const CoherenceFitResult &fit, const Eigen::VectorXd &delays_ns);

/// Non-empty when T2* exceeds 2·T1.
std::optional<std::string> physicality_warning(double t1_us, double t2_star_ns);

io::TextMatrix trace_to_text_matrix(const DecayTrace &trace);
DecayTrace trace_from_text_matrix(const io::TextMatrix &matrix);
void save_trace(const std::filesystem::path &path, const DecayTrace &trace);
DecayTrace load_trace(const std::filesystem::path &path);

}  // namespace fluxqa::characterization

#endif  // FLUXQA_CHARACTERIZATION_COHERENCE_H
