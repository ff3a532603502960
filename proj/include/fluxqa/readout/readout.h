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


#ifndef FLUXQA_READOUT_READOUT_H
#define FLUXQA_READOUT_READOUT_H

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fluxqa/device/resonator.h"
#include "fluxqa/io/text_matrix.h"

namespace fluxqa::readout {

/// Persistent-current state. kUp (σz = +1) shifts the resonator up by
/// state_shift and reads above threshold.
enum class SpinState { kDown, kUp };

std::string to_string(SpinState state);
SpinState spin_state_from_string(const std::string &text);

/// Φ = Ip·M, in Wb. Throws ValidationError for nonpositive inputs.
double qubit_flux_into_squid_wb(double ip_na, double mutual_ph);
/// Same flux in mΦ0.
double qubit_flux_into_squid_mphi0(double ip_na, double mutual_ph);

double resonance_ghz(const ResonatorParams &params, SpinState state);

/// Notch lineshape around the state-dependent resonance.
double resonator_transmission(const ResonatorParams &params, SpinState state, double probe_ghz);

/// Unit-time noise chosen so the default resonator, probed at f_down for
/// 10 μs, separates the two states by 11σ.
double default_sigma_unit();

/// σ(t) = σ_unit / √(t / 1 μs).
double noise_sigma(double sigma_unit, double integration_time_us);

struct ShotSettings {
  double probe_ghz = 6.003;
  double integration_time_us = 10.0;
  double sigma_unit = default_sigma_unit();
};

struct ShotEnsemble {
  std::vector<double> voltages;
  double integration_time_us = 0;
  double probe_ghz = 0;
  SpinState prepared_state = SpinState::kDown;
  uint64_t seed = 0;
};

/// One integrated readout voltage.
double single_shot(const ResonatorParams &params, SpinState state, const ShotSettings &settings, uint64_t seed);

/// `n_shots` independent shots drawn from one seeded stream.
ShotEnsemble simulate_shots(const ResonatorParams &params, SpinState state, const ShotSettings &settings,
                            int n_shots, uint64_t seed);

struct DiscriminationResult {
  double threshold = 0;
  double mean_down = 0;
  double mean_up = 0;
  double sigma_down = 0;
  double sigma_up = 0;
  double separation_sigma = 0;
  double fidelity_estimate = 0;
  double analytic_error = 0;
  long misclassified_down = 0;
  long misclassified_up = 0;
  /// Separation below 1σ.
  bool low_confidence = false;
};

/// ½·erfc(s / (2√2)).
double analytic_error(double separation_sigma);

/// Per-state Gaussian fit, equal-likelihood threshold, misclassification
/// count. Requires ≥ 1000 shots per state.
DiscriminationResult discriminate(const ShotEnsemble &down_shots, const ShotEnsemble &up_shots);

struct Histogram {
  std::vector<double> edges;
  std::vector<long> counts_down;
  std::vector<long> counts_up;
};

/// Common binning of both ensembles over their joint range.
Histogram histogram(const ShotEnsemble &down_shots, const ShotEnsemble &up_shots, int n_bins = 100);

/// T1 while the readout coupler is in its configured state: unchanged when
/// disengaged, divided by the penalty factor when engaged.
double readout_backaction_t1_us(const ResonatorParams &params, double anneal_t1_us);

io::TextMatrix shots_to_text_matrix(const ShotEnsemble &shots);
ShotEnsemble shots_from_text_matrix(const io::TextMatrix &matrix);
io::TextMatrix histogram_to_text_matrix(const Histogram &h);
void save_shots(const std::filesystem::path &path, const ShotEnsemble &shots);
ShotEnsemble load_shots(const std::filesystem::path &path);

}  // namespace fluxqa::readout

#endif  // FLUXQA_READOUT_READOUT_H
