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

#ifndef FLUXQA_DEVICE_RESONATOR_H
#define FLUXQA_DEVICE_RESONATOR_H

namespace fluxqa {

/// Readout resonator terminated by an rf-SQUID that sees the qubit's persistent current.
///
/// Default values describe the single-qubit readout device: a 15 MHz state-dependent
/// shift equal to 14 linewidths at 6.003 GHz. The loaded Q is therefore derived from
/// the linewidth statement (6003 MHz / (15/14 MHz) ≈ 5603); the quoted Q ≈ 10,000 is
/// kept separately in `nominal_q` and is not used by the model.
struct ResonatorParams {
  double f_down_ghz = 6.003;
  double state_shift_mhz = 15.0;
  double loaded_q = 6003.0 * 14.0 / 15.0;
  /// Fractional dip depth of the notch at resonance.
  double depth = 0.25;
  double qubit_flux_signal_mphi0 = 2.4179879;
  double mutual_to_squid_ph = 50.0;
  bool coupler_engaged = false;
  /// T1 reduction factor applied when the tunable coupler is engaged.
  double coupler_penalty_factor = 10.0;
  double nominal_q = 10000.0;

  /// κ = f_down / Q, in GHz.
  double linewidth_ghz() const { return f_down_ghz / loaded_q; }
  double shift_ghz() const { return state_shift_mhz * 1e-3; }
  double shift_in_linewidths() const { return shift_ghz() / linewidth_ghz(); }

  /// Throws ValidationError on nonpositive Q, frequency, or depth outside (0, 1].
  void validate() const;
  bool operator==(const ResonatorParams &) const = default;
};

/// Notch lineshape |S| = 1 − depth / sqrt(1 + (2 (f − f_r) / κ)²).
double notch_transmission(double probe_ghz, double resonance_ghz, double linewidth_ghz, double depth);

}  // namespace fluxqa

#endif  // FLUXQA_DEVICE_RESONATOR_H
