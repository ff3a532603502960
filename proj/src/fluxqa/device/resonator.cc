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

#include "fluxqa/device/resonator.h"

#include <cmath>

#include "fluxqa/error.h"

namespace fluxqa {

void ResonatorParams::validate() const {
  if (!(f_down_ghz > 0) || !(loaded_q > 0)) {
    throw ValidationError("bad_resonator", "resonator frequency and loaded Q must be positive");
  }
  if (!(depth > 0) || depth > 1) {
    throw ValidationError("bad_resonator", "resonator depth must lie in (0, 1]");
  }
  if (!(coupler_penalty_factor >= 1)) {
    throw ValidationError("bad_resonator", "coupler penalty factor must be >= 1");
  }
}

double notch_transmission(double probe_ghz, double resonance_ghz, double linewidth_ghz, double depth) {
  double x = 2.0 * (probe_ghz - resonance_ghz) / linewidth_ghz;
  return 1.0 - depth / std::sqrt(1.0 + x * x);
}

}  // namespace fluxqa
