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

#ifndef FLUXQA_UNITS_H
#define FLUXQA_UNITS_H

#include <numbers>

/// Repo-wide unit conventions.
///
/// Loop flux is in units of the flux quantum (Φ0), control-line current in mA,
/// persistent current in nA, frequency and energy in GHz (h = 1), and time in ns
/// internally. Interfaces that take μs say so in the parameter name.
namespace fluxqa::units {

/// SI defining constants; the flux quantum h/2e follows exactly.
inline constexpr double kPlanckJs = 6.62607015e-34;
inline constexpr double kElementaryChargeC = 1.602176634e-19;
inline constexpr double kFluxQuantumWb = kPlanckJs / (2.0 * kElementaryChargeC);

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double kNsPerUs = 1e3;
inline constexpr double kNsPerS = 1e9;
inline constexpr double kMhzPerGhz = 1e3;

constexpr double us_to_ns(double us) { return us * kNsPerUs; }
constexpr double ns_to_us(double ns) { return ns / kNsPerUs; }
constexpr double mhz_to_ghz(double mhz) { return mhz / kMhzPerGhz; }
constexpr double ghz_to_mhz(double ghz) { return ghz * kMhzPerGhz; }

/// Rate in 1/μs to rate in 1/ns.
constexpr double per_us_to_per_ns(double rate) { return rate / kNsPerUs; }

}  // namespace fluxqa::units

#endif  // FLUXQA_UNITS_H
