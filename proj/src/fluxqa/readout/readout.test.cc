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


#include "fluxqa/readout/readout.h"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "fluxqa/error.h"
#include "fluxqa/random.h"
#include "oracles.h"

namespace fluxqa::readout {
namespace {

constexpr double kPlanck = 6.62607015e-34;
constexpr double kElementaryCharge = 1.602176634e-19;

ShotEnsemble planted(double mean, double sigma, int n, uint64_t seed, SpinState s) {
  Rng rng(seed);
  ShotEnsemble e;
  e.prepared_state = s;
  e.integration_time_us = 1;
  for (int i = 0; i < n; ++i) e.voltages.push_back(mean + sigma * rng.normal());
  return e;
}

TEST(FluxSignal, HundredNanoampsFiftyPicohenry) {
  EXPECT_NEAR(qubit_flux_into_squid_wb(100, 50), 5e-18, 1e-30);
  double phi0 = kPlanck / (2 * kElementaryCharge);
  EXPECT_NEAR(qubit_flux_into_squid_mphi0(100, 50), 5e-18 / phi0 * 1e3, 1e-6);
  EXPECT_NEAR(qubit_flux_into_squid_mphi0(100, 50), 2.418, 5e-4);
}

TEST(FluxSignal, LargePersistentCurrent) {
  EXPECT_NEAR(qubit_flux_into_squid_mphi0(3000, 50), 72.54, 5e-3);
  EXPECT_THROW(qubit_flux_into_squid_mphi0(0, 50), ValidationError);
  EXPECT_THROW(qubit_flux_into_squid_mphi0(100, -1), ValidationError);
}

TEST(Transmission, MinimumOnResonance) {
  ResonatorParams p;
  EXPECT_NEAR(resonator_transmission(p, SpinState::kDown, p.f_down_ghz), 1 - p.depth, 1e-15);
  double up = resonator_transmission(p, SpinState::kUp, p.f_down_ghz);
  EXPECT_GT(up, 0.99);
  EXPECT_LE(up, 1.0);
  EXPECT_NEAR(p.shift_in_linewidths(), 14.0, 1e-9);
}

TEST(Transmission, SymmetricAndMonotone) {
  ResonatorParams p;
  double fr = resonance_ghz(p, SpinState::kUp);
  EXPECT_NEAR(fr - p.f_down_ghz, 0.015, 1e-15);
  double last = -1;
  for (int k = 0; k < 20; ++k) {
    double d = k * 1e-4;
    double a = resonator_transmission(p, SpinState::kUp, fr + d);
    EXPECT_NEAR(a, resonator_transmission(p, SpinState::kUp, fr - d), 1e-13);
    EXPECT_GE(a, last);
    last = a;
  }
}

TEST(Shots, NoiseFollowsSquareRootLaw) {
  EXPECT_NEAR(noise_sigma(1.0, 10.0) / noise_sigma(1.0, 2.5), 0.5, 1e-15);
  EXPECT_THROW(noise_sigma(1.0, 0.0), ValidationError);
}

TEST(Shots, DeterministicPerSeed) {
  ResonatorParams p;
  ShotSettings s;
  EXPECT_EQ(single_shot(p, SpinState::kUp, s, 5), single_shot(p, SpinState::kUp, s, 5));
  auto a = simulate_shots(p, SpinState::kDown, s, 100, 3);
  auto b = simulate_shots(p, SpinState::kDown, s, 100, 3);
  EXPECT_EQ(a.voltages, b.voltages);
  EXPECT_THROW(simulate_shots(p, SpinState::kDown, s, 0, 3), ValidationError);
}

TEST(Discriminate, DefaultsGiveElevenSigma) {
  ResonatorParams p;
  ShotSettings s;
  auto down = simulate_shots(p, SpinState::kDown, s, 100000, 1);
  auto up = simulate_shots(p, SpinState::kUp, s, 100000, 2);
  auto r = discriminate(down, up);
  EXPECT_NEAR(r.separation_sigma, 11.0, 1.1);
  EXPECT_EQ(r.misclassified_down + r.misclassified_up, 0);
  EXPECT_LT(r.analytic_error, 1e-4);
  EXPECT_GT(r.fidelity_estimate, 0.9999);
  EXPECT_GE(r.fidelity_estimate, 1 - r.analytic_error);
  EXPECT_GT(r.mean_up, r.mean_down);
  EXPECT_GT(r.threshold, r.mean_down);
  EXPECT_LT(r.threshold, r.mean_up);
}

TEST(Discriminate, SeparationGrowsWithIntegrationTime) {
  ResonatorParams p;
  double last = 0;
  for (double t : {0.5, 1.0, 2.0, 5.0, 10.0, 20.0}) {
    ShotSettings s;
    s.integration_time_us = t;
    auto r = discriminate(simulate_shots(p, SpinState::kDown, s, 2000, 11),
                          simulate_shots(p, SpinState::kUp, s, 2000, 11));
    EXPECT_GE(r.separation_sigma, last * 0.97);
    last = r.separation_sigma;
  }
  EXPECT_GT(last, 14.0);
}

TEST(Discriminate, DeltaLikeEnsembles) {
  ShotEnsemble down, up;
  down.voltages.assign(1000, 0.2);
  up.voltages.assign(1000, 0.8);
  auto r = discriminate(down, up);
  EXPECT_DOUBLE_EQ(r.fidelity_estimate, 1.0);
  EXPECT_NEAR(r.threshold, 0.5, 1e-12);
}

TEST(Discriminate, TwoSigmaMatchesErfcOracle) {
  auto down = planted(0.0, 1.0, 20000, 17, SpinState::kDown);
  auto up = planted(2.0, 1.0, 20000, 18, SpinState::kUp);
  auto r = discriminate(down, up);
  EXPECT_NEAR(analytic_error(2.0), 0.5 * oracle::erfc_quadrature(1 / std::sqrt(2.0)), 1e-10);
  EXPECT_NEAR(analytic_error(2.0), 0.1587, 1e-4);
  double p = 0.5 * oracle::erfc_quadrature(r.separation_sigma / (2 * std::sqrt(2.0)));
  double mc = 1 - r.fidelity_estimate;
  double se = std::sqrt(p * (1 - p) / 40000.0);
  EXPECT_LT(std::abs(mc - p), 3 * se);
  EXPECT_FALSE(r.low_confidence);
}

TEST(Discriminate, OverlapFlagsLowConfidence) {
  auto r = discriminate(planted(0.0, 1.0, 1000, 1, SpinState::kDown), planted(0.5, 1.0, 1000, 2, SpinState::kUp));
  EXPECT_TRUE(r.low_confidence);
  EXPECT_THROW(discriminate(planted(0, 1, 10, 1, SpinState::kDown), planted(1, 1, 10, 2, SpinState::kUp)),
               ValidationError);
}

TEST(Discriminate, ElevenSigmaAnalyticError) {
  EXPECT_NEAR(analytic_error(11.0) / 1.9e-8, 1.0, 0.05);
  EXPECT_NEAR(analytic_error(11.0), 0.5 * oracle::erfc_quadrature(11.0 / (2 * std::sqrt(2.0))), 1e-15);
}

TEST(Backaction, CouplerPenalty) {
  ResonatorParams p;
  EXPECT_DOUBLE_EQ(readout_backaction_t1_us(p, 3.5), 3.5);
  p.coupler_engaged = true;
  EXPECT_DOUBLE_EQ(readout_backaction_t1_us(p, 3.5), 0.35);
  EXPECT_THROW(readout_backaction_t1_us(p, 0.0), ValidationError);
}

TEST(Histogram, CountsEveryShot) {
  ResonatorParams p;
  ShotSettings s;
  auto down = simulate_shots(p, SpinState::kDown, s, 5000, 1);
  auto up = simulate_shots(p, SpinState::kUp, s, 4000, 2);
  auto h = histogram(down, up, 50);
  EXPECT_EQ(h.edges.size(), 51u);
  long nd = 0, nu = 0;
  for (long c : h.counts_down) nd += c;
  for (long c : h.counts_up) nu += c;
  EXPECT_EQ(nd, 5000);
  EXPECT_EQ(nu, 4000);
}

TEST(Shots, FileRoundTrip) {
  ResonatorParams p;
  auto shots = simulate_shots(p, SpinState::kUp, ShotSettings{}, 64, 8);
  auto path = std::filesystem::temp_directory_path() / "fluxqa_shots_test.txt";
  save_shots(path, shots);
  auto back = load_shots(path);
  EXPECT_EQ(back.voltages, shots.voltages);
  EXPECT_EQ(back.prepared_state, SpinState::kUp);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace fluxqa::readout
