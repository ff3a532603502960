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


#include "fluxqa/anneal/evolve.h"

#include <gtest/gtest.h>

#include <cmath>

#include "corpus.h"
#include "fluxqa/anneal/spectrum.h"
#include "fluxqa/error.h"

namespace fluxqa::anneal {
namespace {

IsingProblem single(double h) {
  IsingProblem p;
  p.h = {h};
  return p;
}

NoiseSpec dephasing(DecoherenceBasis basis, double rate) {
  NoiseSpec n;
  n.basis = basis;
  n.dephasing_rate_per_us = rate;
  return n;
}

TEST(Closed, StationaryStateUnderConstantDriver) {
  auto p = k3(0.5, 0.1);
  auto sched = AnnealSchedule::constant(4.0, 0.0, 250);
  auto psi0 = ground_state(p, sched);
  auto r = evolve_closed(p, sched, psi0);
  // Integrator norm loss is tracked by norm_drift; compare directions only.
  EXPECT_NEAR(std::norm(psi0.dot(r.state)) / r.state.squaredNorm(), 1.0, 1e-8);
  EXPECT_LT(r.norm_drift, 1e-6);
}

TEST(Closed, InitialStateIsUniformSuperposition) {
  auto psi = ground_state(k3(), AnnealSchedule::linear(10));
  for (Eigen::Index i = 0; i < psi.size(); ++i) EXPECT_NEAR(std::abs(psi(i)), 1 / std::sqrt(8.0), 1e-12);
}

TEST(Closed, K3AdiabaticSuccess) {
  auto p = k3(1.0);
  for (double tf : {100.0, 400.0}) {
    auto r = evolve_closed(p, AnnealSchedule::linear(tf));
    EXPECT_GE(success_probability(r.state, p), 0.99) << tf;
    EXPECT_LT(r.norm_drift, 1e-6);
  }
}

TEST(Closed, SingleQubitEndsInMinimizingState) {
  auto p = single(1.0);
  auto r = evolve_closed(p, AnnealSchedule::linear(100));
  EXPECT_GE(success_probability(r.state, p), 0.99);
  EXPECT_GE(populations(r.state)(1), 0.99);
}

TEST(Closed, LandauZenerMonotoneAndClosedForm) {
  const double gap = 0.1, sweep = 5.0;
  auto p = single(1.0);
  double last = 1.0;
  for (double tf : {20.0, 50.0, 100.0, 150.0, 200.0}) {
    auto r = evolve_closed(p, AnnealSchedule::landau_zener(gap, sweep, tf));
    double excitation = 1 - success_probability(r.state, p);
    EXPECT_LT(excitation, last) << tf;
    last = excitation;
    if (tf >= 50) {
      double expect = oracle::landau_zener_excitation(gap, 2 * sweep / tf);
      EXPECT_NEAR(excitation / expect, 1.0, 0.1) << tf;
    }
  }
}

TEST(Closed, AdiabaticLimitAlongDoublingSequence) {
  IsingProblem p = k3(0.8, 0.0);
  p.h = {0.3, -0.2, 0.1};
  double last = 0;
  for (double tf : {5.0, 10.0, 20.0, 40.0, 80.0}) {
    double s = success_probability(evolve_closed(p, AnnealSchedule::linear(tf)).state, p);
    EXPECT_GE(s, last - 1e-3) << tf;
    last = s;
  }
  EXPECT_GT(last, 0.99);
}

TEST(Closed, RejectsBadInitialState) {
  auto p = k3();
  Eigen::VectorXcd bad = Eigen::VectorXcd::Ones(8);
  EXPECT_THROW(evolve_closed(p, AnnealSchedule::linear(10), bad), ValidationError);
  EXPECT_THROW(evolve_closed(p, AnnealSchedule::linear(-1)), ValidationError);
}

TEST(Success, ClassicalGroundAndMixedState) {
  auto p = k3(1.0);
  StateVector e = StateVector::Zero(8);
  e(1) = 1;
  EXPECT_DOUBLE_EQ(success_probability(e, p), 1.0);
  DensityMatrix mixed = DensityMatrix::Identity(8, 8) / 8.0;
  EXPECT_NEAR(success_probability(mixed, p), 0.75, 1e-15);
  e.setZero();
  e(0) = 1;
  EXPECT_DOUBLE_EQ(success_probability(e, p), 0.0);
}

TEST(Open, ZeroRatesMatchClosedEvolution) {
  auto p = k3(1.0);
  auto sched = AnnealSchedule::linear(20);
  auto closed = evolve_closed(p, sched);
  auto open = evolve_open(p, sched, NoiseSpec{});
  DensityMatrix rho = closed.state * closed.state.adjoint();
  EXPECT_LT((open.rho - rho).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT(open.trace_error, 1e-6);
  EXPECT_LT(open.hermiticity_error, 1e-10);
  EXPECT_GT(open.min_eigenvalue, -1e-8);
}

TEST(Open, EigenbasisDephasingIsInnocuous) {
  auto p = k3(1.0);
  auto sched = AnnealSchedule::linear(20);
  double closed = success_probability(evolve_closed(p, sched).state, p);
  auto eig = evolve_open(p, sched, dephasing(DecoherenceBasis::kInstantaneousEigenbasis, 50));
  auto comp = evolve_open(p, sched, dephasing(DecoherenceBasis::kComputational, 50));
  double s_eig = success_probability(eig.rho, p);
  double s_comp = success_probability(comp.rho, p);
  EXPECT_NEAR(s_eig, closed, 1e-3);
  EXPECT_LT(s_comp, s_eig);
  EXPECT_GE(s_eig, s_comp - 1e-6);
  EXPECT_LT(comp.trace_error, 1e-6);
  EXPECT_GT(comp.min_eigenvalue, -1e-8);
}

TEST(Open, BasisOrderingOnCorpus) {
  for (const auto &[name, p] : testing::corpus()) {
    auto sched = AnnealSchedule::linear(10);
    double e = success_probability(evolve_open(p, sched, dephasing(DecoherenceBasis::kInstantaneousEigenbasis, 20)).rho, p);
    double c = success_probability(evolve_open(p, sched, dephasing(DecoherenceBasis::kComputational, 20)).rho, p);
    EXPECT_GE(e, c - 1e-6) << name;
  }
}

TEST(Open, DimensionGuard) {
  IsingProblem p;
  p.n = 7;
  p.h.assign(7, 0.0);
  EXPECT_THROW(evolve_open(p, AnnealSchedule::linear(1), NoiseSpec{}), ValidationError);
}

TEST(Relaxation, DetailedBalance) {
  for (bool ohmic : {true, false}) {
    RelaxationSpec spec;
    spec.enabled = true;
    spec.ohmic = ohmic;
    for (double t : {0.05, 0.5, 2.0}) {
      spec.bath_temperature_ghz = t;
      for (double w : {1e-6, 0.01, 0.3, 1.0, 4.0}) {
        double ratio = relaxation_rate(spec, w) / relaxation_rate(spec, -w);
        EXPECT_NEAR(ratio / std::exp(w / t), 1.0, 1e-12) << ohmic << " " << t << " " << w;
      }
    }
    EXPECT_GT(relaxation_rate(spec, 0.0), 0.0);
  }
}

TEST(Relaxation, ZeroTemperatureLimitMatchesNoRelaxation) {
  auto p = k3(1.0);
  auto sched = AnnealSchedule::linear(20);
  NoiseSpec cold;
  cold.relaxation.enabled = true;
  cold.relaxation.coupling_rate_per_us = 10;
  cold.relaxation.bath_temperature_ghz = 1e-3;
  double none = success_probability(evolve_open(p, sched, NoiseSpec{}).rho, p);
  double frozen = success_probability(evolve_open(p, sched, cold).rho, p);
  EXPECT_NEAR(frozen, none, 1e-3);

  NoiseSpec hot = cold;
  hot.relaxation.bath_temperature_ghz = 10 * find_min_gap(p, sched).gap;
  double warm = success_probability(evolve_open(p, sched, hot).rho, p);
  EXPECT_LT(warm, frozen);
}

TEST(Relaxation, HoldReachesGibbsWeights) {
  auto p = k3(0.6, 0.2);
  p.h = {0.2, -0.3, 0.1};
  auto sched = AnnealSchedule::linear(10);
  sched.t_hold_ns = 50;
  NoiseSpec noise;
  noise.relaxation.enabled = true;
  noise.relaxation.coupling_rate_per_us = 100;
  noise.relaxation.bath_temperature_ghz = 5;
  auto r = evolve_open(p, sched, noise);
  auto pops = populations(r.rho);
  auto o = testing::to_oracle(p);
  std::vector<double> energies;
  for (unsigned i = 0; i < 8; ++i) energies.push_back(sched.B(1) / 2 * oracle::classical_energy(o, i));
  auto w = oracle::gibbs(energies, 5.0);
  auto lib = gibbs_populations(p, sched, 5.0);
  for (int i = 0; i < 8; ++i) {
    EXPECT_NEAR(pops(i), w[static_cast<size_t>(i)], 1e-3);
    EXPECT_NEAR(lib(i), w[static_cast<size_t>(i)], 1e-14);
  }
}

TEST(Thermal, SweepIsNonincreasing) {
  auto p = k3(1.0);
  NoiseSpec noise;
  noise.relaxation.coupling_rate_per_us = 10;
  auto curve = thermal_depopulation_sweep(p, AnnealSchedule::linear(20), noise, {0.01, 1.0, 10.0, 80.0});
  ASSERT_EQ(curve.size(), 4u);
  for (size_t i = 1; i < curve.size(); ++i) {
    EXPECT_LE(curve[i].success, curve[i - 1].success + 1e-3);
  }
  EXPECT_LT(curve.back().success, curve.front().success);
  EXPECT_THROW(thermal_depopulation_sweep(p, AnnealSchedule::linear(20), noise, {0.1, 1.0}), ValidationError);
}

TEST(Noise, Validation) {
  NoiseSpec n;
  n.dephasing_rate_per_us = -1;
  EXPECT_THROW(n.validate(), ValidationError);
  n = NoiseSpec{};
  n.relaxation.enabled = true;
  n.relaxation.bath_temperature_ghz = 0;
  EXPECT_THROW(n.validate(), ValidationError);
  EXPECT_EQ(decoherence_basis_from_string("computational"), DecoherenceBasis::kComputational);
  EXPECT_EQ(decoherence_basis_from_string(to_string(DecoherenceBasis::kInstantaneousEigenbasis)),
            DecoherenceBasis::kInstantaneousEigenbasis);
  EXPECT_THROW(decoherence_basis_from_string("pointer"), ValidationError);
}

}  // namespace
}  // namespace fluxqa::anneal
