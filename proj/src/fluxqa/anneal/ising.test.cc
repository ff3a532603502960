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


#include "fluxqa/anneal/ising.h"

#include <gtest/gtest.h>

#include <filesystem>

#include "corpus.h"
#include "fluxqa/anneal/schedule.h"
#include "fluxqa/error.h"

namespace fluxqa::anneal {
namespace {

TEST(Ising, ClassicalEnergyMatchesSpinSum) {
  for (const auto &[name, p] : testing::corpus()) {
    auto o = testing::to_oracle(p);
    for (uint32_t i = 0; i < (1u << p.n); ++i) {
      EXPECT_NEAR(classical_energy(p, i), oracle::classical_energy(o, i), 1e-14) << name;
    }
  }
}

TEST(Ising, GroundSpaceMatchesEnumeration) {
  for (const auto &[name, p] : testing::corpus()) {
    auto g = classical_ground(p);
    auto expect = oracle::ground_states(testing::to_oracle(p));
    EXPECT_EQ(g.states, std::vector<uint32_t>(expect.begin(), expect.end())) << name;
  }
}

TEST(Ising, K3AntiferromagnetHasSixGroundStates) {
  auto g = classical_ground(k3(1.0));
  EXPECT_EQ(g.states.size(), 6u);
  EXPECT_DOUBLE_EQ(g.energy, -1.0);
  for (uint32_t s : g.states) {
    EXPECT_NE(s, 0u);
    EXPECT_NE(s, 7u);
  }
  EXPECT_EQ(classical_ground(k3(-1.0)).states, (std::vector<uint32_t>{0, 7}));
}

TEST(Ising, SpinConvention) {
  // Bit (n-1-i) of the index is qubit i; a zero bit is spin up.
  EXPECT_EQ(spin(0b100, 0, 3), -1);
  EXPECT_EQ(spin(0b100, 2, 3), 1);
  IsingProblem single;
  single.h = {1.0};
  EXPECT_EQ(classical_ground(single).states, std::vector<uint32_t>{1});
}

TEST(Ising, ValidationRejectsBadProblems) {
  IsingProblem p = k3();
  p.J[{1, 1}] = 0.5;
  EXPECT_THROW(p.validate(), ValidationError);
  p = k3();
  p.J[{2, 1}] = 0.5;
  EXPECT_THROW(p.validate(), ValidationError);
  p = k3();
  p.h = {3.0, 0, 0};
  EXPECT_THROW(p.validate(), ValidationError);
  p = k3(1.5);
  EXPECT_THROW(p.validate(), ValidationError);
  p = IsingProblem{};
  p.n = 9;
  p.h.assign(9, 0.0);
  EXPECT_THROW(p.validate(), ValidationError);
  p.h.resize(2);
  p.n = 3;
  EXPECT_THROW(p.validate(), ValidationError);
}

TEST(Ising, TextRoundTripAndNamedProblems) {
  for (const auto &[name, p] : testing::corpus()) {
    EXPECT_EQ(problem_from_text(problem_to_text(p)), p) << name;
  }
  EXPECT_EQ(named_problem("k3_afm"), k3(1.0));
  EXPECT_THROW(named_problem("k5"), ValidationError);
  EXPECT_THROW(problem_from_text("h 0 1\n"), ValidationError);
  EXPECT_THROW(problem_from_text("n 2\nbogus\n"), ValidationError);
  auto path = std::filesystem::temp_directory_path() / "fluxqa_problem_test.ising";
  save_problem(path, k3(0.5, 0.1));
  EXPECT_EQ(load_problem(path), k3(0.5, 0.1));
  std::filesystem::remove(path);
}

TEST(Schedule, LinearEnvelopes) {
  auto s = AnnealSchedule::linear(100);
  EXPECT_DOUBLE_EQ(s.A(0), 5.0);
  EXPECT_DOUBLE_EQ(s.A(1), 0.0);
  EXPECT_DOUBLE_EQ(s.B(0), 0.0);
  EXPECT_DOUBLE_EQ(s.B(0.25), 1.25);
  EXPECT_DOUBLE_EQ(s.s_at(50), 0.5);
  EXPECT_DOUBLE_EQ(s.s_at(150), 1.0);
  EXPECT_NO_THROW(s.validate());
}

TEST(Schedule, TabulatedInterpolatesAndValidates) {
  Envelope a{{0, 0.5, 1}, {5, 1, 0}};
  Envelope b{{0, 1}, {0, 6}};
  auto s = AnnealSchedule::tabulated(a, b, 50);
  EXPECT_DOUBLE_EQ(s.A(0.25), 3.0);
  EXPECT_DOUBLE_EQ(s.B(0.5), 3.0);
  EXPECT_NO_THROW(s.validate());
  Envelope negative{{0, 1}, {5, -1}};
  EXPECT_THROW(AnnealSchedule::tabulated(negative, b, 50).validate(), ValidationError);
  Envelope partial{{0, 0.5}, {5, 0}};
  EXPECT_THROW(AnnealSchedule::tabulated(partial, b, 50).validate(), ValidationError);
  Envelope late{{0, 1}, {5, 1}};
  EXPECT_THROW(AnnealSchedule::tabulated(late, b, 50).validate(), ValidationError);
}

TEST(Schedule, RejectsBadTimes) {
  EXPECT_THROW(AnnealSchedule::linear(0).validate(), ValidationError);
  auto s = AnnealSchedule::linear(10);
  s.t_hold_ns = -1;
  EXPECT_THROW(s.validate(), ValidationError);
  EXPECT_THROW(schedule_kind_from_string("cubic"), ValidationError);
}

TEST(Schedule, LandauZenerSweepIsSigned) {
  auto s = AnnealSchedule::landau_zener(0.1, 5, 100);
  EXPECT_DOUBLE_EQ(s.A(0.3), 0.1);
  EXPECT_DOUBLE_EQ(s.B(0), -5);
  EXPECT_DOUBLE_EQ(s.B(1), 5);
  EXPECT_NO_THROW(s.validate());
}

TEST(Schedule, EnvelopeFileRoundTrip) {
  Envelope a{{0, 0.3, 1}, {5, 2.5, 0}};
  auto path = std::filesystem::temp_directory_path() / "fluxqa_envelope_test.txt";
  save_envelope(path, a, "A");
  EXPECT_EQ(load_envelope(path), a);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace fluxqa::anneal
