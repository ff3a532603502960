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


#ifndef FLUXQA_TESTS_CORPUS_H
#define FLUXQA_TESTS_CORPUS_H

#include <algorithm>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "fluxqa/anneal/ising.h"
#include "oracles.h"

namespace fluxqa::testing {

inline std::filesystem::path corpus_dir() { return FLUXQA_CORPUS_DIR; }

// Every problem file in the corpus, sorted by name.
inline std::vector<std::pair<std::string, anneal::IsingProblem>> corpus() {
  std::vector<std::pair<std::string, anneal::IsingProblem>> out;
  for (const auto &entry : std::filesystem::directory_iterator(corpus_dir())) {
    if (entry.path().extension() == ".ising") {
      out.emplace_back(entry.path().stem().string(), anneal::load_problem(entry.path()));
    }
  }
  std::sort(out.begin(), out.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
  return out;
}

inline oracle::Ising to_oracle(const anneal::IsingProblem &p) {
  oracle::Ising o;
  o.n = p.n;
  o.h = p.h;
  o.J = p.J;
  return o;
}

}  // namespace fluxqa::testing

#endif  // FLUXQA_TESTS_CORPUS_H
