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


#include "fluxqa/io/text_matrix.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "fluxqa/error.h"

namespace fluxqa::io {
namespace {

TextMatrix sample() {
  TextMatrix m;
  m.set("kind", "example");
  m.set("step", 0.1);
  m.values.resize(2, 3);
  m.values << 1.0, -2.5, 1e-300, 0.1, 1.0 / 3.0, 42;
  return m;
}

TEST(TextMatrix, RoundTripIsExact) {
  std::stringstream ss;
  write_text_matrix(ss, sample());
  auto back = read_text_matrix(ss);
  EXPECT_EQ(back.require("kind"), "example");
  EXPECT_EQ(back.require_double("step"), 0.1);
  ASSERT_EQ(back.values.rows(), 2);
  ASSERT_EQ(back.values.cols(), 3);
  EXPECT_EQ(back.values, sample().values);
}

TEST(TextMatrix, OutputIsByteStable) {
  std::stringstream a, b;
  write_text_matrix(a, sample());
  write_text_matrix(b, sample());
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().rfind("# fluxqa-matrix 1", 0), 0u);
}

TEST(TextMatrix, SetOverwritesExistingKey) {
  TextMatrix m;
  m.set("a", "1");
  m.set("a", "2");
  EXPECT_EQ(m.header.size(), 1u);
  EXPECT_EQ(m.require("a"), "2");
  EXPECT_FALSE(m.get("b").has_value());
  EXPECT_THROW(m.require("b"), ValidationError);
}

TEST(TextMatrix, RejectsMalformedInput) {
  std::stringstream no_magic("1 2 3\n");
  EXPECT_THROW(read_text_matrix(no_magic), ValidationError);
  std::stringstream truncated("# fluxqa-matrix 1\n# shape = 2 2\n1 2\n");
  EXPECT_THROW(read_text_matrix(truncated), ValidationError);
  std::stringstream short_row("# fluxqa-matrix 1\n# shape = 1 3\n1 2\n");
  EXPECT_THROW(read_text_matrix(short_row), ValidationError);
  EXPECT_THROW(parse_double("abc"), ValidationError);
}

TEST(TextMatrix, SaveAndLoadFile) {
  auto path = std::filesystem::temp_directory_path() / "fluxqa_text_matrix_test.txt";
  save_text_matrix(path, sample());
  auto back = load_text_matrix(path);
  EXPECT_EQ(back.values, sample().values);
  std::filesystem::remove(path);
  EXPECT_THROW(load_text_matrix(path), ValidationError);
}

TEST(TextMatrix, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 7.0, -3e-17, 6.02214076e23}) {
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
}

}  // namespace
}  // namespace fluxqa::io
