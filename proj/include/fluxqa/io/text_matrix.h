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

#ifndef FLUXQA_IO_TEXT_MATRIX_H
#define FLUXQA_IO_TEXT_MATRIX_H

#include <Eigen/Dense>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fluxqa::io {

/// Plain-text matrix with an ordered `# key = value` header block.
///
/// Layout:
///
///     # fluxqa-matrix 1
///     # kind = scan
///     # <key> = <value>
///     # shape = <rows> <cols>
///     <row 0: cols values separated by single spaces>
///     ...
///
/// Numbers are written with 17 significant digits so a write/read cycle is
/// lossless and identical inputs give identical bytes.
struct TextMatrix {
  std::vector<std::pair<std::string, std::string>> header;
  Eigen::MatrixXd values;

  void set(const std::string &key, const std::string &value);
  void set(const std::string &key, double value);
  std::optional<std::string> get(const std::string &key) const;
  /// Throws ValidationError when missing.
  std::string require(const std::string &key) const;
  double require_double(const std::string &key) const;
};

std::string format_double(double value);
double parse_double(const std::string &text);

void write_text_matrix(std::ostream &out, const TextMatrix &matrix);
TextMatrix read_text_matrix(std::istream &in);

void save_text_matrix(const std::filesystem::path &path, const TextMatrix &matrix);
TextMatrix load_text_matrix(const std::filesystem::path &path);

}  // namespace fluxqa::io

#endif  // FLUXQA_IO_TEXT_MATRIX_H
