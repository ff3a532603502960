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

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "fluxqa/error.h"

namespace fluxqa::io {

namespace {

constexpr const char *kMagic = "# fluxqa-matrix 1";

std::string trim(const std::string &s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return {};
  }
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void TextMatrix::set(const std::string &key, const std::string &value) {
  for (auto &[k, v] : header) {
    if (k == key) {
      v = value;
      return;
    }
  }
  header.emplace_back(key, value);
}

void TextMatrix::set(const std::string &key, double value) { set(key, format_double(value)); }

std::optional<std::string> TextMatrix::get(const std::string &key) const {
  for (const auto &[k, v] : header) {
    if (k == key) {
      return v;
    }
  }
  return std::nullopt;
}

std::string TextMatrix::require(const std::string &key) const {
  auto v = get(key);
  if (!v) {
    throw ValidationError("missing_header", "text matrix header is missing key '" + key + "'");
  }
  return *v;
}

double TextMatrix::require_double(const std::string &key) const { return parse_double(require(key)); }

std::string format_double(double value) { return fmt::format("{:.17g}", value); }

double parse_double(const std::string &text) {
  auto t = trim(text);
  double out = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ValidationError("bad_number", "cannot parse number '" + text + "'");
  }
  return out;
}

void write_text_matrix(std::ostream &out, const TextMatrix &matrix) {
  out << kMagic << '\n';
  for (const auto &[k, v] : matrix.header) {
    if (k.find('=') != std::string::npos || k.find('\n') != std::string::npos ||
        v.find('\n') != std::string::npos) {
      throw ValidationError("bad_header", "header entries may not contain '=' in keys or newlines");
    }
    out << "# " << k << " = " << v << '\n';
  }
  out << "# shape = " << matrix.values.rows() << ' ' << matrix.values.cols() << '\n';
  for (Eigen::Index r = 0; r < matrix.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.values.cols(); ++c) {
      if (c) {
        out << ' ';
      }
      out << format_double(matrix.values(r, c));
    }
    out << '\n';
  }
}

TextMatrix read_text_matrix(std::istream &in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kMagic) {
    throw ValidationError("bad_format", "not a fluxqa text matrix (missing magic line)");
  }
  TextMatrix m;
  long rows = -1;
  long cols = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] != '#') {
      break;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      continue;
    }
    auto key = trim(line.substr(1, eq - 1));
    auto value = trim(line.substr(eq + 1));
    if (key == "shape") {
      std::istringstream ss(value);
      ss >> rows >> cols;
      break;
    }
    m.header.emplace_back(key, value);
  }
  if (rows < 0 || cols < 0) {
    throw ValidationError("bad_format", "text matrix is missing its shape line");
  }
  m.values.resize(rows, cols);
  for (long r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) {
      throw ValidationError("bad_format", fmt::format("text matrix truncated at row {}", r));
    }
    std::istringstream ss(line);
    for (long c = 0; c < cols; ++c) {
      std::string tok;
      if (!(ss >> tok)) {
        throw ValidationError("bad_format", fmt::format("row {} has fewer than {} columns", r, cols));
      }
      m.values(r, c) = parse_double(tok);
    }
  }
  return m;
}

void save_text_matrix(const std::filesystem::path &path, const TextMatrix &matrix) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ValidationError("io_error", "cannot write " + path.string());
  }
  write_text_matrix(out, matrix);
}

TextMatrix load_text_matrix(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("io_error", "cannot read " + path.string());
  }
  return read_text_matrix(in);
}

}  // namespace fluxqa::io
