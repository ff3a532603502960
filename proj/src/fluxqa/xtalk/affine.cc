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

#include "fluxqa/xtalk/affine.h"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "fluxqa/error.h"

namespace fluxqa::xtalk {

AffineCorrection AffineCorrection::from_basis(std::array<std::string, 2> lines, const Eigen::Matrix2d &T,
                                              const Eigen::Vector2d &offset) {
  double scale = T.cwiseAbs().maxCoeff();
  if (!T.allFinite() || !offset.allFinite() || !(std::abs(T.determinant()) > 1e-12 * scale * scale)) {
    throw ValidationError("singular_correction", "correction matrix is singular or not finite");
  }
  AffineCorrection c;
  c.lines = std::move(lines);
  c.T = T;
  c.T_inv = T.inverse();
  c.offset = offset;
  return c;
}

AffineCorrection AffineCorrection::identity(std::array<std::string, 2> lines) {
  return from_basis(std::move(lines), Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero());
}

AffineCorrection AffineCorrection::compose(const AffineCorrection &inner) const {
  if (inner.lines != lines) {
    throw ValidationError("line_mismatch", "cannot compose corrections for different control lines");
  }
  return from_basis(lines, T * inner.T, T * inner.offset + offset);
}

namespace {

using nlohmann::json;

json matrix_json(const Eigen::Matrix2d &m) {
  return json::array({json::array({m(0, 0), m(0, 1)}), json::array({m(1, 0), m(1, 1)})});
}

Eigen::Matrix2d matrix_from(const json &j) {
  Eigen::Matrix2d m;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      m(r, c) = j.at(r).at(c).get<double>();
    }
  }
  return m;
}

}  // namespace

std::string correction_to_json(const AffineCorrection &c) {
  json j;
  j["format"] = "fluxqa-affine-correction 1";
  j["lines"] = c.lines;
  j["T"] = matrix_json(c.T);
  j["T_inv"] = matrix_json(c.T_inv);
  j["offset"] = json::array({c.offset(0), c.offset(1)});
  return j.dump(2) + "\n";
}

AffineCorrection correction_from_json(const std::string &text) {
  try {
    auto j = json::parse(text);
    auto lines = j.at("lines").get<std::array<std::string, 2>>();
    Eigen::Vector2d offset(j.at("offset").at(0).get<double>(), j.at("offset").at(1).get<double>());
    auto c = AffineCorrection::from_basis(lines, matrix_from(j.at("T")), offset);
    if (j.contains("T_inv")) {
      // Keep the stored inverse so a load/save cycle is byte-stable.
      c.T_inv = matrix_from(j.at("T_inv"));
    }
    return c;
  } catch (const json::exception &e) {
    throw ValidationError("bad_correction", std::string("malformed correction document: ") + e.what());
  }
}

void save_correction(const std::filesystem::path &path, const AffineCorrection &c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ValidationError("io_error", "cannot write " + path.string());
  }
  out << correction_to_json(c);
}

AffineCorrection load_correction(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("io_error", "cannot read " + path.string());
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return correction_from_json(ss.str());
}

}  // namespace fluxqa::xtalk
