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

#ifndef FLUXQA_XTALK_AFFINE_H
#define FLUXQA_XTALK_AFFINE_H

#include <Eigen/Dense>
#include <array>
#include <filesystem>
#include <string>

namespace fluxqa::xtalk {

/// Affine map between corrected coordinates v and nominal control coordinates u
/// of two control lines:
///
///     u = T·v + offset,    v = T⁻¹·(u − offset)
///
/// T holds the fitted lattice basis (columns, nominal units per lattice unit),
/// so the feature lattice sits at integer v and each corrected axis moves one
/// loop flux only.
struct AffineCorrection {
  std::array<std::string, 2> lines;
  Eigen::Matrix2d T = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d T_inv = Eigen::Matrix2d::Identity();
  Eigen::Vector2d offset = Eigen::Vector2d::Zero();

  /// Throws ValidationError if T is singular.
  static AffineCorrection from_basis(std::array<std::string, 2> lines, const Eigen::Matrix2d &T,
                                     const Eigen::Vector2d &offset);
  static AffineCorrection identity(std::array<std::string, 2> lines);

  Eigen::Vector2d to_nominal(const Eigen::Vector2d &corrected) const { return T * corrected + offset; }
  Eigen::Vector2d to_corrected(const Eigen::Vector2d &nominal) const { return T_inv * (nominal - offset); }

  /// Correction equivalent to applying `inner` (fitted in this correction's
  /// corrected coordinates) and then this one.
  AffineCorrection compose(const AffineCorrection &inner) const;
};

std::string correction_to_json(const AffineCorrection &c);
AffineCorrection correction_from_json(const std::string &text);
void save_correction(const std::filesystem::path &path, const AffineCorrection &c);
AffineCorrection load_correction(const std::filesystem::path &path);

}  // namespace fluxqa::xtalk

#endif  // FLUXQA_XTALK_AFFINE_H
