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

#ifndef FLUXQA_XTALK_LATTICE_H
#define FLUXQA_XTALK_LATTICE_H

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fluxqa/xtalk/affine.h"
#include "fluxqa/xtalk/scan.h"

namespace fluxqa::xtalk {

enum class CenterSource { kManual, kAutomatic };
std::string to_string(CenterSource source);

struct IndexedCenter {
  Eigen::Vector2d position;
  Eigen::Vector2i index;
};

/// Least-squares lattice u ≈ A·(m, n) + b over indexed centers.
struct LatticeFit {
  /// Columns are the primitive vectors, in scan coordinate units.
  Eigen::Matrix2d primitive_vectors = Eigen::Matrix2d::Identity();
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();
  double residual_rms = 0;
  int n_centers_used = 0;
  CenterSource center_source = CenterSource::kManual;
  /// One-sigma uncertainty of each entry of primitive_vectors (zero when the
  /// fit has no spare degrees of freedom).
  Eigen::Matrix2d primitive_stddev = Eigen::Matrix2d::Zero();
};

struct AffineFit {
  LatticeFit lattice;
  AffineCorrection correction;
};

/// Lattice basis estimated from the two strongest non-collinear peaks of the
/// windowed 2D Fourier spectrum of the scan.
struct SpectralBasis {
  /// Rows are reciprocal vectors (cycles per coordinate unit).
  Eigen::Matrix2d reciprocal;
  /// Columns are real-space primitive vectors, aligned to the scan axes.
  Eigen::Matrix2d basis;
  /// Number of lattice periods spanned by the scan along each reciprocal vector.
  Eigen::Vector2d periods_covered;
};

struct DetectionOptions {
  /// Detection threshold relative to the strongest smoothed feature.
  double threshold = 0.5;
  /// Pixels this close to the edge are not reported as centers.
  int border = 2;
  /// Gaussian smoothing width as a fraction of the shortest lattice period.
  double smoothing_fraction = 0.05;
};

/// Throws CalibrationInsufficient if the scan spans fewer than two periods
/// along either reciprocal direction or shows no periodic feature.
SpectralBasis estimate_basis_spectral(const ScanGrid2D &scan);

/// Feature centers (scan coordinates) with sub-pixel refinement. Non-maximum
/// suppression uses half the shortest lattice period. Throws
/// CalibrationInsufficient when fewer than three centers are found.
std::vector<Eigen::Vector2d> detect_centers_auto(const ScanGrid2D &scan, const DetectionOptions &options = {});

struct IndexAssignment {
  std::vector<IndexedCenter> accepted;
  std::vector<Eigen::Vector2d> rejected;
};

/// Rounds basis⁻¹·(center − reference) to integer lattice indices and rejects
/// centers whose rounding residual exceeds 0.25 lattice units (and duplicates
/// of an already-claimed index). The reference defaults to the center closest
/// to the centroid. Throws ValidationError("ambiguous_basis") for a
/// near-singular basis.
IndexAssignment assign_lattice_indices(const std::vector<Eigen::Vector2d> &centers, const Eigen::Matrix2d &basis_guess,
                                       std::optional<Eigen::Vector2d> reference = std::nullopt);

/// Ordinary least squares. Throws ValidationError with reason
/// "insufficient_centers" (< 3) or "collinear_centers" (rank-deficient indices).
AffineFit fit_affine(const std::vector<IndexedCenter> &centers, const std::array<std::string, 2> &lines,
                     CenterSource source = CenterSource::kManual);

/// Unimodular change of basis that makes the reciprocal vectors point as close
/// as possible to +x and +y. Returns the new basis and the integer matrix U
/// with new_basis = basis·U.
std::pair<Eigen::Matrix2d, Eigen::Matrix2i> align_basis_to_axes(const Eigen::Matrix2d &basis);

/// Reduced basis of the two shortest non-collinear center differences.
std::optional<Eigen::Matrix2d> basis_from_center_differences(const std::vector<Eigen::Vector2d> &centers);

struct AutoFitResult {
  SpectralBasis spectral;
  std::vector<Eigen::Vector2d> centers;
  IndexAssignment indexed;
  AffineFit fit;
};

/// Full automatic path: spectral basis, detection, indexing, fit, re-index
/// against the fitted lattice, refit, axis alignment.
AutoFitResult auto_fit(const ScanGrid2D &scan, const DetectionOptions &options = {});

/// Fit from user-supplied centers. When `indices` is empty they are proposed by
/// assign_lattice_indices against `basis_guess`, and any rejected center is an
/// error. The result is aligned to the scan axes.
AffineFit fit_manual_centers(const std::vector<Eigen::Vector2d> &centers, const std::vector<Eigen::Vector2i> &indices,
                             const std::optional<Eigen::Matrix2d> &basis_guess,
                             const std::array<std::string, 2> &lines);

}  // namespace fluxqa::xtalk

#endif  // FLUXQA_XTALK_LATTICE_H
