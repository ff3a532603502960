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

#include "fluxqa/xtalk/lattice.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>

#include "fluxqa/error.h"
#include "fluxqa/units.h"

namespace fluxqa::xtalk {

namespace {

constexpr double kIndexResidualLimit = 0.25;
constexpr double kMinPeriods = 2.0;
// Reciprocal peaks must be at least this far from collinear (|sin angle|).
constexpr double kMinPeakSine = 0.5;
constexpr double kStrongPeakFraction = 0.1;
constexpr int kQuadWindow = 2;
// Symmetry refinement may move a center at most this many pixels.
constexpr double kMaxSymmetryShift = 2.0;

double median(std::vector<double> v) {
  auto mid = v.begin() + static_cast<long>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

/// Dips become positive features.
Eigen::MatrixXd feature_map(const ScanGrid2D &scan) {
  std::vector<double> all(scan.values.data(), scan.values.data() + scan.values.size());
  double base = median(std::move(all));
  return (base - scan.values.array()).matrix();
}

double cross2(const Eigen::Vector2d &a, const Eigen::Vector2d &b) { return a(0) * b(1) - a(1) * b(0); }

/// Windowed, weighted-mean-removed scan whose Fourier transform can be
/// evaluated at arbitrary (kx, ky).
class WindowedSpectrum {
 public:
  explicit WindowedSpectrum(const ScanGrid2D &scan) {
    Eigen::MatrixXd f = feature_map(scan);
    const auto ny = f.rows();
    const auto nx = f.cols();
    Eigen::VectorXd wx(nx);
    Eigen::VectorXd wy(ny);
    for (Eigen::Index j = 0; j < nx; ++j) {
      wx(j) = 0.5 - 0.5 * std::cos(units::kTwoPi * static_cast<double>(j) / static_cast<double>(nx - 1));
    }
    for (Eigen::Index i = 0; i < ny; ++i) {
      wy(i) = 0.5 - 0.5 * std::cos(units::kTwoPi * static_cast<double>(i) / static_cast<double>(ny - 1));
    }
    Eigen::MatrixXd w = wy * wx.transpose();
    double mean = (w.array() * f.array()).sum() / w.sum();
    g_ = (w.array() * (f.array() - mean)).matrix();
    x_.resize(nx);
    y_.resize(ny);
    for (Eigen::Index j = 0; j < nx; ++j) {
      x_(j) = scan.axis_x.step() * static_cast<double>(j);
    }
    for (Eigen::Index i = 0; i < ny; ++i) {
      y_(i) = scan.axis_y.step() * static_cast<double>(i);
    }
  }

  double power(double kx, double ky) const {
    Eigen::VectorXcd ex(x_.size());
    Eigen::VectorXcd ey(y_.size());
    for (Eigen::Index j = 0; j < x_.size(); ++j) {
      ex(j) = std::polar(1.0, -units::kTwoPi * kx * x_(j));
    }
    for (Eigen::Index i = 0; i < y_.size(); ++i) {
      ey(i) = std::polar(1.0, -units::kTwoPi * ky * y_(i));
    }
    std::complex<double> v = ey.transpose() * (g_.cast<std::complex<double>>() * ex);
    return std::norm(v);
  }

  /// |F|² on the grid kx = kx_values, ky = ky_values; rows index ky.
  Eigen::MatrixXd power_grid(const Eigen::VectorXd &kx_values, const Eigen::VectorXd &ky_values) const {
    Eigen::MatrixXcd ex(x_.size(), kx_values.size());
    Eigen::MatrixXcd ey(y_.size(), ky_values.size());
    for (Eigen::Index a = 0; a < kx_values.size(); ++a) {
      for (Eigen::Index j = 0; j < x_.size(); ++j) {
        ex(j, a) = std::polar(1.0, -units::kTwoPi * kx_values(a) * x_(j));
      }
    }
    for (Eigen::Index b = 0; b < ky_values.size(); ++b) {
      for (Eigen::Index i = 0; i < y_.size(); ++i) {
        ey(i, b) = std::polar(1.0, -units::kTwoPi * ky_values(b) * y_(i));
      }
    }
    Eigen::MatrixXcd rows = g_.cast<std::complex<double>>() * ex;
    Eigen::MatrixXcd full = ey.transpose() * rows;
    return full.cwiseAbs2();
  }

 private:
  Eigen::MatrixXd g_;
  Eigen::VectorXd x_;
  Eigen::VectorXd y_;
};

Eigen::Vector2d refine_peak(const WindowedSpectrum &spectrum, Eigen::Vector2d k, double step) {
  double best = spectrum.power(k(0), k(1));
  for (double h = step / 2; h > step / 512; h /= 2) {
    bool moved = true;
    int guard = 0;
    while (moved && guard++ < 16) {
      moved = false;
      for (int dx = -1; dx <= 1; ++dx) {
        for (int dy = -1; dy <= 1; ++dy) {
          if (dx == 0 && dy == 0) {
            continue;
          }
          Eigen::Vector2d c = k + h * Eigen::Vector2d(dx, dy);
          double p = spectrum.power(c(0), c(1));
          if (p > best) {
            best = p;
            k = c;
            moved = true;
          }
        }
      }
    }
  }
  return k;
}

Eigen::Matrix2i unimodular_inverse(const Eigen::Matrix2i &u) {
  int det = u(0, 0) * u(1, 1) - u(0, 1) * u(1, 0);
  Eigen::Matrix2i inv;
  inv << u(1, 1), -u(0, 1), -u(1, 0), u(0, 0);
  return inv * det;
}

/// Separable Gaussian smoothing with edge renormalization.
Eigen::MatrixXd smooth(const Eigen::MatrixXd &f, double sigma_x, double sigma_y) {
  auto kernel = [](double sigma) {
    int radius = std::max(1, static_cast<int>(std::ceil(3 * sigma)));
    Eigen::VectorXd k(2 * radius + 1);
    for (int t = -radius; t <= radius; ++t) {
      k(t + radius) = std::exp(-0.5 * t * t / (sigma * sigma));
    }
    return k;
  };
  auto pass = [](const Eigen::MatrixXd &in, const Eigen::VectorXd &k, bool along_cols) {
    Eigen::MatrixXd out(in.rows(), in.cols());
    const int radius = static_cast<int>(k.size() / 2);
    const Eigen::Index n = along_cols ? in.cols() : in.rows();
    for (Eigen::Index r = 0; r < in.rows(); ++r) {
      for (Eigen::Index c = 0; c < in.cols(); ++c) {
        Eigen::Index pos = along_cols ? c : r;
        double acc = 0;
        double norm = 0;
        for (int t = -radius; t <= radius; ++t) {
          Eigen::Index q = pos + t;
          if (q < 0 || q >= n) {
            continue;
          }
          double v = along_cols ? in(r, q) : in(q, c);
          acc += k(t + radius) * v;
          norm += k(t + radius);
        }
        out(r, c) = acc / norm;
      }
    }
    return out;
  };
  return pass(pass(f, kernel(sigma_x), true), kernel(sigma_y), false);
}

/// Stationary point of a least-squares quadratic over a (2w+1)² window, in
/// pixel offsets. Returns nullopt when the surface is not a local maximum.
std::optional<Eigen::Vector2d> quadratic_peak(const Eigen::MatrixXd &f, Eigen::Index row, Eigen::Index col) {
  static const Eigen::MatrixXd pinv = [] {
    const int side = 2 * kQuadWindow + 1;
    Eigen::MatrixXd design(side * side, 6);
    int r = 0;
    for (int dy = -kQuadWindow; dy <= kQuadWindow; ++dy) {
      for (int dx = -kQuadWindow; dx <= kQuadWindow; ++dx) {
        design.row(r++) << 1, dx, dy, dx * dx, dx * dy, dy * dy;
      }
    }
    return Eigen::MatrixXd(design.completeOrthogonalDecomposition().pseudoInverse());
  }();
  if (row < kQuadWindow || col < kQuadWindow || row + kQuadWindow >= f.rows() || col + kQuadWindow >= f.cols()) {
    return std::nullopt;
  }
  const int side = 2 * kQuadWindow + 1;
  Eigen::VectorXd z(side * side);
  int r = 0;
  for (int dy = -kQuadWindow; dy <= kQuadWindow; ++dy) {
    for (int dx = -kQuadWindow; dx <= kQuadWindow; ++dx) {
      z(r++) = f(row + dy, col + dx);
    }
  }
  Eigen::VectorXd c = pinv * z;
  Eigen::Matrix2d hess;
  hess << 2 * c(3), c(4), c(4), 2 * c(5);
  if (!(hess.determinant() > 0 && hess(0, 0) < 0)) {
    return std::nullopt;
  }
  Eigen::Vector2d offset = hess.inverse() * (-Eigen::Vector2d(c(1), c(2)));
  if (offset.cwiseAbs().maxCoeff() > 1.0) {
    return std::nullopt;
  }
  return offset;
}

/// Weighted centroid of the connected region around a local maximum where
/// the map exceeds half the maximum. The features are point-symmetric, so the
/// centroid is unbiased. Returns nullopt when the region reaches the edge.
std::optional<Eigen::Vector2d> centroid_peak(const Eigen::MatrixXd &f, Eigen::Index row, Eigen::Index col,
                                             double max_rx, double max_ry) {
  const double level = 0.5 * f(row, col);
  const Eigen::Index ny = f.rows();
  const Eigen::Index nx = f.cols();
  std::vector<std::pair<Eigen::Index, Eigen::Index>> stack{{row, col}};
  std::vector<char> seen(static_cast<size_t>(nx * ny), 0);
  seen[static_cast<size_t>(row * nx + col)] = 1;
  double sw = 0, sx = 0, sy = 0;
  while (!stack.empty()) {
    auto [r, c] = stack.back();
    stack.pop_back();
    if (r == 0 || c == 0 || r == ny - 1 || c == nx - 1) {
      return std::nullopt;
    }
    double w = f(r, c) - level;
    sw += w;
    sx += w * static_cast<double>(c - col);
    sy += w * static_cast<double>(r - row);
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        Eigen::Index rr = r + dr;
        Eigen::Index cc = c + dc;
        if (rr < 0 || cc < 0 || rr >= ny || cc >= nx) {
          continue;
        }
        auto &mark = seen[static_cast<size_t>(rr * nx + cc)];
        double ex = static_cast<double>(cc - col) / max_rx;
        double ey = static_cast<double>(rr - row) / max_ry;
        if (mark || f(rr, cc) <= level || ex * ex + ey * ey > 1.0) {
          continue;
        }
        mark = 1;
        stack.emplace_back(rr, cc);
      }
    }
  }
  return Eigen::Vector2d(sx / sw, sy / sw);
}

double bilinear(const Eigen::MatrixXd &f, double col, double row) {
  auto c0 = static_cast<Eigen::Index>(std::floor(col));
  auto r0 = static_cast<Eigen::Index>(std::floor(row));
  c0 = std::clamp<Eigen::Index>(c0, 0, f.cols() - 2);
  r0 = std::clamp<Eigen::Index>(r0, 0, f.rows() - 2);
  double tc = col - static_cast<double>(c0);
  double tr = row - static_cast<double>(r0);
  return (1 - tr) * ((1 - tc) * f(r0, c0) + tc * f(r0, c0 + 1)) + tr * ((1 - tc) * f(r0 + 1, c0) + tc * f(r0 + 1, c0 + 1));
}

/// Refines a center (pixel coordinates) to the point of best point-symmetry of
/// the raw feature map within an elliptical window. Pixels whose mirror falls
/// outside the scan are skipped, so features cut by the edge stay unbiased.
Eigen::Vector2d symmetric_refine(const Eigen::MatrixXd &f, Eigen::Vector2d start, double rx, double ry) {
  const double max_col = static_cast<double>(f.cols() - 1);
  const double max_row = static_cast<double>(f.rows() - 1);
  auto cost = [&](const Eigen::Vector2d &c) {
    double acc = 0;
    int count = 0;
    auto lo_r = static_cast<Eigen::Index>(std::max(0.0, std::ceil(start(1) - ry)));
    auto hi_r = static_cast<Eigen::Index>(std::min(max_row, std::floor(start(1) + ry)));
    auto lo_c = static_cast<Eigen::Index>(std::max(0.0, std::ceil(start(0) - rx)));
    auto hi_c = static_cast<Eigen::Index>(std::min(max_col, std::floor(start(0) + rx)));
    for (Eigen::Index r = lo_r; r <= hi_r; ++r) {
      for (Eigen::Index k = lo_c; k <= hi_c; ++k) {
        double ex = (static_cast<double>(k) - start(0)) / rx;
        double ey = (static_cast<double>(r) - start(1)) / ry;
        if (ex * ex + ey * ey > 1) {
          continue;
        }
        double mc = 2 * c(0) - static_cast<double>(k);
        double mr = 2 * c(1) - static_cast<double>(r);
        if (mc < 0 || mr < 0 || mc > max_col || mr > max_row) {
          continue;
        }
        double d = f(r, k) - bilinear(f, mc, mr);
        acc += d * d;
        ++count;
      }
    }
    return count > 0 ? acc / count : std::numeric_limits<double>::infinity();
  };
  Eigen::Vector2d c = start;
  double best = cost(c);
  for (double h = 0.5; h > 1.0 / 512; h /= 2) {
    bool moved = true;
    int guard = 0;
    while (moved && guard++ < 32) {
      moved = false;
      for (int dx = -1; dx <= 1; ++dx) {
        for (int dy = -1; dy <= 1; ++dy) {
          if (dx == 0 && dy == 0) {
            continue;
          }
          Eigen::Vector2d t = c + h * Eigen::Vector2d(dx, dy);
          double v = cost(t);
          if (v < best) {
            best = v;
            c = t;
            moved = true;
          }
        }
      }
    }
  }
  return (c - start).cwiseAbs().maxCoeff() < kMaxSymmetryShift ? c : start;
}

std::vector<Eigen::Vector2d> detect_with_basis(const ScanGrid2D &scan, const SpectralBasis &spectral,
                                               const DetectionOptions &options) {
  Eigen::MatrixXd f = feature_map(scan);
  double min_period = std::min(spectral.basis.col(0).norm(), spectral.basis.col(1).norm());
  double sigma = options.smoothing_fraction * min_period;
  Eigen::MatrixXd fs = smooth(f, std::max(0.7, sigma / scan.axis_x.step()), std::max(0.7, sigma / scan.axis_y.step()));

  const Eigen::Index ny = fs.rows();
  const Eigen::Index nx = fs.cols();
  const int border = std::max(options.border, kQuadWindow);
  double peak = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = border; i < ny - border; ++i) {
    for (Eigen::Index j = border; j < nx - border; ++j) {
      peak = std::max(peak, fs(i, j));
    }
  }
  if (!(peak > 0)) {
    throw CalibrationInsufficient("no_features", "scan shows no features above the baseline");
  }

  struct Candidate {
    double value;
    Eigen::Index row;
    Eigen::Index col;
  };
  std::vector<Candidate> candidates;
  for (Eigen::Index i = border; i < ny - border; ++i) {
    for (Eigen::Index j = border; j < nx - border; ++j) {
      double v = fs(i, j);
      if (v < options.threshold * peak) {
        continue;
      }
      bool is_max = true;
      for (int di = -1; di <= 1 && is_max; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) {
            continue;
          }
          double n = fs(i + di, j + dj);
          // Ties resolved toward the earlier pixel so plateaus yield one candidate.
          bool earlier = di < 0 || (di == 0 && dj < 0);
          if (n > v || (earlier && n == v)) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) {
        candidates.push_back({v, i, j});
      }
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate &a, const Candidate &b) { return a.value > b.value; });

  double radius = 0.5 * min_period;
  const double max_rx = 0.35 * min_period / scan.axis_x.step();
  const double max_ry = 0.35 * min_period / scan.axis_y.step();
  std::vector<Eigen::Vector2d> centers;
  for (const auto &c : candidates) {
    auto offset = centroid_peak(fs, c.row, c.col, max_rx, max_ry);
    if (!offset) {
      offset = quadratic_peak(fs, c.row, c.col).value_or(Eigen::Vector2d::Zero());
    }
    Eigen::Vector2d px(static_cast<double>(c.col) + (*offset)(0), static_cast<double>(c.row) + (*offset)(1));
    px = symmetric_refine(f, px, 0.5 * max_rx, 0.5 * max_ry);
    Eigen::Vector2d pos = scan.coordinate(px(0), px(1));
    bool suppressed = std::any_of(centers.begin(), centers.end(),
                                  [&](const Eigen::Vector2d &other) { return (other - pos).norm() < radius; });
    if (!suppressed) {
      centers.push_back(pos);
    }
  }
  return centers;
}

}  // namespace

std::string to_string(CenterSource source) { return source == CenterSource::kManual ? "manual" : "automatic"; }

SpectralBasis estimate_basis_spectral(const ScanGrid2D &scan) {
  WindowedSpectrum spectrum(scan);
  const double lx = scan.axis_x.stop - scan.axis_x.start;
  const double ly = scan.axis_y.stop - scan.axis_y.start;
  const double dkx = 1.0 / (4.0 * lx);
  const double dky = 1.0 / (4.0 * ly);
  const double kmax_x = 0.25 / scan.axis_x.step();
  const double kmax_y = 0.25 / scan.axis_y.step();
  const int nkx = static_cast<int>(std::floor(kmax_x / dkx));
  const int nky = static_cast<int>(std::floor(kmax_y / dky));
  Eigen::VectorXd kx(2 * nkx + 1);
  Eigen::VectorXd ky(nky + 1);
  for (int a = -nkx; a <= nkx; ++a) {
    kx(a + nkx) = a * dkx;
  }
  for (int b = 0; b <= nky; ++b) {
    ky(b) = b * dky;
  }
  Eigen::MatrixXd p = spectrum.power_grid(kx, ky);

  struct Peak {
    double power;
    Eigen::Vector2d k;
  };
  std::vector<Peak> peaks;
  for (Eigen::Index b = 0; b < p.rows(); ++b) {
    for (Eigen::Index a = 1; a + 1 < p.cols(); ++a) {
      Eigen::Vector2d k(kx(a), ky(b));
      // Less than one fringe across the window is indistinguishable from a trend.
      if (std::hypot(k(0) * lx, k(1) * ly) < 1.0) {
        continue;
      }
      if (b == 0 && k(0) < 0) {
        continue;
      }
      double v = p(b, a);
      bool is_max = true;
      for (int db = -1; db <= 1 && is_max; ++db) {
        for (int da = -1; da <= 1; ++da) {
          Eigen::Index bb = b + db;
          Eigen::Index aa = a + da;
          if ((da == 0 && db == 0) || aa < 0 || aa >= p.cols()) {
            continue;
          }
          // Reflect across ky = 0 using F(-k) = conj F(k).
          double n = bb >= 0 ? (bb < p.rows() ? p(bb, aa) : 0.0) : p(-bb, p.cols() - 1 - aa);
          if (n > v) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) {
        peaks.push_back({v, k});
      }
    }
  }
  std::stable_sort(peaks.begin(), peaks.end(), [](const Peak &a, const Peak &b) { return a.power > b.power; });
  if (peaks.size() < 2 || !(peaks[0].power > 0)) {
    throw CalibrationInsufficient("no_periodicity", "scan spectrum shows no lattice peaks");
  }
  // Narrow features put comparable power into many reciprocal lattice points,
  // so the strongest peak may be a harmonic. The shortest strong peaks are
  // the fundamentals.
  std::vector<Eigen::Vector2d> strong;
  for (const auto &pk : peaks) {
    if (pk.power >= kStrongPeakFraction * peaks[0].power) {
      strong.push_back(pk.k);
    }
  }
  std::stable_sort(strong.begin(), strong.end(), [](const auto &a, const auto &b) { return a.norm() < b.norm(); });
  Eigen::Vector2d k1 = strong[0];
  std::optional<Eigen::Vector2d> k2;
  for (size_t t = 1; t < strong.size(); ++t) {
    const auto &k = strong[t];
    if (std::abs(cross2(k1, k)) >= kMinPeakSine * k1.norm() * k.norm()) {
      k2 = k;
      break;
    }
  }
  if (!k2) {
    throw CalibrationInsufficient("no_periodicity", "scan spectrum has no second non-collinear lattice peak");
  }
  double step = std::max(dkx, dky);
  k1 = refine_peak(spectrum, k1, step);
  *k2 = refine_peak(spectrum, *k2, step);

  SpectralBasis out;
  out.reciprocal.row(0) = k1.transpose();
  out.reciprocal.row(1) = k2->transpose();
  out.basis = align_basis_to_axes(out.reciprocal.inverse()).first;
  out.reciprocal = out.basis.inverse();
  for (int r = 0; r < 2; ++r) {
    out.periods_covered(r) = std::abs(out.reciprocal(r, 0)) * lx + std::abs(out.reciprocal(r, 1)) * ly;
  }
  if (out.periods_covered.minCoeff() < kMinPeriods) {
    throw CalibrationInsufficient(
        "insufficient_periods",
        fmt::format("scan covers {:.2f} x {:.2f} lattice periods; at least {} are needed per direction",
                    out.periods_covered(0), out.periods_covered(1), kMinPeriods));
  }
  return out;
}

std::vector<Eigen::Vector2d> detect_centers_auto(const ScanGrid2D &scan, const DetectionOptions &options) {
  auto spectral = estimate_basis_spectral(scan);
  auto centers = detect_with_basis(scan, spectral, options);
  if (centers.size() < 3) {
    throw CalibrationInsufficient("insufficient_centers",
                                  fmt::format("found {} centers; at least 3 are needed", centers.size()));
  }
  return centers;
}

IndexAssignment assign_lattice_indices(const std::vector<Eigen::Vector2d> &centers, const Eigen::Matrix2d &basis_guess,
                                       std::optional<Eigen::Vector2d> reference) {
  double scale = basis_guess.cwiseAbs().maxCoeff();
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(basis_guess);
  const auto &sv = svd.singularValues();
  if (!basis_guess.allFinite() || !(scale > 0) || !(sv(1) > 1e-6 * sv(0))) {
    throw ValidationError("ambiguous_basis", "lattice basis guess is singular or nearly so");
  }
  IndexAssignment out;
  if (centers.empty()) {
    return out;
  }
  if (!reference) {
    Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
    for (const auto &c : centers) {
      centroid += c;
    }
    centroid /= static_cast<double>(centers.size());
    reference = *std::min_element(centers.begin(), centers.end(), [&](const auto &a, const auto &b) {
      return (a - centroid).squaredNorm() < (b - centroid).squaredNorm();
    });
  }
  Eigen::Matrix2d inv = basis_guess.inverse();

  struct Claim {
    size_t center;
    double residual;
  };
  std::map<std::pair<int, int>, Claim> claims;
  std::vector<bool> keep(centers.size(), false);
  for (size_t t = 0; t < centers.size(); ++t) {
    Eigen::Vector2d frac = inv * (centers[t] - *reference);
    Eigen::Vector2d rounded = frac.array().round();
    double residual = (frac - rounded).cwiseAbs().maxCoeff();
    if (residual > kIndexResidualLimit) {
      continue;
    }
    std::pair<int, int> key{static_cast<int>(rounded(0)), static_cast<int>(rounded(1))};
    auto it = claims.find(key);
    if (it == claims.end()) {
      claims.emplace(key, Claim{t, residual});
      keep[t] = true;
    } else if (residual < it->second.residual) {
      keep[it->second.center] = false;
      it->second = Claim{t, residual};
      keep[t] = true;
    }
  }
  for (size_t t = 0; t < centers.size(); ++t) {
    if (!keep[t]) {
      out.rejected.push_back(centers[t]);
      continue;
    }
    Eigen::Vector2d frac = inv * (centers[t] - *reference);
    out.accepted.push_back({centers[t], frac.array().round().cast<int>()});
  }
  return out;
}

AffineFit fit_affine(const std::vector<IndexedCenter> &centers, const std::array<std::string, 2> &lines,
                     CenterSource source) {
  const auto k = static_cast<Eigen::Index>(centers.size());
  if (k < 3) {
    throw ValidationError("insufficient_centers", fmt::format("need at least 3 indexed centers, got {}", k));
  }
  Eigen::MatrixXd design(k, 3);
  Eigen::MatrixXd target(k, 2);
  for (Eigen::Index t = 0; t < k; ++t) {
    const auto &c = centers[static_cast<size_t>(t)];
    design.row(t) << c.index(0), c.index(1), 1.0;
    target.row(t) = c.position.transpose();
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 3) {
    throw ValidationError("collinear_centers", "lattice indices are collinear; the fit is rank-deficient");
  }
  Eigen::MatrixXd coef = qr.solve(target);  // 3 x 2

  AffineFit out;
  auto &fit = out.lattice;
  fit.primitive_vectors.col(0) = coef.row(0).transpose();
  fit.primitive_vectors.col(1) = coef.row(1).transpose();
  fit.origin = coef.row(2).transpose();
  Eigen::MatrixXd resid = target - design * coef;
  fit.residual_rms = std::sqrt(resid.squaredNorm() / static_cast<double>(k));
  fit.n_centers_used = static_cast<int>(k);
  fit.center_source = source;
  if (k > 3) {
    Eigen::Matrix3d cov = (design.transpose() * design).inverse();
    for (int comp = 0; comp < 2; ++comp) {
      double s2 = resid.col(comp).squaredNorm() / static_cast<double>(k - 3);
      fit.primitive_stddev(comp, 0) = std::sqrt(s2 * cov(0, 0));
      fit.primitive_stddev(comp, 1) = std::sqrt(s2 * cov(1, 1));
    }
  }
  out.correction = AffineCorrection::from_basis(lines, fit.primitive_vectors, fit.origin);
  return out;
}

std::pair<Eigen::Matrix2d, Eigen::Matrix2i> align_basis_to_axes(const Eigen::Matrix2d &basis) {
  Eigen::Matrix2d recip = basis.inverse();
  // Reciprocal rows transform as R' = V·R with V = U⁻¹ integer and unimodular.
  // Lagrange-reduce the reciprocal basis first, tracking V.
  Eigen::Vector2d b1 = recip.row(0).transpose();
  Eigen::Vector2d b2 = recip.row(1).transpose();
  Eigen::Vector2i c1(1, 0);
  Eigen::Vector2i c2(0, 1);
  for (int guard = 0; guard < 64; ++guard) {
    if (b2.squaredNorm() < b1.squaredNorm()) {
      std::swap(b1, b2);
      std::swap(c1, c2);
    }
    double mu = std::round(b1.dot(b2) / b1.squaredNorm());
    if (mu == 0) {
      break;
    }
    b2 -= mu * b1;
    c2 -= static_cast<int>(mu) * c1;
  }

  struct Candidate {
    Eigen::Vector2d vec;
    Eigen::Vector2i coeff;
  };
  std::vector<Candidate> cands;
  for (int m = -1; m <= 1; ++m) {
    for (int n = -1; n <= 1; ++n) {
      if (m == 0 && n == 0) {
        continue;
      }
      cands.push_back({m * b1 + n * b2, m * c1 + n * c2});
    }
  }
  // Short combinations are eligible; the margin keeps b1 ± b2 when it is only
  // slightly longer than b2, as for symmetric crosstalk with noisy centers.
  double limit = b2.norm() * 1.25;
  double best_score = -std::numeric_limits<double>::infinity();
  Eigen::Matrix2i best_v = Eigen::Matrix2i::Identity();
  for (const auto &cx : cands) {
    if (cx.vec.norm() > limit) {
      continue;
    }
    for (const auto &cy : cands) {
      if (cy.vec.norm() > limit) {
        continue;
      }
      int det = cx.coeff(0) * cy.coeff(1) - cx.coeff(1) * cy.coeff(0);
      if (std::abs(det) != 1) {
        continue;
      }
      double score = cx.vec(0) / cx.vec.norm() + cy.vec(1) / cy.vec.norm();
      if (score > best_score + 1e-12) {
        best_score = score;
        best_v.row(0) = cx.coeff.transpose();
        best_v.row(1) = cy.coeff.transpose();
      }
    }
  }
  Eigen::Matrix2i u = unimodular_inverse(best_v);
  return {basis * u.cast<double>(), u};
}

std::optional<Eigen::Matrix2d> basis_from_center_differences(const std::vector<Eigen::Vector2d> &centers) {
  std::vector<Eigen::Vector2d> diffs;
  for (size_t a = 0; a < centers.size(); ++a) {
    for (size_t b = a + 1; b < centers.size(); ++b) {
      diffs.push_back(centers[b] - centers[a]);
    }
  }
  if (diffs.size() < 2) {
    return std::nullopt;
  }
  std::stable_sort(diffs.begin(), diffs.end(), [](const auto &a, const auto &b) { return a.norm() < b.norm(); });
  Eigen::Vector2d a1 = diffs[0];
  for (size_t t = 1; t < diffs.size(); ++t) {
    if (std::abs(cross2(a1, diffs[t])) > 0.3 * a1.norm() * diffs[t].norm()) {
      Eigen::Matrix2d basis;
      basis.col(0) = a1;
      basis.col(1) = diffs[t];
      return align_basis_to_axes(basis).first;
    }
  }
  return std::nullopt;
}

namespace {

AffineFit aligned_fit(const std::vector<IndexedCenter> &centers, const std::array<std::string, 2> &lines,
                      CenterSource source) {
  auto fit = fit_affine(centers, lines, source);
  auto [aligned, u] = align_basis_to_axes(fit.lattice.primitive_vectors);
  if (u == Eigen::Matrix2i::Identity()) {
    return fit;
  }
  Eigen::Matrix2i u_inv = unimodular_inverse(u);
  std::vector<IndexedCenter> reindexed = centers;
  for (auto &c : reindexed) {
    c.index = u_inv * c.index;
  }
  return fit_affine(reindexed, lines, source);
}

}  // namespace

AutoFitResult auto_fit(const ScanGrid2D &scan, const DetectionOptions &options) {
  const std::array<std::string, 2> lines{scan.axis_x.label, scan.axis_y.label};
  AutoFitResult out;
  out.spectral = estimate_basis_spectral(scan);
  out.centers = detect_with_basis(scan, out.spectral, options);
  if (out.centers.size() < 3) {
    throw CalibrationInsufficient("insufficient_centers",
                                  fmt::format("found {} centers; at least 3 are needed", out.centers.size()));
  }

  out.indexed = assign_lattice_indices(out.centers, out.spectral.basis);
  if (out.indexed.accepted.size() < 3 || 3 * out.indexed.rejected.size() > out.centers.size()) {
    if (auto alt = basis_from_center_differences(out.centers)) {
      auto retry = assign_lattice_indices(out.centers, *alt);
      if (retry.accepted.size() > out.indexed.accepted.size()) {
        out.indexed = std::move(retry);
      }
    }
  }
  auto first = fit_affine(out.indexed.accepted, lines, CenterSource::kAutomatic);
  out.indexed = assign_lattice_indices(out.centers, first.lattice.primitive_vectors, first.lattice.origin);
  out.fit = aligned_fit(out.indexed.accepted, lines, CenterSource::kAutomatic);
  return out;
}

AffineFit fit_manual_centers(const std::vector<Eigen::Vector2d> &centers, const std::vector<Eigen::Vector2i> &indices,
                             const std::optional<Eigen::Matrix2d> &basis_guess,
                             const std::array<std::string, 2> &lines) {
  if (centers.size() < 3) {
    throw ValidationError("insufficient_centers",
                          fmt::format("need at least 3 centers, got {}", centers.size()));
  }
  std::vector<IndexedCenter> indexed;
  if (!indices.empty()) {
    if (indices.size() != centers.size()) {
      throw ValidationError("dimension_mismatch", "one lattice index is required per center");
    }
    for (size_t t = 0; t < centers.size(); ++t) {
      indexed.push_back({centers[t], indices[t]});
    }
  } else {
    auto guess = basis_guess ? basis_guess : basis_from_center_differences(centers);
    if (!guess) {
      throw ValidationError("collinear_centers", "centers are collinear; cannot propose lattice indices");
    }
    auto assignment = assign_lattice_indices(centers, *guess);
    if (!assignment.rejected.empty()) {
      throw ValidationError("unindexable_center",
                            fmt::format("{} center(s) do not sit on the proposed lattice", assignment.rejected.size()));
    }
    indexed = std::move(assignment.accepted);
  }
  return aligned_fit(indexed, lines, CenterSource::kManual);
}

}  // namespace fluxqa::xtalk
