#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "trussprec/error.hpp"
#include "trussprec/generators.hpp"
#include "trussprec/stiffness.hpp"

namespace trussprec {

inline constexpr int kMaxDenseDimension = 2000;
inline constexpr double kNullThreshold = 1e-9;

inline void check_dense_size(int dim) {
  if (dim > kMaxDenseDimension)
    throw Error(ErrorCode::kTooLargeForDense, "dimension " + std::to_string(dim));
}

/// Number of eigenvalues of a PSD matrix at or below 1e-9 * its largest one.
inline int null_dimension(const Matrix& m) {
  check_dense_size(static_cast<int>(m.rows()));
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  double top = ev.size() ? std::max(ev.maxCoeff(), 0.0) : 0.0;
  int count = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev[i] <= kNullThreshold * top) ++count;
  return count;
}

/// B11 - B12 B22^{-1} B12^T where block 1 is the leading `keep` coordinates.
inline Matrix dense_schur_complement(const Matrix& b, int keep) {
  const int dim = static_cast<int>(b.rows());
  if (keep == dim) return b;
  const int rest = dim - keep;
  Eigen::LLT<Matrix> llt(b.bottomRightCorner(rest, rest));
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::kNotPsd, "eliminated block is not positive definite");
  Matrix x = llt.solve(b.bottomLeftCorner(rest, keep));
  Matrix s = b.topLeftCorner(keep, keep) - b.topRightCorner(keep, rest) * x;
  return 0.5 * (s + s.transpose());
}

/// A padded with zero rows and columns to size dim.
inline Matrix pad_dense(const Matrix& a, int dim) {
  Matrix out = Matrix::Zero(dim, dim);
  out.topLeftCorner(a.rows(), a.cols()) = a;
  return out;
}

namespace detail {

// max over x in range(b) of x'ax / x'bx
inline double generalized_max(const Matrix& a, const Matrix& b) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(b);
  const auto& w = es.eigenvalues();
  const double top = w.maxCoeff();
  std::vector<int> keep;
  for (int i = 0; i < w.size(); ++i)
    if (w[i] > kNullThreshold * top) keep.push_back(i);
  if (keep.empty()) return 0.0;
  Matrix v(b.rows(), keep.size());
  for (size_t c = 0; c < keep.size(); ++c) v.col(c) = es.eigenvectors().col(keep[c]) / std::sqrt(w[keep[c]]);
  Matrix reduced = v.transpose() * a * v;
  reduced = 0.5 * (reduced + reduced.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> rs(reduced, Eigen::EigenvaluesOnly);
  return rs.eigenvalues().maxCoeff();
}

}  // namespace detail

struct PencilSpectrum {
  double lambda_min = 0.0;  // min over x orthogonal to null(A) of x'Ax / x'Bx
  double lambda_max = 0.0;  // max over x orthogonal to null(B)
  double kappa = 0.0;
  int null_dim_a = 0;
  int null_dim_b = 0;
};

/// Dense generalized eigenvalue bounds of the pencil (A, B).
inline PencilSpectrum pencil_eigs(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.rows() != a.cols() || b.rows() != b.cols())
    throw Error(ErrorCode::kDimensionMismatch, "pencil");
  check_dense_size(static_cast<int>(a.rows()));
  PencilSpectrum s;
  s.lambda_max = detail::generalized_max(a, b);
  double inv = detail::generalized_max(b, a);
  s.lambda_min = inv > 0.0 ? 1.0 / inv : std::numeric_limits<double>::infinity();
  s.kappa = s.lambda_max / s.lambda_min;
  s.null_dim_a = null_dimension(a);
  s.null_dim_b = null_dimension(b);
  return s;
}

struct CongestionDilationBound {
  std::vector<double> s;  // s_i = lambda_max(A_i, sum of B_j over its support)
  std::vector<double> load;
  double bound = 0.0;     // max_j of the summed s_i over supports containing j
};

/// Support bound: A <= bound * B whenever A = sum A_i, B = sum B_j and each
/// A_i is dominated by the B_j listed in supports[i].
inline CongestionDilationBound congestion_dilation_bound(std::span<const Matrix> a_terms,
                                                         std::span<const Matrix> b_terms,
                                                         const std::vector<std::vector<int>>& supports) {
  if (a_terms.size() != supports.size()) throw Error(ErrorCode::kDimensionMismatch, "supports");
  CongestionDilationBound out;
  out.load.assign(b_terms.size(), 0.0);
  for (size_t i = 0; i < a_terms.size(); ++i) {
    Matrix bsum = Matrix::Zero(a_terms[i].rows(), a_terms[i].cols());
    for (int j : supports[i]) bsum += b_terms[j];
    double s = detail::generalized_max(a_terms[i], bsum);
    out.s.push_back(s);
    for (int j : supports[i]) out.load[j] += s;
  }
  for (double l : out.load) out.bound = std::max(out.bound, l);
  return out;
}

struct PathLemmaRow {
  int k = 0;
  double lambda_max = 0.0;
  double ratio = 0.0;  // against the previous row, 0 for the first
  double theta_min_degrees = 0.0;
  double closing_length = 0.0;
};

struct PathLemmaResult {
  std::vector<PathLemmaRow> rows;
  double slope = 0.0;  // least-squares slope of log lambda against log k over k >= 4
};

/// lambda_max(A_e0, A_path) for the closing element e0 = (0, k + 1) of a
/// curled truss path with k faces.
inline PathLemmaRow path_lemma_point(int k) {
  Truss path = curled_path(k);
  ElementMatrix e0 = element_matrix(path.position(0), path.position(k + 1), 0, k + 1, 1.0);
  Matrix a_path = assemble(path).to_dense();
  PathLemmaRow row;
  row.k = k;
  row.lambda_max = detail::generalized_max(e0.expanded(path.vertex_count()), a_path);
  double theta = std::numbers::pi;
  for (const auto& f : path.faces())
    theta = std::min(theta, min_triangle_angle(path.position(f[0]), path.position(f[1]), path.position(f[2])));
  row.theta_min_degrees = degrees(theta);
  row.closing_length = norm(path.position(k + 1) - path.position(0));
  return row;
}

inline PathLemmaResult path_lemma_experiment(std::span<const int> ks) {
  PathLemmaResult out;
  for (int k : ks) {
    PathLemmaRow row = path_lemma_point(k);
    if (!out.rows.empty()) row.ratio = row.lambda_max / out.rows.back().lambda_max;
    out.rows.push_back(row);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const auto& r : out.rows) {
    if (r.k < 4) continue;
    double x = std::log(r.k), y = std::log(r.lambda_max);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m >= 2) out.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return out;
}

}  // namespace trussprec
