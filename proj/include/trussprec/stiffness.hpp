#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <span>
#include <vector>

#include "trussprec/error.hpp"
#include "trussprec/truss.hpp"

namespace trussprec {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Rank-one element stiffness (gamma / length) * u u^T, where u is +d on the
/// dofs of i and -d on the dofs of j, d the unit direction from i to j.
struct ElementMatrix {
  int i = 0;
  int j = 0;
  double coefficient = 0.0;  // gamma / length
  Vec2 direction;            // unit vector from i to j

  /// 4x4 block on dofs (2i, 2i+1, 2j, 2j+1).
  Eigen::Matrix4d local() const {
    Eigen::Vector4d u(direction.x, direction.y, -direction.x, -direction.y);
    return coefficient * u * u.transpose();
  }

  /// Full size element matrix.
  Matrix expanded(int vertex_count) const {
    Matrix out = Matrix::Zero(2 * vertex_count, 2 * vertex_count);
    const int dofs[4] = {2 * i, 2 * i + 1, 2 * j, 2 * j + 1};
    Eigen::Matrix4d block = local();
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) out(dofs[a], dofs[b]) += block(a, b);
    return out;
  }
};

inline ElementMatrix element_matrix(Vec2 pi, Vec2 pj, int i, int j, double gamma) {
  Vec2 d = pj - pi;
  double len = norm(d);
  if (len < kMinElementLength) throw Error(ErrorCode::kZeroLengthElement, "element matrix");
  return {i, j, gamma / len, d * (1.0 / len)};
}

inline ElementMatrix element_matrix(const Truss& truss, int id) {
  const auto& e = truss.element(id);
  return element_matrix(truss.position(e.i), truss.position(e.j), e.i, e.j, e.gamma);
}

/// Symmetric sparse matrix stored as its lower triangle (row >= col), sorted
/// by row then column. Symmetry is exact by construction.
class SparseSymmetricMatrix {
 public:
  struct Entry {
    int row;
    int col;
    double value;
  };

  SparseSymmetricMatrix() = default;

  /// Duplicate coordinates are summed in input order; entries above the
  /// diagonal are mirrored into the lower triangle.
  SparseSymmetricMatrix(int dimension, std::vector<Entry> entries) : dim_(dimension) {
    for (auto& e : entries) {
      if (e.row < 0 || e.col < 0 || e.row >= dim_ || e.col >= dim_)
        throw Error(ErrorCode::kDimensionMismatch, "sparse entry out of range");
      if (e.row < e.col) std::swap(e.row, e.col);
    }
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    for (const auto& e : entries) {
      if (!entries_.empty() && entries_.back().row == e.row && entries_.back().col == e.col)
        entries_.back().value += e.value;
      else
        entries_.push_back(e);
    }
    row_start_.assign(dim_ + 1, 0);
    for (const auto& e : entries_) ++row_start_[e.row + 1];
    for (int r = 0; r < dim_; ++r) row_start_[r + 1] += row_start_[r];
  }

  int dimension() const { return dim_; }
  std::span<const Entry> entries() const { return entries_; }
  int lower_nnz() const { return static_cast<int>(entries_.size()); }

  /// Lower-triangle entries of one row, ending with the diagonal if present.
  std::span<const Entry> row(int r) const {
    return {entries_.data() + row_start_[r], entries_.data() + row_start_[r + 1]};
  }

  double diagonal(int r) const {
    auto rw = row(r);
    return (!rw.empty() && rw.back().col == r) ? rw.back().value : 0.0;
  }

  double max_diagonal() const {
    double m = 0.0;
    for (int r = 0; r < dim_; ++r) m = std::max(m, std::abs(diagonal(r)));
    return m;
  }

  Vector multiply(const Vector& x) const {
    if (x.size() != dim_) throw Error(ErrorCode::kDimensionMismatch, "matvec size");
    Vector y = Vector::Zero(dim_);
    for (const auto& e : entries_) {
      y[e.row] += e.value * x[e.col];
      if (e.row != e.col) y[e.col] += e.value * x[e.row];
    }
    return y;
  }

  Matrix to_dense() const {
    Matrix m = Matrix::Zero(dim_, dim_);
    for (const auto& e : entries_) {
      m(e.row, e.col) += e.value;
      if (e.row != e.col) m(e.col, e.row) += e.value;
    }
    return m;
  }

 private:
  int dim_ = 0;
  std::vector<Entry> entries_;
  std::vector<int> row_start_;
};

inline Vector matvec(const SparseSymmetricMatrix& a, const Vector& x) { return a.multiply(x); }

/// Global stiffness matrix A = sum of element matrices, interleaved dofs.
inline SparseSymmetricMatrix assemble(const Truss& truss) {
  std::vector<SparseSymmetricMatrix::Entry> entries;
  entries.reserve(10 * truss.element_count());
  for (int id = 0; id < truss.element_count(); ++id) {
    ElementMatrix em = element_matrix(truss, id);
    Eigen::Matrix4d block = em.local();
    const int dofs[4] = {2 * em.i, 2 * em.i + 1, 2 * em.j, 2 * em.j + 1};
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b <= a; ++b) {
        int r = dofs[a], c = dofs[b];
        if (r < c) std::swap(r, c);
        entries.push_back({r, c, block(a, b)});
      }
  }
  return SparseSymmetricMatrix(truss.dof_count(), std::move(entries));
}

/// The three rigid motions: translations along x and y, and the rotation
/// about vertex 0 (slot i holds perp(v_i - v_0)).
struct RigidMotions {
  Vector tx;
  Vector ty;
  Vector rotation;

  Matrix columns() const {
    Matrix m(tx.size(), 3);
    m << tx, ty, rotation;
    return m;
  }

  /// Orthonormal basis of the same span.
  Matrix orthonormal() const {
    Eigen::HouseholderQR<Matrix> qr(columns());
    return qr.householderQ() * Matrix::Identity(tx.size(), 3);
  }
};

inline RigidMotions rigid_null_basis(std::span<const Vec2> positions) {
  const int n = static_cast<int>(positions.size());
  RigidMotions r{Vector::Zero(2 * n), Vector::Zero(2 * n), Vector::Zero(2 * n)};
  for (int v = 0; v < n; ++v) {
    r.tx[2 * v] = 1.0;
    r.ty[2 * v + 1] = 1.0;
    Vec2 p = perp(positions[v] - positions[0]);
    r.rotation[2 * v] = p.x;
    r.rotation[2 * v + 1] = p.y;
  }
  return r;
}

inline RigidMotions rigid_null_basis(const Truss& truss) { return rigid_null_basis(truss.positions()); }

/// Writes the lower triangle: "%n 2n nnz" header, then "i j value" lines.
inline void write_matrix(std::ostream& out, const SparseSymmetricMatrix& m) {
  out << '%' << m.dimension() / 2 << ' ' << m.dimension() << ' ' << m.lower_nnz() << '\n';
  out.precision(17);
  for (const auto& e : m.entries()) out << e.row << ' ' << e.col << ' ' << e.value << '\n';
}

}  // namespace trussprec
