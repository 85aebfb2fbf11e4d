#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <deque>
#include <set>
#include <span>
#include <unordered_map>
#include <vector>

#include "trussprec/error.hpp"
#include "trussprec/rigidity.hpp"
#include "trussprec/stiffness.hpp"
#include "trussprec/truss.hpp"

namespace trussprec {

inline constexpr int kMaxTrimDegree = 8;

/// Vertex elimination order. The first `trimmed` vertices come from peeling
/// the tree-like part of the rigidity graph; the rest form the core, ordered
/// by greedy minimum degree.
struct EliminationOrder {
  std::vector<int> vertices;
  int trimmed = 0;
  std::vector<int> degrees;  // neighbours in the elimination graph when eliminated

  int core_size() const { return static_cast<int>(vertices.size()) - trimmed; }

  int max_trimmed_degree() const {
    int d = 0;
    for (int t = 0; t < trimmed; ++t) d = std::max(d, degrees[t]);
    return d;
  }

  double mean_trimmed_degree() const {
    if (trimmed == 0) return 0.0;
    double s = 0.0;
    for (int t = 0; t < trimmed; ++t) s += degrees[t];
    return s / trimmed;
  }
};

namespace detail {

// Elimination graph on vertices; eliminating v joins its remaining neighbours.
class EliminationGraph {
 public:
  explicit EliminationGraph(const Truss& t) : adj_(t.vertex_count()), gone_(t.vertex_count(), 0) {
    for (const auto& e : t.elements()) {
      adj_[e.i].push_back(e.j);
      adj_[e.j].push_back(e.i);
    }
    for (auto& a : adj_) std::sort(a.begin(), a.end());
  }

  int degree(int v) const { return static_cast<int>(adj_[v].size()); }
  const std::vector<int>& neighbours(int v) const { return adj_[v]; }

  // Returns the degree at elimination.
  int eliminate(int v) {
    std::vector<int> nb = std::move(adj_[v]);
    adj_[v].clear();
    gone_[v] = 1;
    for (int a : nb) {
      std::vector<int> merged;
      merged.reserve(adj_[a].size() + nb.size());
      std::set_union(adj_[a].begin(), adj_[a].end(), nb.begin(), nb.end(), std::back_inserter(merged));
      merged.erase(std::remove_if(merged.begin(), merged.end(), [&](int x) { return x == a || x == v; }),
                   merged.end());
      adj_[a] = std::move(merged);
    }
    return static_cast<int>(nb.size());
  }

  bool eliminated(int v) const { return gone_[v] != 0; }

 private:
  std::vector<std::vector<int>> adj_;
  std::vector<char> gone_;
};

}  // namespace detail

/// Elimination order for the extended truss. Groups start as faces; a leaf
/// group (degree <= 1 in the group graph) eliminates its private vertices and
/// folds into its neighbour, two adjacent degree-2 groups merge. Groups
/// touching a non-tree edge are never peeled or merged.
inline EliminationOrder trim_order(const Truss& t, const RigidityGraph& q, std::span<const int> tree_edges) {
  const int nf = t.face_count();
  const int nv = t.vertex_count();
  std::vector<char> tree_edge(q.edge_count(), 0);
  for (int e : tree_edges) tree_edge[e] = 1;

  std::vector<std::vector<int>> verts(nf);
  std::vector<std::set<int>> nbrs(nf);
  std::vector<char> alive(nf, 1), marked(nf, 0);
  std::vector<int> count(nv, 0);
  for (int f = 0; f < nf; ++f) {
    verts[f].assign(t.face(f).begin(), t.face(f).end());
    for (int v : verts[f]) ++count[v];
  }
  for (int e = 0; e < q.edge_count(); ++e) {
    const auto& ge = q.graph().edge(e);
    nbrs[ge.u].insert(ge.v);
    nbrs[ge.v].insert(ge.u);
    if (!tree_edge[e]) marked[ge.u] = marked[ge.v] = 1;
  }

  std::vector<int> trimmed;
  std::vector<char> done(nv, 0);
  auto eliminate_private = [&](int g) {
    std::vector<int> keep;
    for (int v : verts[g]) {
      if (count[v] == 1 && !done[v]) {
        trimmed.push_back(v);
        done[v] = 1;
        count[v] = 0;
      } else {
        keep.push_back(v);
      }
    }
    verts[g] = std::move(keep);
  };

  std::deque<int> work;
  for (int f = 0; f < nf; ++f) work.push_back(f);
  int live = nf;
  while (!work.empty()) {
    int g = work.front();
    work.pop_front();
    if (!alive[g] || marked[g] || live == 1) continue;
    const int deg = static_cast<int>(nbrs[g].size());
    if (deg <= 1) {
      eliminate_private(g);
      if (deg == 1) {
        int h = *nbrs[g].begin();
        for (int v : verts[g]) {
          if (std::find(verts[h].begin(), verts[h].end(), v) != verts[h].end())
            --count[v];
          else
            verts[h].push_back(v);
        }
        nbrs[h].erase(g);
        work.push_back(h);
      } else {
        for (int v : verts[g]) --count[v];
      }
      alive[g] = 0;
      --live;
    } else if (deg == 2) {
      for (int h : nbrs[g]) {
        if (marked[h] || nbrs[h].size() != 2) continue;
        for (int v : verts[h]) {
          if (std::find(verts[g].begin(), verts[g].end(), v) != verts[g].end())
            --count[v];
          else
            verts[g].push_back(v);
        }
        for (int x : nbrs[h]) {
          if (x == g) continue;
          nbrs[x].erase(h);
          nbrs[x].insert(g);
          nbrs[g].insert(x);
        }
        nbrs[g].erase(h);
        nbrs[g].erase(g);
        alive[h] = 0;
        --live;
        eliminate_private(g);
        work.push_back(g);
        for (int x : nbrs[g]) work.push_back(x);
        break;
      }
    }
  }

  EliminationOrder order;
  detail::EliminationGraph eg(t);
  for (int v : trimmed) {
    order.vertices.push_back(v);
    order.degrees.push_back(eg.eliminate(v));
  }
  order.trimmed = static_cast<int>(trimmed.size());

  std::set<std::pair<int, int>> queue;
  for (int v = 0; v < nv; ++v)
    if (!done[v]) queue.insert({eg.degree(v), v});
  while (!queue.empty()) {
    int v = queue.begin()->second;
    queue.erase(queue.begin());
    std::vector<int> nb = eg.neighbours(v);
    for (int a : nb) queue.erase({eg.degree(a), a});
    order.vertices.push_back(v);
    order.degrees.push_back(eg.eliminate(v));
    for (int a : nb) queue.insert({eg.degree(a), a});
  }
  return order;
}

/// Plain minimum-degree order over all vertices.
inline EliminationOrder min_degree_order(const Truss& t) {
  EliminationOrder order;
  detail::EliminationGraph eg(t);
  std::set<std::pair<int, int>> queue;
  for (int v = 0; v < t.vertex_count(); ++v) queue.insert({eg.degree(v), v});
  while (!queue.empty()) {
    int v = queue.begin()->second;
    queue.erase(queue.begin());
    std::vector<int> nb = eg.neighbours(v);
    for (int a : nb) queue.erase({eg.degree(a), a});
    order.vertices.push_back(v);
    order.degrees.push_back(eg.eliminate(v));
    for (int a : nb) queue.insert({eg.degree(a), a});
  }
  return order;
}

struct FactorStats {
  int core_vertices = 0;
  long long fill_nnz = 0;
  int dropped_pivots = 0;
  double factor_seconds = 0.0;
  int max_trimmed_degree = 0;
  double mean_trimmed_degree = 0.0;
};

/// P B P^T = L L^T with 2x2 vertex blocks eliminated in order. Pivots at or
/// below 1e-9 * max diag are dropped: the column is zeroed and the dof is
/// flagged. Solves act as a pseudo-inverse on range(B).
class CholeskyFactor {
 public:
  int dimension() const { return dim_; }
  const FactorStats& stats() const { return stats_; }
  const std::vector<char>& dropped() const { return dropped_; }
  /// Orthonormal basis of null(B) read off the factor, original dof order.
  const Matrix& null_basis() const { return null_basis_; }

  /// Original dof of permuted index p.
  int original_dof(int p) const { return 2 * order_[p / 2] + (p % 2); }

  Vector solve(const Vector& rhs) const {
    if (rhs.size() != dim_) throw Error(ErrorCode::kDimensionMismatch, "factor solve");
    double nb = rhs.norm();
    if (null_basis_.cols() > 0 && (null_basis_.transpose() * rhs).norm() > 1e-8 * nb)
      throw Error(ErrorCode::kRhsNotInRange, "right-hand side has a null-space component");
    return solve_unchecked(rhs);
  }

  /// Same operator without the range check; components along null(B) are
  /// mapped as by the symmetric pseudo-solve.
  Vector solve_unchecked(const Vector& rhs) const {
    Vector y(dim_);
    for (int p = 0; p < dim_; ++p) y[p] = rhs[original_dof(p)];
    for (int p = 0; p < dim_; ++p) {
      if (dropped_[p]) {
        y[p] = 0.0;
        continue;
      }
      y[p] /= diag_[p];
      for (auto [r, v] : below_[p]) y[r] -= v * y[p];
    }
    for (int p = dim_ - 1; p >= 0; --p) {
      if (dropped_[p]) {
        y[p] = 0.0;
        continue;
      }
      double s = y[p];
      for (auto [r, v] : below_[p]) s -= v * y[r];
      y[p] = s / diag_[p];
    }
    Vector x(dim_);
    for (int p = 0; p < dim_; ++p) x[original_dof(p)] = y[p];
    return x;
  }

  /// Dense P^T L L^T P in original dof order.
  Matrix reconstruct() const {
    Matrix l = Matrix::Zero(dim_, dim_);
    for (int p = 0; p < dim_; ++p) {
      l(p, p) = diag_[p];
      for (auto [r, v] : below_[p]) l(r, p) = v;
    }
    Matrix llt = l * l.transpose();
    Matrix out(dim_, dim_);
    for (int a = 0; a < dim_; ++a)
      for (int b = 0; b < dim_; ++b) out(original_dof(a), original_dof(b)) = llt(a, b);
    return out;
  }

 private:
  friend CholeskyFactor factorize(const SparseSymmetricMatrix& b, const EliminationOrder& order);

  int dim_ = 0;
  std::vector<int> order_;
  std::vector<double> diag_;
  std::vector<std::vector<std::pair<int, double>>> below_;
  std::vector<char> dropped_;
  Matrix null_basis_;
  FactorStats stats_;
};

inline CholeskyFactor factorize(const SparseSymmetricMatrix& b, const EliminationOrder& order) {
  using Block = Eigen::Matrix2d;
  auto start = std::chrono::steady_clock::now();
  const int dim = b.dimension();
  const int nv = dim / 2;
  if (dim % 2 != 0 || static_cast<int>(order.vertices.size()) != nv)
    throw Error(ErrorCode::kDimensionMismatch, "elimination order does not match matrix");

  CholeskyFactor f;
  f.dim_ = dim;
  f.order_ = order.vertices;
  std::vector<int> position(nv, -1);
  for (int t = 0; t < nv; ++t) {
    int v = order.vertices[t];
    if (v < 0 || v >= nv || position[v] >= 0) throw Error(ErrorCode::kInvalidInput, "bad elimination order");
    position[v] = t;
  }

  std::vector<Block> diag(nv, Block::Zero());
  std::vector<std::unordered_map<int, Block>> off(nv);  // off[u][w] = B(dofs u, dofs w)
  for (const auto& e : b.entries()) {
    int u = e.row / 2, w = e.col / 2, a = e.row % 2, c = e.col % 2;
    if (u == w) {
      diag[u](a, c) = e.value;
      diag[u](c, a) = e.value;
    } else {
      off[u].try_emplace(w, Block::Zero()).first->second(a, c) = e.value;
      off[w].try_emplace(u, Block::Zero()).first->second(c, a) = e.value;
    }
  }

  const double scale = b.max_diagonal();
  const double tol = 1e-9 * scale;
  f.diag_.assign(dim, 0.0);
  f.below_.assign(dim, {});
  f.dropped_.assign(dim, 0);
  std::vector<int> degrees;

  for (int t = 0; t < nv; ++t) {
    const int v = order.vertices[t];
    const int p0 = 2 * t, p1 = 2 * t + 1;
    const Block& d = diag[v];

    auto pivot = [&](double value, int p) -> double {
      if (value < -tol) throw Error(ErrorCode::kNotPsd, "negative pivot " + std::to_string(value));
      if (value <= tol) {
        f.dropped_[p] = 1;
        return 0.0;
      }
      return std::sqrt(value);
    };
    double l00 = pivot(d(0, 0), p0);
    double l10 = l00 > 0.0 ? d(1, 0) / l00 : 0.0;
    double l11 = pivot(d(1, 1) - l10 * l10, p1);
    f.diag_[p0] = l00;
    f.diag_[p1] = l11;
    if (l10 != 0.0) f.below_[p0].push_back({p1, l10});

    std::vector<std::pair<int, Block>> lcol;
    lcol.reserve(off[v].size());
    for (const auto& [u, bvu] : off[v]) {
      Block buv = bvu.transpose();
      Block l = Block::Zero();
      if (l00 > 0.0) l.col(0) = buv.col(0) / l00;
      if (l11 > 0.0) l.col(1) = (buv.col(1) - l.col(0) * l10) / l11;
      lcol.push_back({u, l});
    }
    std::sort(lcol.begin(), lcol.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    degrees.push_back(static_cast<int>(lcol.size()));

    for (const auto& [u, l] : lcol) {
      int q0 = 2 * position[u];
      for (int c = 0; c < 2; ++c)
        for (int a = 0; a < 2; ++a)
          if (l(a, c) != 0.0) f.below_[c == 0 ? p0 : p1].push_back({q0 + a, l(a, c)});
      off[u].erase(v);
    }
    for (size_t a = 0; a < lcol.size(); ++a) {
      const auto& [u, lu] = lcol[a];
      diag[u] -= lu * lu.transpose();
      for (size_t c = a + 1; c < lcol.size(); ++c) {
        const auto& [w, lw] = lcol[c];
        Block upd = lu * lw.transpose();
        off[u].try_emplace(w, Block::Zero()).first->second -= upd;
        off[w].try_emplace(u, Block::Zero()).first->second -= upd.transpose();
      }
    }
    std::unordered_map<int, Block>().swap(off[v]);
  }

  for (int p = 0; p < dim; ++p) {
    f.stats_.fill_nnz += 1 + static_cast<long long>(f.below_[p].size());
    f.stats_.dropped_pivots += f.dropped_[p];
  }
  f.stats_.core_vertices = order.core_size();
  EliminationOrder measured = order;
  measured.degrees = degrees;
  f.stats_.max_trimmed_degree = measured.max_trimmed_degree();
  f.stats_.mean_trimmed_degree = measured.mean_trimmed_degree();

  // null vectors: L^T w = 0 with one dropped entry set to 1, the others 0
  std::vector<Vector> nulls;
  for (int k = 0; k < dim; ++k) {
    if (!f.dropped_[k]) continue;
    Vector w = Vector::Zero(dim);
    w[k] = 1.0;
    for (int p = k - 1; p >= 0; --p) {
      if (f.dropped_[p]) continue;
      double s = 0.0;
      for (auto [r, v] : f.below_[p]) s += v * w[r];
      w[p] = -s / f.diag_[p];
    }
    Vector x(dim);
    for (int p = 0; p < dim; ++p) x[f.original_dof(p)] = w[p];
    nulls.push_back(std::move(x));
  }
  if (!nulls.empty()) {
    Matrix m(dim, static_cast<int>(nulls.size()));
    for (size_t c = 0; c < nulls.size(); ++c) m.col(c) = nulls[c];
    Eigen::HouseholderQR<Matrix> qr(m);
    f.null_basis_ = qr.householderQ() * Matrix::Identity(dim, m.cols());
  } else {
    f.null_basis_ = Matrix(dim, 0);
  }
  f.stats_.factor_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return f;
}

/// Applies the Schur complement pseudo-inverse: solves B [x; y] = [b; 0] and
/// returns x. The first b.size() dofs of the factored matrix are the ones
/// kept in the complement (the original vertices).
inline Vector solve_schur(const CholeskyFactor& factor, const Vector& b) {
  if (b.size() > factor.dimension()) throw Error(ErrorCode::kDimensionMismatch, "schur solve");
  Vector padded = Vector::Zero(factor.dimension());
  padded.head(b.size()) = b;
  return factor.solve(padded).head(b.size());
}

}  // namespace trussprec
