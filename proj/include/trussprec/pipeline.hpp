#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trussprec/analysis.hpp"
#include "trussprec/augment.hpp"
#include "trussprec/factor.hpp"
#include "trussprec/fretsaw.hpp"
#include "trussprec/pcg.hpp"
#include "trussprec/rigidity.hpp"
#include "trussprec/stiffness.hpp"
#include "trussprec/tree.hpp"
#include "trussprec/truss.hpp"

namespace trussprec {

/// round(n^(5/6) * sqrt(ln^2 n * max(1, ln ln n))), clamped to [1, n_f - 1].
inline int default_k(int n, int face_count) {
  double k = 1.0;
  if (n >= 2) {
    double ln = std::log(static_cast<double>(n));
    double lnln = n >= 3 ? std::log(ln) : 0.0;
    k = std::round(std::pow(static_cast<double>(n), 5.0 / 6.0) * std::sqrt(ln * ln * std::max(1.0, lnln)));
  }
  int hi = std::max(1, face_count - 1);
  return static_cast<int>(std::clamp(k, 1.0, static_cast<double>(hi)));
}

struct PipelineConfig {
  double eps = 1e-8;
  std::optional<int> k;
  int max_iter = 0;  // 0: default cap from the problem size
};

/// Everything computed on the original truss before splitting it.
struct Support {
  int k = 0;
  RigidityGraph rigidity;
  std::vector<int> tau;
  std::vector<int> tree_edges;
  RootedTree tree;
  Embedding psi;                    // one demand per element, element order
  AugmentResult augment;
  std::vector<int> subgraph_edges;  // tree edges plus the extra edges
};

inline std::vector<Vec2> face_centroids(const Truss& t) {
  std::vector<Vec2> c;
  c.reserve(t.face_count());
  for (const auto& f : t.faces())
    c.push_back((t.position(f[0]) + t.position(f[1]) + t.position(f[2])) * (1.0 / 3.0));
  return c;
}

/// Routes each element (p, q) from tau(p) to tau(q) through faces containing p or q.
inline Embedding element_embedding(const Truss& t, const RigidityGraph& q, const std::vector<int>& tau) {
  Embedding psi;
  std::vector<char> allowed(q.node_count(), 0);
  for (const auto& e : t.elements()) {
    for (int f : t.faces_of_vertex(e.i)) allowed[f] = 1;
    for (int f : t.faces_of_vertex(e.j)) allowed[f] = 1;
    psi.pairs.push_back({tau[e.i], tau[e.j]});
    psi.paths.push_back(shortest_path_edges(q.graph(), tau[e.i], tau[e.j], allowed));
    for (int f : t.faces_of_vertex(e.i)) allowed[f] = 0;
    for (int f : t.faces_of_vertex(e.j)) allowed[f] = 0;
  }
  return psi;
}

inline Support build_support(const Truss& t, int k) {
  if (k < 1) throw Error(ErrorCode::kBadK, "k must be positive");
  Support s;
  s.k = k;
  s.rigidity = RigidityGraph(t);
  if (auto sc = is_stiffly_connected(t, s.rigidity); !sc.stiffly_connected)
    throw Error(ErrorCode::kNotStifflyConnected, sc.witness());
  s.tau = default_tau(t);
  const auto& g = s.rigidity.graph();
  s.tree_edges = spanning_tree_low_stretch(g);
  s.tree = RootedTree(g, s.tree_edges);
  s.psi = element_embedding(t, s.rigidity, s.tau);
  s.augment = low_congest_augment(g, s.tree, s.psi, k, face_centroids(t));
  s.subgraph_edges = s.tree_edges;
  for (int e : s.augment.extra_edges)
    if (!s.tree.is_tree_edge(e)) s.subgraph_edges.push_back(e);
  std::sort(s.subgraph_edges.begin(), s.subgraph_edges.end());
  return s;
}

/// The preconditioner: Schur complement of the split truss's stiffness onto
/// the original vertices, applied through a partial Cholesky factor.
class FretsawPreconditioner {
 public:
  FretsawPreconditioner(const Truss& t, int k) : support_(build_support(t, k)) {
    extension_ = fretsaw(t, support_.rigidity, support_.subgraph_edges, support_.tau);
    extended_rigidity_ = RigidityGraph(extension_.extended);
    for (int e : support_.tree_edges) {
      const auto& fe = support_.rigidity.graph().edge(e);
      extended_tree_edges_.push_back(*extended_rigidity_.find_edge(fe.u, fe.v));
    }
    b_ = assemble(extension_.extended);
    order_ = trim_order(extension_.extended, extended_rigidity_, extended_tree_edges_);
    factor_ = factorize(b_, order_);
    original_dofs_ = t.dof_count();
  }

  const Support& support() const { return support_; }
  const FretsawExtension& extension() const { return extension_; }
  const RigidityGraph& extended_rigidity() const { return extended_rigidity_; }
  const std::vector<int>& extended_tree_edges() const { return extended_tree_edges_; }
  const SparseSymmetricMatrix& extended_matrix() const { return b_; }
  const EliminationOrder& order() const { return order_; }
  const CholeskyFactor& factor() const { return factor_; }

  /// Non-tree edges of the extended rigidity graph.
  int extra_extended_edges() const {
    return extended_rigidity_.edge_count() - static_cast<int>(extended_tree_edges_.size());
  }

  Vector apply(const Vector& r) const {
    if (r.size() != original_dofs_) throw Error(ErrorCode::kDimensionMismatch, "preconditioner input");
    return solve_schur(factor_, r);
  }

 private:
  Support support_;
  FretsawExtension extension_;
  RigidityGraph extended_rigidity_;
  std::vector<int> extended_tree_edges_;
  SparseSymmetricMatrix b_;
  EliminationOrder order_;
  CholeskyFactor factor_;
  int original_dofs_ = 0;
};

struct TrussSolveResult {
  Vector x;
  SolveReport report;
  int k = 0;
  int extended_vertices = 0;
  FactorStats factor;
  std::vector<std::string> warnings;
};

namespace detail {

inline Vector project_rigid(const Truss& t, const Vector& b, std::vector<std::string>& warnings) {
  if (b.size() != t.dof_count()) throw Error(ErrorCode::kDimensionMismatch, "right-hand side length");
  if (!b.allFinite()) throw Error(ErrorCode::kInvalidInput, "right-hand side is not finite");
  Matrix n = rigid_null_basis(t).orthonormal();
  Vector c = n.transpose() * b;
  if (c.norm() > 1e-8 * b.norm()) {
    warnings.push_back("right-hand side had a rigid-motion component; it was projected out");
  }
  return b - n * c;
}

}  // namespace detail

inline TrussSolveResult truss_solve(const Truss& t, const Vector& b, const PipelineConfig& config) {
  if (!(config.eps > 0.0 && config.eps < 1.0)) throw Error(ErrorCode::kInvalidInput, "eps must be in (0, 1)");
  TrussSolveResult out;
  Vector rhs = detail::project_rigid(t, b, out.warnings);
  out.k = config.k ? *config.k : default_k(t.vertex_count(), t.face_count());
  FretsawPreconditioner pre(t, out.k);
  SparseSymmetricMatrix a = assemble(t);
  Matrix null_basis = rigid_null_basis(t).orthonormal();
  int max_iter = config.max_iter > 0 ? config.max_iter : default_max_iter(t.dof_count());
  auto result = pcg_solve([&](const Vector& v) { return a.multiply(v); },
                          [&](const Vector& r) { return pre.apply(r); }, rhs, config.eps, max_iter, null_basis);
  out.x = std::move(result.x);
  out.report = result.report;
  out.extended_vertices = pre.extension().copy_count();
  out.factor = pre.factor().stats();
  if (out.report.status == SolveStatus::kMaxIterExceeded)
    out.warnings.push_back("iteration cap reached before the tolerance; returning the best iterate");
  return out;
}

/// Conjugate gradients without a preconditioner, same stopping rule.
inline PcgResult unpreconditioned_solve(const Truss& t, const Vector& b, double eps, int max_iter = 0) {
  std::vector<std::string> ignored;
  Vector rhs = detail::project_rigid(t, b, ignored);
  SparseSymmetricMatrix a = assemble(t);
  Matrix null_basis = rigid_null_basis(t).orthonormal();
  if (max_iter <= 0) max_iter = 50 * t.dof_count();
  return pcg_solve([&](const Vector& v) { return a.multiply(v); }, [](const Vector& r) { return r; }, rhs, eps,
                   max_iter, null_basis);
}

struct SupportCertificate {
  std::vector<double> s;  // per original element
  double bound = 0.0;
};

/// Congestion-dilation bound for A' <= bound * B: element (p, q) of T is
/// supported by the split elements of the faces on its rerouted path.
inline SupportCertificate support_certificate(const Truss& t, const FretsawPreconditioner& pre) {
  const auto& sup = pre.support();
  const auto& ext = pre.extension();
  const Truss& t2 = ext.extended;
  const auto& g = sup.rigidity.graph();
  SupportCertificate out;
  std::vector<double> load(t2.element_count(), 0.0);

  for (int i = 0; i < t.element_count(); ++i) {
    const auto& path = sup.augment.embedding.paths[i];
    std::vector<int> faces = walk_vertices(g, sup.augment.embedding.pairs[i].first, path);
    std::sort(faces.begin(), faces.end());
    faces.erase(std::unique(faces.begin(), faces.end()), faces.end());

    std::vector<int> elems, verts;
    for (int f : faces) {
      for (int el : t2.face_elements(f)) elems.push_back(el);
      for (int v : t2.face(f)) verts.push_back(v);
    }
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    auto local = [&](int v) {
      return static_cast<int>(std::lower_bound(verts.begin(), verts.end(), v) - verts.begin());
    };
    const int d = 2 * static_cast<int>(verts.size());
    auto add = [&](Matrix& m, const ElementMatrix& em) {
      Eigen::Matrix4d blk = em.local();
      int dofs[4] = {2 * local(em.i), 2 * local(em.i) + 1, 2 * local(em.j), 2 * local(em.j) + 1};
      for (int a = 0; a < 4; ++a)
        for (int c = 0; c < 4; ++c) m(dofs[a], dofs[c]) += blk(a, c);
    };
    Matrix ai = Matrix::Zero(d, d), bi = Matrix::Zero(d, d);
    add(ai, element_matrix(t, i));
    for (int el : elems) add(bi, element_matrix(t2, el));
    double s = detail::generalized_max(ai, bi);
    out.s.push_back(s);
    for (int el : elems) load[el] += s;
  }
  for (double l : load) out.bound = std::max(out.bound, l);
  return out;
}

}  // namespace trussprec
