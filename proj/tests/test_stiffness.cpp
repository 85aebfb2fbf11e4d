#include <catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "trussprec/generators.hpp"
#include "trussprec/io.hpp"
#include "trussprec/stiffness.hpp"

using namespace trussprec;
using Catch::Matchers::WithinAbs;

namespace {

// straight from the definition: gamma/l * u u' placed on the 4 dofs
Matrix dense_oracle(const Truss& t) {
  Matrix a = Matrix::Zero(t.dof_count(), t.dof_count());
  for (const auto& e : t.elements()) {
    Vec2 d = t.position(e.j) - t.position(e.i);
    double len = std::hypot(d.x, d.y);
    double u[4] = {-d.x / len, -d.y / len, d.x / len, d.y / len};
    int dof[4] = {2 * e.i, 2 * e.i + 1, 2 * e.j, 2 * e.j + 1};
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) a(dof[r], dof[c]) += e.gamma / len * u[r] * u[c];
  }
  return a;
}

}  // namespace

TEST_CASE("single bar") {
  std::vector<Vec2> p{{0, 0}, {1, 0}, {0, 1}};
  Truss t(p, {{0, 1, 2.0}, {1, 2, 1.0}, {0, 2, 1.0}});
  auto em = element_matrix(t, *t.find_element(0, 1));
  Eigen::Matrix4d expect;
  expect << 2, 0, -2, 0, 0, 0, 0, 0, -2, 0, 2, 0, 0, 0, 0, 0;
  CHECK((em.local() - expect).norm() < 1e-15);

  // 45 degree bar of length sqrt 2
  auto diag = element_matrix(Vec2{0, 0}, Vec2{1, 1}, 0, 1, 1.0);
  double c = 0.5 / std::sqrt(2.0);
  CHECK_THAT(diag.local()(0, 0), WithinAbs(c, 1e-15));
  CHECK_THAT(diag.local()(0, 3), WithinAbs(-c, 1e-15));
  CHECK_THAT(diag.local()(1, 2), WithinAbs(-c, 1e-15));
}

TEST_CASE("assembly matches the dense element sum") {
  for (const Truss& t : {gen_grid(5, 4, 0.3, 2), gen_path(8), gen_grid(7, 7, 0.1, 11)}) {
    Matrix a = assemble(t).to_dense();
    Matrix oracle = dense_oracle(t);
    CHECK((a - oracle).cwiseAbs().maxCoeff() <= 1e-14 * std::max(1.0, oracle.cwiseAbs().maxCoeff()));
    CHECK((a - a.transpose()).norm() == 0.0);

    Matrix sum = Matrix::Zero(t.dof_count(), t.dof_count());
    for (int e = 0; e < t.element_count(); ++e) sum += element_matrix(t, e).expanded(t.vertex_count());
    CHECK((a - sum).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("rigid motions span the null space") {
  Truss t = gen_grid(6, 6, 0.25, 5);
  auto a = assemble(t);
  Matrix n = rigid_null_basis(t).columns();
  for (int c = 0; c < 3; ++c) {
    Vector v = n.col(c);
    CHECK(a.multiply(v).norm() <= 1e-10 * v.norm());
  }
  Matrix q = rigid_null_basis(t).orthonormal();
  CHECK((q.transpose() * q - Matrix::Identity(3, 3)).norm() < 1e-12);

  // nothing else: eigenvalue count near zero is exactly three
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.to_dense());
  int zeros = 0;
  for (double ev : es.eigenvalues()) zeros += std::abs(ev) < 1e-9 * es.eigenvalues().maxCoeff();
  CHECK(zeros == 3);
}

TEST_CASE("sparse product matches dense product") {
  Truss t = gen_grid(5, 8, 0.2, 3);
  auto a = assemble(t);
  Matrix d = a.to_dense();
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 5; ++trial) {
    Vector x(t.dof_count());
    for (auto& v : x) v = nd(rng);
    CHECK((a.multiply(x) - d * x).norm() <= 1e-13 * (d * x).norm());
    // positive semidefinite
    CHECK(x.dot(a.multiply(x)) >= -1e-12);
  }
  for (int r = 0; r < a.dimension(); ++r) CHECK(a.diagonal(r) == d(r, r));
  CHECK(a.max_diagonal() == d.diagonal().maxCoeff());
}

TEST_CASE("duplicate entries are merged") {
  SparseSymmetricMatrix m(2, {{1, 0, 1.0}, {0, 0, 2.0}, {1, 0, 0.5}, {1, 1, 3.0}});
  Matrix d = m.to_dense();
  Matrix expect(2, 2);
  expect << 2, 1.5, 1.5, 3;
  CHECK(d == expect);
  CHECK(m.lower_nnz() == 3);
}

TEST_CASE("matrix dump round trip") {
  Truss t = gen_grid(3, 4, 0.2, 8);
  auto a = assemble(t);
  std::stringstream ss;
  write_matrix(ss, a);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "%" + std::to_string(t.vertex_count()) + " " + std::to_string(t.dof_count()) + " " +
                      std::to_string(a.lower_nnz()));
  ss.seekg(0);
  auto back = read_matrix(ss);
  CHECK((back.to_dense() - a.to_dense()).norm() == 0.0);
}
