#include <catch_amalgamated.hpp>

#include <numbers>
#include <random>
#include <sstream>

#include "trussprec/generators.hpp"
#include "trussprec/io.hpp"
#include "trussprec/pipeline.hpp"
#include "trussprec/report.hpp"

using namespace trussprec;

namespace {

Vector random_admissible(const Truss& t, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Vector x(t.dof_count());
  for (auto& v : x) v = nd(rng);
  Matrix n = rigid_null_basis(t).orthonormal();
  return x - n * (n.transpose() * x);
}

double energy_error(const Truss& t, const Vector& approx, const Vector& exact) {
  auto a = assemble(t);
  Vector e = approx - exact;
  return std::sqrt(e.dot(a.multiply(e)) / exact.dot(a.multiply(exact)));
}

Truss two_triangles() {
  std::vector<Vec2> p{{0, 0}, {1, 0}, {0.4, 0.9}, {1.3, 0.8}};
  return Truss(p, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}, {1, 3, 2}, {2, 3, 1}});
}

}  // namespace

TEST_CASE("default k") {
  CHECK(default_k(2, 100) == 1);
  // ln ln 15 < 1, so the clamp applies: 15^(5/6) * ln 15
  CHECK(default_k(15, 1000) == 26);
  CHECK(default_k(15, 10) == 9);
  double n = 1e4;
  double expect = std::round(std::pow(n, 5.0 / 6.0) * std::log(n) * std::sqrt(std::log(std::log(n))));
  CHECK(default_k(10000, 1 << 20) == static_cast<int>(expect));
  CHECK(default_k(400, 2) == 1);
}

TEST_CASE("two triangle truss") {
  Truss t = two_triangles();
  Vector x = random_admissible(t, 1);
  Vector b = assemble(t).multiply(x);
  auto r = truss_solve(t, b, {});
  CHECK(r.report.iterations <= 5);
  CHECK(r.report.status == SolveStatus::kConverged);
  CHECK(energy_error(t, r.x, x) <= 1e-8);
  CHECK(r.warnings.empty());

  auto zero = truss_solve(t, Vector::Zero(t.dof_count()), {});
  CHECK(zero.x.isZero());
  CHECK(zero.report.iterations == 0);
}

TEST_CASE("end to end solves reach the energy target") {
  for (int side : {5, 10, 14}) {
    Truss t = gen_grid(side, side, 0.2, side + 1);
    Vector x = random_admissible(t, side);
    Vector b = assemble(t).multiply(x);
    for (double eps : {1e-4, 1e-8}) {
      for (int k : {2, 15, default_k(t.vertex_count(), t.face_count())}) {
        PipelineConfig cfg;
        cfg.eps = eps;
        cfg.k = k;
        auto r = truss_solve(t, b, cfg);
        INFO("side " << side << " eps " << eps << " k " << k << " iters " << r.report.iterations);
        CHECK(r.report.status == SolveStatus::kConverged);
        CHECK(energy_error(t, r.x, x) <= eps);
        CHECK(r.k == k);
        CHECK(r.factor.dropped_pivots == 3);
      }
    }
  }
}

TEST_CASE("rigid components of the load are projected with a warning") {
  Truss t = gen_grid(5, 5, 0.2, 2);
  Vector x = random_admissible(t, 3);
  Vector b = assemble(t).multiply(x);
  Vector shifted = b + 0.3 * rigid_null_basis(t).columns().col(2);
  auto r = truss_solve(t, shifted, {});
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings[0].find("rigid") != std::string::npos);
  CHECK(energy_error(t, r.x, x) <= 1e-8);

  PipelineConfig capped;
  capped.max_iter = 1;
  auto c = truss_solve(t, b, capped);
  CHECK(c.report.status == SolveStatus::kMaxIterExceeded);
  CHECK_FALSE(c.warnings.empty());
}

TEST_CASE("solves are deterministic") {
  Truss t = gen_grid(8, 8, 0.25, 5);
  Vector b = assemble(t).multiply(random_admissible(t, 4));
  auto r1 = truss_solve(t, b, {});
  auto r2 = truss_solve(t, b, {});
  CHECK(r1.report.iterations == r2.report.iterations);
  CHECK(r1.x == r2.x);
  CHECK(r1.extended_vertices == r2.extended_vertices);
}

TEST_CASE("preconditioning beats plain conjugate gradients") {
  Truss t = gen_grid(12, 12, 0.2, 1);
  Vector b = assemble(t).multiply(random_admissible(t, 6));
  auto pre = truss_solve(t, b, {});
  auto plain = unpreconditioned_solve(t, b, 1e-8);
  CHECK(plain.report.status == SolveStatus::kConverged);
  CHECK(pre.report.iterations < plain.report.iterations);
}

TEST_CASE("element embedding is local and short") {
  for (unsigned seed : {1u, 2u}) {
    Truss t = gen_grid(9, 7, 0.3, seed);
    RigidityGraph q(t);
    auto tau = default_tau(t);
    auto psi = element_embedding(t, q, tau);
    auto quality = quality_bounds(t);
    double cap = 2 * std::numbers::pi / quality.theta_min;
    REQUIRE(psi.size() == t.element_count());
    for (int v = 0; v < t.vertex_count(); ++v) CHECK(t.faces_of_vertex(v).size() <= cap);
    for (int z = 0; z < psi.size(); ++z) {
      const auto& e = t.element(z);
      CHECK(psi.paths[z].size() <= t.faces_of_vertex(e.i).size() + t.faces_of_vertex(e.j).size());
      // faces stay around the element's endpoints
      for (int f : walk_vertices(q.graph(), psi.pairs[z].first, psi.paths[z])) {
        const auto& face = t.face(f);
        bool near = std::find(face.begin(), face.end(), e.i) != face.end() ||
                    std::find(face.begin(), face.end(), e.j) != face.end();
        CHECK(near);
      }
    }
  }
}

TEST_CASE("pipeline input errors") {
  std::vector<Vec2> p{{0, 0}, {0, 1}, {1, 0.5}, {2, 0}, {2, 1}};
  Truss bowtie(p, {{0, 1, 1}, {0, 2, 1}, {1, 2, 1}, {2, 3, 1}, {2, 4, 1}, {3, 4, 1}});
  try {
    truss_solve(bowtie, Vector::Ones(10), {});
    FAIL("expected NotStifflyConnected");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNotStifflyConnected);
  }
  Truss t = gen_grid(3, 3);
  CHECK_THROWS_AS(truss_solve(t, Vector::Ones(5), {}), Error);
  PipelineConfig bad;
  bad.eps = 0.0;
  CHECK_THROWS_AS(truss_solve(t, Vector::Zero(18), bad), Error);
  PipelineConfig badk;
  badk.k = 0;
  CHECK_THROWS_AS(truss_solve(t, Vector::Zero(18), badk), Error);
}

TEST_CASE("report serialization and vector files") {
  Truss t = gen_grid(4, 4, 0.1, 1);
  Vector b = assemble(t).multiply(random_admissible(t, 2));
  auto r = truss_solve(t, b, {});
  auto j = to_json(r.report);
  CHECK(j["iterations"] == r.report.iterations);
  CHECK(j["status"] == "converged");
  CHECK(j["eps_target"] == 1e-8);
  CHECK(j.contains("kappa_estimate"));
  auto f = to_json(r.factor);
  CHECK(f["dropped_pivots"] == 3);

  std::stringstream ss;
  write_vector(ss, b);
  Vector back = read_vector(ss);
  CHECK(back == b);
  std::istringstream junk("1.0 2.0 x");
  CHECK_THROWS_AS(read_vector(junk), Error);
}
