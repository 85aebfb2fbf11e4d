#include <catch_amalgamated.hpp>

#include <random>

#include "trussprec/pcg.hpp"

using namespace trussprec;
using Catch::Matchers::WithinRel;

namespace {

Matrix random_spd(int n, double kappa, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = nd(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Vector ev(n);
  for (int i = 0; i < n; ++i) ev[i] = std::pow(kappa, static_cast<double>(i) / (n - 1));
  return q * ev.asDiagonal() * q.transpose();
}

double a_norm(const Matrix& a, const Vector& v) { return std::sqrt(v.dot(a * v)); }

const Matrix kNoNull(0, 0);

}  // namespace

TEST_CASE("exact preconditioner converges in one step") {
  std::mt19937_64 rng(1);
  Matrix a = random_spd(30, 1e4, rng);
  Eigen::LLT<Matrix> llt(a);
  Vector b = Vector::Random(30);
  auto r = pcg_solve([&](const Vector& v) { return Vector(a * v); },
                     [&](const Vector& v) { return Vector(llt.solve(v)); }, b, 1e-8, 100, kNoNull);
  CHECK(r.report.iterations == 1);
  CHECK(r.report.status == SolveStatus::kConverged);
  CHECK((a * r.x - b).norm() <= 1e-10 * b.norm());
  CHECK_THAT(*r.report.kappa_estimate, WithinRel(1.0, 1e-8));
}

TEST_CASE("two distinct eigenvalues take two steps") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 1;
  a(1, 1) = 4;
  Vector b(2);
  b << 1, 1;
  auto r = pcg_solve([&](const Vector& v) { return Vector(a * v); }, [](const Vector& v) { return v; }, b, 1e-10,
                     10, kNoNull);
  CHECK(r.report.iterations <= 2);
  CHECK(std::abs(r.x[0] - 1.0) < 1e-12);
  CHECK(std::abs(r.x[1] - 0.25) < 1e-12);
  CHECK_THAT(*r.report.kappa_estimate, WithinRel(4.0, 1e-10));
}

TEST_CASE("lanczos estimate recovers the condition number") {
  const int n = 50;
  Vector d(n);
  for (int i = 0; i < n; ++i) d[i] = 1.0 + i;
  auto r = pcg_solve([&](const Vector& v) { return Vector(d.cwiseProduct(v)); }, [](const Vector& v) { return v; },
                     Vector::Ones(n), 1e-12, 500, kNoNull);
  CHECK_THAT(*r.report.kappa_estimate, WithinRel(50.0, 1e-6));
  CHECK(lanczos_condition_estimate({}, {}) == 1.0);
  CHECK(lanczos_condition_estimate({0.5}, {0.1}) == 1.0);
}

TEST_CASE("energy error decreases monotonically and meets the target") {
  std::mt19937_64 rng(5);
  for (double kappa : {10.0, 1e3, 1e6}) {
    Matrix a = random_spd(60, kappa, rng);
    Vector x = Vector::Random(60);
    Vector b = a * x;
    std::vector<double> errs;
    Vector jacobi = a.diagonal().cwiseInverse();
    auto r = pcg_solve([&](const Vector& v) { return Vector(a * v); },
                       [&](const Vector& v) { return Vector(jacobi.cwiseProduct(v)); }, b, 1e-8, 1000, kNoNull,
                       [&](int, const Vector& xi) { errs.push_back(a_norm(a, xi - x)); });
    INFO("kappa " << kappa);
    for (size_t i = 1; i < errs.size(); ++i) CHECK(errs[i] <= errs[i - 1] * (1 + 1e-9) + 1e-14);
    CHECK(r.report.status == SolveStatus::kConverged);
    CHECK(a_norm(a, r.x - x) <= 1e-8 * a_norm(a, x));
    CHECK(r.report.preconditioned_ratio <= 1e-8);
    CHECK(r.report.final_relative_residual < 1e-5);
  }
}

TEST_CASE("singular system with a known null space") {
  // path graph Laplacian, null space spanned by the ones vector
  const int n = 40;
  Matrix l = Matrix::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    l(i, i) += 1;
    l(i + 1, i + 1) += 1;
    l(i, i + 1) -= 1;
    l(i + 1, i) -= 1;
  }
  Matrix null = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  Vector x = Vector::Random(n);
  x -= null * (null.transpose() * x);
  Vector b = l * x + 3.0 * null.col(0);
  auto r = pcg_solve([&](const Vector& v) { return Vector(l * v); }, [](const Vector& v) { return v; }, b, 1e-10,
                     2000, null);
  CHECK(r.report.status == SolveStatus::kConverged);
  CHECK(std::abs(null.col(0).dot(r.x)) < 1e-10);
  CHECK(a_norm(l, r.x - x) <= 1e-10 * a_norm(l, x));
  CHECK_THROWS_AS(pcg_solve([&](const Vector& v) { return Vector(l * v); }, [](const Vector& v) { return v; }, b,
                            1e-10, 10, Matrix(Matrix::Ones(n + 1, 1))),
                  Error);
}

TEST_CASE("zero right-hand side") {
  Matrix a = Matrix::Identity(5, 5);
  auto r = pcg_solve([&](const Vector& v) { return Vector(a * v); }, [](const Vector& v) { return v; },
                     Vector::Zero(5), 1e-8, 10, kNoNull);
  CHECK(r.x.isZero());
  CHECK(r.report.iterations == 0);
  CHECK(r.report.status == SolveStatus::kConverged);
}

TEST_CASE("iteration cap returns the best iterate") {
  std::mt19937_64 rng(9);
  Matrix a = random_spd(80, 1e6, rng);
  Vector b = Vector::Random(80);
  int calls = 0;
  auto r = pcg_solve([&](const Vector& v) { return Vector(a * v); }, [](const Vector& v) { return v; }, b, 1e-12, 5,
                     kNoNull, [&](int, const Vector&) { ++calls; });
  CHECK(r.report.status == SolveStatus::kMaxIterExceeded);
  CHECK(r.report.iterations == 5);
  CHECK(calls == 5);
  CHECK(r.report.kappa_estimate.has_value());
  CHECK(r.report.preconditioned_ratio <= 1.0);
  CHECK(default_max_iter(400) == 500);
}

TEST_CASE("non-finite values are reported") {
  Matrix a = Matrix::Identity(3, 3);
  Vector b = Vector::Ones(3);
  auto apply = [&](const Vector& v) { return Vector(a * v); };
  try {
    pcg_solve(apply, [](const Vector& v) { return Vector(v * std::numeric_limits<double>::quiet_NaN()); }, b, 1e-8,
              10, kNoNull);
    FAIL("expected NaNDetected");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNaNDetected);
  }
  try {
    int calls = 0;
    pcg_solve([&](const Vector& v) {
                if (++calls > 1) return Vector(v * std::numeric_limits<double>::infinity());
                return Vector(Vector::LinSpaced(3, 1, 5).cwiseProduct(v));
              },
              [](const Vector& v) { return v; }, Vector(Vector::LinSpaced(3, 1, 3)), 1e-12, 10, kNoNull);
    FAIL("expected NaNDetected");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNaNDetected);
  }
}
