#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "trussprec/error.hpp"
#include "trussprec/stiffness.hpp"

namespace trussprec {

enum class SolveStatus { kConverged, kMaxIterExceeded };

struct SolveReport {
  int iterations = 0;
  double final_relative_residual = 0.0;  // ||b - A x|| / ||b||
  double preconditioned_ratio = 0.0;     // sqrt(r'z / r0'z0) at exit
  double eps_target = 0.0;
  std::optional<double> kappa_estimate;
  double wall_time = 0.0;
  SolveStatus status = SolveStatus::kConverged;
};

struct PcgResult {
  Vector x;
  SolveReport report;
};

/// Largest over smallest Ritz value of the Lanczos matrix built from the CG
/// coefficients.
inline double lanczos_condition_estimate(const std::vector<double>& alpha, const std::vector<double>& beta) {
  const int k = static_cast<int>(alpha.size());
  if (k == 0) return 1.0;
  Vector diag(k), sub(std::max(k - 1, 0));
  for (int j = 0; j < k; ++j) {
    diag[j] = 1.0 / alpha[j] + (j > 0 ? beta[j - 1] / alpha[j - 1] : 0.0);
    if (j + 1 < k) sub[j] = std::sqrt(beta[j]) / alpha[j];
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  // the tridiagonal solver does not always return them sorted
  const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

/// Preconditioned conjugate gradients on a singular PSD system. null_basis
/// (orthonormal columns, possibly none) spans null(A); it is projected out of
/// b, of every preconditioned residual, and of the iterate. Stops when the
/// preconditioned residual ratio times the square root of the running
/// condition estimate drops to eps, which bounds the relative A-norm error.
template <typename ApplyA, typename ApplyPrecond>
PcgResult pcg_solve(ApplyA&& apply_a, ApplyPrecond&& apply_precond, const Vector& b, double eps,
                    int max_iter, const Matrix& null_basis,
                    const std::function<void(int, const Vector&)>& on_iterate = {}) {
  auto start = std::chrono::steady_clock::now();
  const int dim = static_cast<int>(b.size());
  if (null_basis.cols() > 0 && null_basis.rows() != dim)
    throw Error(ErrorCode::kDimensionMismatch, "null basis");
  auto project = [&](Vector& v) {
    if (null_basis.cols() > 0) v -= null_basis * (null_basis.transpose() * v);
  };
  auto finite = [](const Vector& v) { return v.allFinite(); };

  PcgResult out;
  out.report.eps_target = eps;
  Vector rhs = b;
  project(rhs);
  out.x = Vector::Zero(dim);
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    out.report.kappa_estimate = 1.0;
    return out;
  }

  Vector r = rhs;
  Vector z = apply_precond(r);
  project(z);
  if (!finite(z)) throw Error(ErrorCode::kNaNDetected, "preconditioner output");
  double delta = r.dot(z);
  const double delta0 = delta;
  if (!(delta0 > 0.0)) throw Error(ErrorCode::kNaNDetected, "preconditioner is not positive on the residual");
  Vector p = z;
  std::vector<double> alphas, betas;
  Vector best = out.x;
  double best_ratio = 1.0;
  bool converged = false;
  int it = 0;
  double ratio = 1.0;

  while (it < max_iter) {
    ++it;
    Vector q = apply_a(p);
    double pq = p.dot(q);
    if (!std::isfinite(pq)) throw Error(ErrorCode::kNaNDetected, "A p");
    if (pq <= 0.0) throw Error(ErrorCode::kNaNDetected, "search direction with non-positive energy");
    double alpha = delta / pq;
    out.x += alpha * p;
    r -= alpha * q;
    project(r);
    if (it % 50 == 0) project(out.x);
    z = apply_precond(r);
    project(z);
    if (!finite(z)) throw Error(ErrorCode::kNaNDetected, "preconditioner output");
    double delta_next = r.dot(z);
    if (!std::isfinite(delta_next) || delta_next < 0.0)
      throw Error(ErrorCode::kNaNDetected, "r'z is negative or not finite");
    double beta = delta_next / delta;
    alphas.push_back(alpha);
    betas.push_back(beta);
    if (on_iterate) on_iterate(it, out.x);

    ratio = std::sqrt(delta_next / delta0);
    if (ratio < best_ratio) {
      best_ratio = ratio;
      best = out.x;
    }
    if (ratio <= eps) {
      double kappa = lanczos_condition_estimate(alphas, betas);
      out.report.kappa_estimate = kappa;
      if (delta_next == 0.0 || ratio * std::sqrt(kappa) <= eps) {
        converged = true;
        break;
      }
    }
    p = z + beta * p;
    delta = delta_next;
  }

  if (!converged) {
    out.x = best;
    ratio = best_ratio;
    out.report.status = SolveStatus::kMaxIterExceeded;
    out.report.kappa_estimate = lanczos_condition_estimate(alphas, betas);
  }
  project(out.x);
  out.report.iterations = it;
  out.report.preconditioned_ratio = ratio;
  out.report.final_relative_residual = (rhs - apply_a(out.x)).norm() / bnorm;
  out.report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

/// Default iteration cap for a system with the given number of dofs.
inline int default_max_iter(int dofs) {
  return static_cast<int>(20.0 * std::sqrt(static_cast<double>(dofs))) + 100;
}

}  // namespace trussprec
