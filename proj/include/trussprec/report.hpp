#pragma once

#include <nlohmann/json.hpp>

#include "trussprec/factor.hpp"
#include "trussprec/pcg.hpp"

namespace trussprec {

inline nlohmann::json to_json(const SolveReport& r) {
  nlohmann::json j;
  j["iterations"] = r.iterations;
  j["final_relative_residual"] = r.final_relative_residual;
  j["preconditioned_ratio"] = r.preconditioned_ratio;
  j["eps_target"] = r.eps_target;
  j["kappa_estimate"] = r.kappa_estimate ? nlohmann::json(*r.kappa_estimate) : nlohmann::json(nullptr);
  j["wall_time"] = r.wall_time;
  j["status"] = r.status == SolveStatus::kConverged ? "converged" : "MaxIterExceeded";
  return j;
}

inline nlohmann::json to_json(const FactorStats& s) {
  return {{"core_vertices", s.core_vertices},
          {"fill_nnz", s.fill_nnz},
          {"dropped_pivots", s.dropped_pivots},
          {"factor_seconds", s.factor_seconds}};
}

}  // namespace trussprec
