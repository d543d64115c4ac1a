#pragma once

#include <string>
#include <utility>
#include <vector>

#include "kinreal/milp/model.hpp"
#include "kinreal/milp/simplex.hpp"
#include "kinreal/network.hpp"

namespace kinreal {

struct KernelOracleResult {
  bool feasible = false;
  /// A kernel vector with every entry >= 1 when feasible.
  Vector b;
};

/// Feasibility of {A_k b = 0, b >= 1}. Since the constraints are scale
/// invariant, this is equivalent to A_k having a strictly positive kernel
/// vector.
inline KernelOracleResult kernel_oracle(const KineticsMatrix& ak) {
  const std::size_t m = ak.size();
  KernelOracleResult result;
  if (m == 0) {
    result.feasible = true;
    return result;
  }
  milp::MilpModel model;
  std::vector<milp::VarId> b;
  for (std::size_t j = 0; j < m; ++j) b.push_back(model.add_continuous("b_" + std::to_string(j + 1), 1.0));
  const Matrix& a = ak.matrix();
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<milp::LinearTerm> terms;
    for (std::size_t j = 0; j < m; ++j) {
      const double v = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (v != 0.0) terms.push_back({b[j], v});
    }
    if (!terms.empty()) model.add_constraint(std::move(terms), milp::Relation::equal, 0.0);
  }
  const milp::Solution s = milp::solve_lp(model);
  result.feasible = s.status == milp::SolveStatus::optimal;
  if (result.feasible) {
    result.b = Vector(static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < m; ++j) result.b(static_cast<Eigen::Index>(j)) = s.value(b[j]);
  }
  return result;
}

}  // namespace kinreal
