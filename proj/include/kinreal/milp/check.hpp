#pragma once

// Direct-substitution feasibility check for a candidate assignment. It reads
// only the model, never solver state, so it can audit any solver's output.

#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "kinreal/milp/model.hpp"

namespace kinreal::milp {

struct FeasibilityReport {
  bool feasible = true;
  double max_violation = 0.0;
  std::vector<std::string> violations;
};

inline double row_activity(const LinearConstraint& c, const std::vector<double>& values) {
  double activity = 0.0;
  for (const auto& t : c.terms) activity += t.coeff * values.at(t.var.index);
  return activity;
}

inline FeasibilityReport check_solution(const MilpModel& model, const std::vector<double>& values,
                                        double feasibility_tol = 1e-7,
                                        double integrality_tol = 1e-6) {
  FeasibilityReport report;
  auto flag = [&](const std::string& what, double amount) {
    report.feasible = false;
    report.max_violation = std::max(report.max_violation, amount);
    std::ostringstream os;
    os << what << " (violation " << amount << ")";
    report.violations.push_back(os.str());
  };
  if (values.size() != model.variable_count()) {
    report.feasible = false;
    report.violations.push_back("assignment size differs from the variable count");
    return report;
  }
  for (const auto& v : model.variables()) {
    const double x = values[v.id.index];
    if (!std::isfinite(x)) {
      flag("variable " + v.name + " is not finite", kInfinity);
      continue;
    }
    if (x < v.lower - feasibility_tol) flag("variable " + v.name + " below lower bound", v.lower - x);
    if (x > v.upper + feasibility_tol) flag("variable " + v.name + " above upper bound", x - v.upper);
    if (v.kind == VarKind::binary) {
      const double gap = std::abs(x - std::round(x));
      if (gap > integrality_tol) flag("binary " + v.name + " is fractional", gap);
    }
  }
  for (std::size_t r = 0; r < model.constraint_count(); ++r) {
    const auto& c = model.constraints()[r];
    const double activity = row_activity(c, values);
    double violation = 0.0;
    switch (c.relation) {
      case Relation::less_equal: violation = activity - c.rhs; break;
      case Relation::greater_equal: violation = c.rhs - activity; break;
      case Relation::equal: violation = std::abs(activity - c.rhs); break;
    }
    if (violation > feasibility_tol) {
      flag("constraint " + (c.name.empty() ? "#" + std::to_string(r + 1) : c.name), violation);
    }
  }
  return report;
}

}  // namespace kinreal::milp
