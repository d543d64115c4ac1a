#pragma once

// Mixed-integer linear model: continuous and binary variables, linear rows,
// and a linear objective that is always minimized.

#include <cmath>
#include <compare>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kinreal::milp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct VarId {
  std::size_t index = 0;
  friend auto operator<=>(const VarId&, const VarId&) = default;
};

enum class VarKind { continuous, binary };

struct Variable {
  VarId id;
  VarKind kind = VarKind::continuous;
  double lower = 0.0;
  double upper = kInfinity;
  std::string name;
};

enum class Relation { less_equal, equal, greater_equal };

struct LinearTerm {
  VarId var;
  double coeff = 0.0;
};

struct LinearConstraint {
  std::vector<LinearTerm> terms;
  Relation relation = Relation::equal;
  double rhs = 0.0;
  std::string name;
};

/// Thrown when the simplex cannot keep its factorization accurate.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MilpModel {
 public:
  VarId add_variable(std::string name, VarKind kind, double lower, double upper) {
    if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
      throw std::invalid_argument("variable '" + name + "' has invalid bounds");
    }
    if (kind == VarKind::binary && (lower < 0.0 || upper > 1.0)) {
      throw std::invalid_argument("binary variable '" + name + "' must lie in [0, 1]");
    }
    VarId id{variables_.size()};
    variables_.push_back({id, kind, lower, upper, std::move(name)});
    return id;
  }

  VarId add_continuous(std::string name, double lower = 0.0, double upper = kInfinity) {
    return add_variable(std::move(name), VarKind::continuous, lower, upper);
  }

  VarId add_binary(std::string name) {
    return add_variable(std::move(name), VarKind::binary, 0.0, 1.0);
  }

  std::size_t add_constraint(std::vector<LinearTerm> terms, Relation relation, double rhs,
                             std::string name = {}) {
    check_terms(terms);
    if (!std::isfinite(rhs)) throw std::invalid_argument("constraint right-hand side must be finite");
    constraints_.push_back({std::move(terms), relation, rhs, std::move(name)});
    return constraints_.size() - 1;
  }

  void set_objective(std::vector<LinearTerm> terms) {
    check_terms(terms);
    objective_ = std::move(terms);
  }

  void set_bounds(VarId var, double lower, double upper) {
    auto& v = variables_.at(var.index);
    if (lower > upper) throw std::invalid_argument("invalid bounds for '" + v.name + "'");
    if (v.kind == VarKind::binary && (lower < 0.0 || upper > 1.0)) {
      throw std::invalid_argument("binary bounds must lie in [0, 1]");
    }
    v.lower = lower;
    v.upper = upper;
  }

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<LinearConstraint>& constraints() const { return constraints_; }
  const std::vector<LinearTerm>& objective() const { return objective_; }
  std::size_t variable_count() const { return variables_.size(); }
  std::size_t constraint_count() const { return constraints_.size(); }

  std::size_t count(VarKind kind) const {
    std::size_t n = 0;
    for (const auto& v : variables_) n += v.kind == kind ? 1 : 0;
    return n;
  }

  /// Dense objective coefficient vector.
  std::vector<double> objective_vector() const {
    std::vector<double> c(variables_.size(), 0.0);
    for (const auto& t : objective_) c[t.var.index] += t.coeff;
    return c;
  }

  double evaluate_objective(const std::vector<double>& values) const {
    double total = 0.0;
    for (const auto& t : objective_) total += t.coeff * values.at(t.var.index);
    return total;
  }

 private:
  void check_terms(const std::vector<LinearTerm>& terms) const {
    std::vector<bool> seen(variables_.size(), false);
    for (const auto& t : terms) {
      if (t.var.index >= variables_.size()) {
        throw std::invalid_argument("term references an undeclared variable");
      }
      if (seen[t.var.index]) {
        throw std::invalid_argument("duplicate variable '" + variables_[t.var.index].name +
                                    "' in linear expression");
      }
      if (!std::isfinite(t.coeff)) throw std::invalid_argument("non-finite coefficient");
      seen[t.var.index] = true;
    }
  }

  std::vector<Variable> variables_;
  std::vector<LinearConstraint> constraints_;
  std::vector<LinearTerm> objective_;
};

enum class SolveStatus { optimal, infeasible, unbounded, time_limit };

inline const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::time_limit: return "time-limit";
  }
  return "unknown";
}

struct Solution {
  SolveStatus status = SolveStatus::infeasible;
  std::vector<double> values;
  double objective_value = 0.0;
  /// LP relaxation optimum at the root (MILP solves only).
  double root_bound = -kInfinity;
  bool has_incumbent = false;
  std::size_t nodes = 0;
  std::size_t lp_iterations = 0;

  double value(VarId id) const { return values.at(id.index); }
};

}  // namespace kinreal::milp
