#pragma once

// LP-based branch-and-bound over binary variables. Nodes are explored in
// best-bound order (ties: deeper node first, then creation order); the
// branching variable is the most fractional binary, ties to the lowest id.

#include <chrono>
#include <cmath>
#include <cstddef>
#include <queue>
#include <utility>
#include <vector>

#include "kinreal/milp/check.hpp"
#include "kinreal/milp/model.hpp"
#include "kinreal/milp/simplex.hpp"

namespace kinreal::milp {

struct MilpConfig {
  double time_limit_seconds = 600.0;
  std::size_t node_limit = 5'000'000;
  double feasibility_tol = 1e-7;
  double integrality_tol = 1e-6;
  /// Optional assignment used as the first incumbent when it passes
  /// check_solution; optimality is still proved by the search.
  std::vector<double> start;
};

namespace detail {

struct Node {
  double bound = -kInfinity;
  std::size_t depth = 0;
  std::size_t id = 0;
  std::vector<std::pair<std::size_t, double>> fixings;
};

struct WorseNode {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  }
};

// True when every objective term is an integer multiple of a binary, so all
// integer-feasible objective values are integers.
inline bool has_integral_objective(const MilpModel& model) {
  for (const auto& t : model.objective()) {
    if (t.coeff == 0.0) continue;
    if (model.variables()[t.var.index].kind != VarKind::binary) return false;
    if (t.coeff != std::round(t.coeff)) return false;
  }
  return true;
}

}  // namespace detail

inline Solution solve_milp(const MilpModel& model, const MilpConfig& config = {}) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  std::vector<std::size_t> binaries;
  for (const auto& v : model.variables()) {
    if (v.kind == VarKind::binary) binaries.push_back(v.id.index);
  }
  const bool integral = detail::has_integral_objective(model);

  BoundedSimplex simplex(model);
  Solution result;
  double incumbent_value = kInfinity;
  std::vector<double> incumbent;
  if (!config.start.empty()) {
    std::vector<double> hint = config.start;
    for (std::size_t j : binaries) {
      if (j < hint.size()) hint[j] = std::round(hint[j]);
    }
    if (check_solution(model, hint, config.feasibility_tol, config.integrality_tol).feasible) {
      incumbent_value = model.evaluate_objective(hint);
      incumbent = std::move(hint);
    }
  }

  auto pruned = [&](double bound) {
    if (incumbent.empty()) return false;
    if (integral) return std::ceil(bound - 1e-6) >= incumbent_value - 0.5;
    return bound >= incumbent_value - 1e-9 * (1.0 + std::abs(incumbent_value));
  };

  std::priority_queue<detail::Node, std::vector<detail::Node>, detail::WorseNode> open;
  std::size_t next_id = 0;
  open.push({-kInfinity, 0, next_id++, {}});
  bool root = true;
  bool limit_hit = false;

  while (!open.empty()) {
    if (result.nodes >= config.node_limit || elapsed() > config.time_limit_seconds) {
      limit_hit = true;
      break;
    }
    detail::Node node = open.top();
    open.pop();
    if (pruned(node.bound)) continue;
    ++result.nodes;

    simplex.reset_bounds();
    for (auto [var, value] : node.fixings) simplex.set_bounds(var, value, value);
    const LpStatus status = simplex.solve();
    if (status == LpStatus::unbounded) {
      result.status = SolveStatus::unbounded;
      result.lp_iterations = simplex.iterations();
      return result;
    }
    if (status == LpStatus::infeasible) {
      root = false;
      continue;
    }
    const std::vector<double> x = simplex.primal_values();
    const double objective = model.evaluate_objective(x);
    if (root) {
      result.root_bound = objective;
      root = false;
    }
    if (pruned(objective)) continue;

    std::size_t branch_var = static_cast<std::size_t>(-1);
    double best_frac = config.integrality_tol;
    for (std::size_t j : binaries) {
      const double frac = std::abs(x[j] - std::round(x[j]));
      if (frac > best_frac + 1e-12) {
        best_frac = frac;
        branch_var = j;
      }
    }
    if (branch_var == static_cast<std::size_t>(-1)) {
      if (objective < incumbent_value) {
        incumbent_value = objective;
        incumbent = x;
      }
      continue;
    }
    const bool up_first = x[branch_var] >= 0.5;
    for (int k = 0; k < 2; ++k) {
      const double value = (k == 0) == up_first ? 1.0 : 0.0;
      detail::Node child{objective, node.depth + 1, next_id++, node.fixings};
      child.fixings.emplace_back(branch_var, value);
      open.push(std::move(child));
    }
  }

  result.lp_iterations = simplex.iterations();
  if (incumbent.empty()) {
    result.status = limit_hit ? SolveStatus::time_limit : SolveStatus::infeasible;
    return result;
  }

  // Re-solve with every binary fixed at its rounded value so binaries are
  // exactly integral and the continuous part is consistent with them.
  simplex.reset_bounds();
  for (std::size_t j : binaries) {
    const double v = std::round(incumbent[j]);
    simplex.set_bounds(j, v, v);
  }
  std::vector<double> values = incumbent;
  if (simplex.solve() == LpStatus::optimal) {
    values = simplex.primal_values();
  }
  for (std::size_t j : binaries) values[j] = std::round(values[j]);

  result.has_incumbent = true;
  result.values = std::move(values);
  result.objective_value = model.evaluate_objective(result.values);
  result.status = limit_hit ? SolveStatus::time_limit : SolveStatus::optimal;
  result.lp_iterations = simplex.iterations();
  return result;
}

}  // namespace kinreal::milp
