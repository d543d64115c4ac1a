#include <chrono>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "kinreal/milp/branch_and_bound.hpp"
#include "kinreal/milp/check.hpp"
#include "kinreal/milp/lp_format.hpp"
#include "kinreal/milp/model.hpp"
#include "kinreal/milp/simplex.hpp"

namespace kinreal::milp {
namespace {

TEST(SolveLp, SingleLowerBoundRow) {
  MilpModel model;
  VarId x = model.add_continuous("x", -kInfinity, kInfinity);
  model.add_constraint({{x, 1.0}}, Relation::greater_equal, 3.0);
  model.set_objective({{x, 1.0}});
  Solution s = solve_lp(model);
  ASSERT_EQ(s.status, SolveStatus::optimal);
  EXPECT_NEAR(s.value(x), 3.0, 1e-12);
  EXPECT_NEAR(s.objective_value, 3.0, 1e-12);
}

TEST(SolveLp, ContradictoryEqualities) {
  MilpModel model;
  VarId x = model.add_continuous("x", -kInfinity, kInfinity);
  model.add_constraint({{x, 1.0}}, Relation::equal, 1.0);
  model.add_constraint({{x, 1.0}}, Relation::equal, 2.0);
  Solution s = solve_lp(model);
  EXPECT_EQ(s.status, SolveStatus::infeasible);
}

TEST(SolveLp, BoxedSimplexCorner) {
  MilpModel model;
  VarId x = model.add_continuous("x", 0.0, 1.0);
  VarId y = model.add_continuous("y", 0.0, 1.0);
  model.add_constraint({{x, 1.0}, {y, 1.0}}, Relation::less_equal, 1.0);
  model.set_objective({{x, -1.0}, {y, -1.0}});
  Solution s = solve_lp(model);
  ASSERT_EQ(s.status, SolveStatus::optimal);
  EXPECT_NEAR(s.objective_value, -1.0, 1e-12);
}

TEST(SolveLp, Unbounded) {
  MilpModel model;
  VarId x = model.add_continuous("x");
  VarId y = model.add_continuous("y");
  model.add_constraint({{x, 1.0}, {y, -1.0}}, Relation::less_equal, 1.0);
  model.set_objective({{x, -1.0}});
  EXPECT_EQ(solve_lp(model).status, SolveStatus::unbounded);
}

TEST(SolveLp, FreeVariablesAndMixedRows) {
  // min x + 2y s.t. x + y >= 2, x - y = 0.5, x free, y >= -1
  MilpModel model;
  VarId x = model.add_continuous("x", -kInfinity, kInfinity);
  VarId y = model.add_continuous("y", -1.0, kInfinity);
  model.add_constraint({{x, 1.0}, {y, 1.0}}, Relation::greater_equal, 2.0);
  model.add_constraint({{x, 1.0}, {y, -1.0}}, Relation::equal, 0.5);
  model.set_objective({{x, 1.0}, {y, 2.0}});
  Solution s = solve_lp(model);
  ASSERT_EQ(s.status, SolveStatus::optimal);
  EXPECT_NEAR(s.value(x), 1.25, 1e-12);
  EXPECT_NEAR(s.value(y), 0.75, 1e-12);
}

TEST(SolveLp, ReSolveAfterBoundChange) {
  MilpModel model;
  VarId x = model.add_continuous("x", 0.0, 10.0);
  VarId y = model.add_continuous("y", 0.0, 10.0);
  model.add_constraint({{x, 1.0}, {y, 2.0}}, Relation::less_equal, 8.0);
  model.set_objective({{x, -1.0}, {y, -1.0}});
  BoundedSimplex simplex(model);
  ASSERT_EQ(simplex.solve(), LpStatus::optimal);
  EXPECT_NEAR(simplex.objective_value(), -8.0, 1e-12);
  simplex.set_bounds(x.index, 0.0, 2.0);
  ASSERT_EQ(simplex.solve(), LpStatus::optimal);
  EXPECT_NEAR(simplex.objective_value(), -5.0, 1e-12);
  simplex.set_bounds(y.index, 4.5, 10.0);
  EXPECT_EQ(simplex.solve(), LpStatus::infeasible);
  simplex.reset_bounds();
  ASSERT_EQ(simplex.solve(), LpStatus::optimal);
  EXPECT_NEAR(simplex.objective_value(), -8.0, 1e-12);
}

TEST(SolveMilp, KnapsackMatchesEnumeration) {
  // max 5a + 4b s.t. 3a + 2b <= 4 over binaries; enumerate the four points.
  double best = -kInfinity;
  for (int a = 0; a <= 1; ++a) {
    for (int b = 0; b <= 1; ++b) {
      if (3 * a + 2 * b <= 4) best = std::max(best, 5.0 * a + 4.0 * b);
    }
  }
  ASSERT_EQ(best, 5.0);
  MilpModel model;
  VarId a = model.add_binary("a");
  VarId b = model.add_binary("b");
  model.add_constraint({{a, 3.0}, {b, 2.0}}, Relation::less_equal, 4.0);
  model.set_objective({{a, -5.0}, {b, -4.0}});
  Solution s = solve_milp(model);
  ASSERT_EQ(s.status, SolveStatus::optimal);
  EXPECT_NEAR(-s.objective_value, best, 1e-9);
  EXPECT_EQ(s.value(a), 1.0);
  EXPECT_EQ(s.value(b), 0.0);
  EXPECT_LE(s.root_bound, s.objective_value + 1e-9);
}

TEST(SolveMilp, IntegerInfeasibleWithFeasibleRelaxation) {
  MilpModel model;
  VarId a = model.add_binary("a");
  VarId b = model.add_binary("b");
  model.add_constraint({{a, 1.0}, {b, 1.0}}, Relation::equal, 0.5);
  EXPECT_EQ(solve_lp(model).status, SolveStatus::optimal);
  EXPECT_EQ(solve_milp(model).status, SolveStatus::infeasible);
}

TEST(SolveMilp, MixedBigMIndicator) {
  // x in {0} U [2, 5] via indicator d; minimize -x + 3d.
  MilpModel model;
  VarId x = model.add_continuous("x");
  VarId d = model.add_binary("d");
  model.add_constraint({{x, 1.0}, {d, -2.0}}, Relation::greater_equal, 0.0);
  model.add_constraint({{x, 1.0}, {d, -5.0}}, Relation::less_equal, 0.0);
  model.set_objective({{x, -1.0}, {d, 3.0}});
  Solution s = solve_milp(model);
  ASSERT_EQ(s.status, SolveStatus::optimal);
  EXPECT_NEAR(s.objective_value, -2.0, 1e-9);
  EXPECT_NEAR(s.value(x), 5.0, 1e-9);
}

struct BinaryInstance {
  MilpModel model;
  std::vector<VarId> vars;
};

BinaryInstance random_binary_instance(std::mt19937& rng) {
  std::uniform_int_distribution<int> count(1, 10);
  std::uniform_int_distribution<int> coeff(-6, 9);
  std::uniform_int_distribution<int> rows(1, 5);
  std::uniform_int_distribution<int> relation(0, 5);
  BinaryInstance inst;
  const int k = count(rng);
  for (int i = 0; i < k; ++i) inst.vars.push_back(inst.model.add_binary("b" + std::to_string(i)));
  const int r = rows(rng);
  for (int c = 0; c < r; ++c) {
    std::vector<LinearTerm> terms;
    double total = 0.0;
    for (VarId v : inst.vars) {
      int a = coeff(rng);
      if (a != 0) terms.push_back({v, static_cast<double>(a)});
      total += std::abs(a);
    }
    std::uniform_real_distribution<double> rhs(-0.2 * total, 0.6 * total);
    const int rel = relation(rng);
    const Relation relation_kind =
        rel == 0 ? Relation::equal : (rel <= 3 ? Relation::less_equal : Relation::greater_equal);
    double b = std::round(rhs(rng));
    inst.model.add_constraint(std::move(terms), relation_kind, b);
  }
  std::vector<LinearTerm> objective;
  for (VarId v : inst.vars) objective.push_back({v, static_cast<double>(coeff(rng))});
  inst.model.set_objective(std::move(objective));
  return inst;
}

// Exhaustive oracle: enumerate all 2^k assignments.
std::pair<bool, double> enumerate_optimum(const BinaryInstance& inst) {
  const std::size_t k = inst.vars.size();
  bool any = false;
  double best = kInfinity;
  std::vector<double> x(k);
  for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
    for (std::size_t i = 0; i < k; ++i) x[i] = (mask >> i) & 1u ? 1.0 : 0.0;
    bool ok = true;
    for (const auto& c : inst.model.constraints()) {
      double act = 0.0;
      for (const auto& t : c.terms) act += t.coeff * x[t.var.index];
      if ((c.relation == Relation::less_equal && act > c.rhs) ||
          (c.relation == Relation::greater_equal && act < c.rhs) ||
          (c.relation == Relation::equal && act != c.rhs)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    any = true;
    best = std::min(best, inst.model.evaluate_objective(x));
  }
  return {any, best};
}

TEST(SolveMilp, RandomBinaryModelsMatchEnumeration) {
  std::mt19937 rng(7);
  int feasible = 0;
  for (int trial = 0; trial < 60; ++trial) {
    BinaryInstance inst = random_binary_instance(rng);
    auto [any, best] = enumerate_optimum(inst);
    Solution s = solve_milp(inst.model);
    if (!any) {
      EXPECT_EQ(s.status, SolveStatus::infeasible) << "trial " << trial;
      continue;
    }
    ++feasible;
    ASSERT_EQ(s.status, SolveStatus::optimal) << "trial " << trial;
    EXPECT_NEAR(s.objective_value, best, 1e-9) << "trial " << trial;
    EXPECT_TRUE(check_solution(inst.model, s.values).feasible);
    EXPECT_LE(s.root_bound, s.objective_value + 1e-7);
  }
  EXPECT_GT(feasible, 20);
}

TEST(SolveMilp, IdenticalModelsGiveIdenticalSolutions) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    BinaryInstance inst = random_binary_instance(rng);
    Solution a = solve_milp(inst.model);
    Solution b = solve_milp(inst.model);
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(a.nodes, b.nodes);
  }
}

TEST(SolveMilp, NodeLimitReportsLimitStatus) {
  std::mt19937 rng(3);
  MilpModel model;
  std::vector<LinearTerm> row, obj;
  for (int i = 0; i < 12; ++i) {
    VarId v = model.add_binary("b" + std::to_string(i));
    row.push_back({v, 2.0});
    obj.push_back({v, -1.0});
  }
  model.add_constraint(row, Relation::equal, 11.0);  // odd rhs: integer infeasible
  model.set_objective(obj);
  MilpConfig config;
  config.node_limit = 5;
  Solution s = solve_milp(model, config);
  EXPECT_EQ(s.status, SolveStatus::time_limit);
  EXPECT_FALSE(s.has_incumbent);
}

TEST(CheckSolution, FlagsEachViolationKind) {
  MilpModel model;
  VarId x = model.add_continuous("x", 0.0, 1.0);
  VarId b = model.add_binary("b");
  model.add_constraint({{x, 1.0}, {b, 1.0}}, Relation::less_equal, 1.0, "cap");
  auto ok = check_solution(model, {0.5, 0.0});
  EXPECT_TRUE(ok.feasible);
  auto bad = check_solution(model, {1.5, 0.5});
  EXPECT_FALSE(bad.feasible);
  EXPECT_EQ(bad.violations.size(), 3u);  // bound, fractional, row
}

TEST(LpFormat, SingleVariableModel) {
  MilpModel model;
  VarId x = model.add_continuous("x", 1.0, 4.0);
  model.set_objective({{x, 1.0}});
  const std::string text = export_lp_file(model);
  EXPECT_NE(text.find("Minimize"), std::string::npos);
  EXPECT_NE(text.find("Bounds"), std::string::npos);
  EXPECT_NE(text.find("End"), std::string::npos);
  EXPECT_NE(text.find(" 1 <= x <= 4"), std::string::npos);
}

TEST(LpFormat, EqualityRowEmittedOnce) {
  MilpModel model;
  VarId x = model.add_continuous("x");
  VarId y = model.add_binary("y");
  model.add_constraint({{x, 1.0}, {y, -2.5}}, Relation::equal, 0.0);
  const std::string text = export_lp_file(model);
  const auto first = text.find(" c1: 1 x - 2.5 y = 0");
  ASSERT_NE(first, std::string::npos);
  EXPECT_EQ(text.find(" = 0", text.find('\n', first)), std::string::npos);
  EXPECT_NE(text.find("Binaries\n y\n"), std::string::npos);
}

TEST(LpFormat, NamesAreSanitizedDeterministically) {
  MilpModel model;
  model.add_continuous("a[1,2]");
  model.add_continuous("a_1_2_");
  model.add_continuous("a[1,2]");
  model.add_continuous("e1");
  model.add_continuous("2x");
  auto names = sanitized_names(model);
  EXPECT_EQ(names, (std::vector<std::string>{"a_1_2_", "a_1_2__2", "a_1_2__3", "v_e1", "v_2x"}));
}

TEST(LpFormat, SolutionImportByExportedNames) {
  MilpModel model;
  VarId x = model.add_continuous("rate(1,2)");
  VarId d = model.add_binary("d");
  auto values = import_solution(model, "# solver output\nrate_1_2_ 2.5\n\nd 1\n");
  EXPECT_EQ(values[x.index], 2.5);
  EXPECT_EQ(values[d.index], 1.0);
  EXPECT_THROW(import_solution(model, "nope 1\n"), std::runtime_error);
  EXPECT_THROW(import_solution(model, "d\n"), std::runtime_error);
}

TEST(MilpModel, RejectsMalformedInput) {
  MilpModel model;
  VarId x = model.add_continuous("x");
  EXPECT_THROW(model.add_variable("b", VarKind::binary, 0.0, 2.0), std::invalid_argument);
  EXPECT_THROW(model.add_continuous("y", 2.0, 1.0), std::invalid_argument);
  EXPECT_THROW(model.add_constraint({{x, 1.0}, {x, 2.0}}, Relation::equal, 0.0),
               std::invalid_argument);
  EXPECT_THROW(model.add_constraint({{VarId{5}, 1.0}}, Relation::equal, 0.0),
               std::invalid_argument);
}

}  // namespace
}  // namespace kinreal::milp
