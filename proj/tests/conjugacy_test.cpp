#include <cmath>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "kinreal/conjugacy.hpp"
#include "kinreal/io.hpp"
#include "kinreal/realize.hpp"
#include "kinreal/verify.hpp"

namespace kinreal {
namespace {

Realization example1() { return with_matrices(parse_network(read_file(KINREAL_DATA_DIR "/example1.rxn"))); }

Realization example3() {
  const Realization base = canonical_realization(parse_polysystem(read_file(KINREAL_DATA_DIR "/example3.ode")));
  return apply_complex_list(base, parse_complex_list(read_file(KINREAL_DATA_DIR "/example3.complexes"),
                                                     base.network.species()));
}

CandidateSolution load_solution(const char* file) {
  return solution_from_json(parse_json(read_file(std::string(KINREAL_DATA_DIR) + "/" + file)));
}

KineticsMatrix random_kinetics(std::mt19937_64& rng, Eigen::Index m, double density) {
  std::uniform_real_distribution<double> unit(0.0, 1.0), rate(0.1, 10.0);
  Matrix off = Matrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (i != j && unit(rng) < density) off(i, j) = rate(rng);
    }
  }
  return KineticsMatrix::from_off_diagonal(off);
}

StoichMatrix random_complexes(std::mt19937_64& rng, Eigen::Index n, Eigen::Index m) {
  std::uniform_int_distribution<int> coeff(0, 3);
  StoichMatrix y(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) y(i, j) = coeff(rng);
  }
  return y;
}

// Conjugate field written reaction by reaction:
// sum over C_j -> C_i of c (.) (y_i - y_j) k'_ij prod_s (x_s / c_s)^y_sj.
Vector conjugate_field(const StoichMatrix& y, const KineticsMatrix& a_prime, const Vector& c, const Vector& x) {
  Vector out = Vector::Zero(y.rows());
  const auto m = static_cast<std::size_t>(y.cols());
  for (std::size_t j = 0; j < m; ++j) {
    double monomial = 1.0;
    for (Eigen::Index s = 0; s < y.rows(); ++s) monomial *= std::pow(x(s) / c(s), y(s, static_cast<Eigen::Index>(j)));
    for (std::size_t i = 0; i < m; ++i) {
      if (i == j || a_prime.rate(j, i) == 0.0) continue;
      const Vector step = (y.col(static_cast<Eigen::Index>(i)) - y.col(static_cast<Eigen::Index>(j))).cast<double>();
      out += a_prime.rate(j, i) * monomial * c.cwiseProduct(step);
    }
  }
  return out;
}

TEST(ApplyTransform, IdentityIsBitwise) {
  std::mt19937_64 rng(1);
  const KineticsMatrix a = random_kinetics(rng, 6, 0.5);
  const StoichMatrix y = random_complexes(rng, 3, 6);
  const KineticsMatrix out = apply_transform(a, Vector::Ones(3), y);
  EXPECT_EQ(out.matrix(), a.matrix());
  EXPECT_EQ(make_conjugacy(a, Vector::Ones(3), y).A_k_prime.matrix(), a.matrix());
}

TEST(ApplyTransform, PreservesZeroPattern) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const KineticsMatrix a = random_kinetics(rng, 5, 0.4);
    const StoichMatrix y = random_complexes(rng, 3, 5);
    const Vector c = Vector::Random(3).cwiseAbs() + Vector::Constant(3, 0.1);
    const KineticsMatrix out = apply_transform(a, c, y);
    for (std::size_t i = 0; i < 5; ++i) {
      for (std::size_t j = 0; j < 5; ++j) {
        if (i == j) continue;
        EXPECT_EQ(out.rate(j, i) == 0.0, a.rate(j, i) == 0.0);
      }
    }
    const KineticsMatrix back = remove_transform(out, c, y);
    EXPECT_LE((back.matrix() - a.matrix()).cwiseAbs().maxCoeff(), 1e-12 * (1.0 + a.matrix().cwiseAbs().maxCoeff()));
  }
}

TEST(ApplyTransform, ZeroStaysZero) {
  const StoichMatrix y = StoichMatrix::Ones(2, 3);
  EXPECT_TRUE(apply_transform(KineticsMatrix(3), Vector::Constant(2, 7.0), y).matrix().isZero());
}

TEST(ApplyTransform, RejectsNonpositiveConstants) {
  const StoichMatrix y = StoichMatrix::Ones(2, 2);
  EXPECT_THROW(apply_transform(KineticsMatrix(2), Eigen::Vector2d(1.0, 0.0), y), std::invalid_argument);
  EXPECT_THROW(apply_transform(KineticsMatrix(2), Eigen::Vector2d(-1.0, 2.0), y), std::invalid_argument);
}

TEST(ApplyTransform, MatchesReactionwiseField) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> point(0.1, 10.0), constant(0.2, 5.0);
  for (int trial = 0; trial < 40; ++trial) {
    const KineticsMatrix a_b = random_kinetics(rng, 5, 0.5);
    const StoichMatrix y = random_complexes(rng, 3, 5);
    Vector c(3);
    for (Eigen::Index s = 0; s < 3; ++s) c(s) = constant(rng);
    const KineticsMatrix a_prime = apply_transform(a_b, c, y);
    const Matrix m = c.asDiagonal() * (y.cast<double>() * a_b.matrix());
    for (int k = 0; k < 10; ++k) {
      Vector x(3);
      for (Eigen::Index s = 0; s < 3; ++s) x(s) = point(rng);
      const Vector given = m * mass_action(y, x);
      const Vector oracle = conjugate_field(y, a_prime, c, x);
      ASSERT_LE((given - oracle).cwiseAbs().maxCoeff(), 1e-9 * (1.0 + given.cwiseAbs().maxCoeff()));
    }
    EXPECT_TRUE(check_conjugacy_field(y, m, a_prime, c, 20).passed);
  }
}

TEST(CheckConjugacy, PublishedSparseExample1) {
  const Realization r = example1();
  const CandidateSolution s = load_solution("example1_sparse_published.json");
  const KineticsMatrix a_prime = kinetics_over(s.network, r.network.complexes());
  const ConjugacyReport report = check_conjugacy(r.Y, build_Ak(r.network), a_prime, s.c, 100);
  EXPECT_TRUE(report.passed);
  EXPECT_LE(report.algebraic_residual, 1e-12);
  EXPECT_EQ(report.samples, 100u);
}

TEST(CheckConjugacy, DetectsPerturbation) {
  const Realization r = example1();
  const CandidateSolution s = load_solution("example1_sparse_published.json");
  Matrix off = kinetics_over(s.network, r.network.complexes()).matrix();
  off.diagonal().setZero();
  Eigen::Index row = 0, col = 0;
  off.maxCoeff(&row, &col);
  off(row, col) += 1e-3;
  const ConjugacyReport report =
      check_conjugacy(r.Y, build_Ak(r.network), KineticsMatrix::from_off_diagonal(off), s.c, 100);
  EXPECT_FALSE(report.passed);
  EXPECT_FALSE(report.algebraic_passed);
  ASSERT_TRUE(report.first_failure.has_value());
  EXPECT_EQ(report.first_failure->size(), 2);
}

TEST(CheckConjugacy, SolvedSparseExample3) {
  const Realization r = example3();
  ProblemSettings s;
  s.weakly_reversible = true;
  s.conjugacy = Conjugacy::scaling;
  s.epsilon = 1.0 / 20.0;
  s.u = 20.0;
  const auto p = make_problem(r, s);
  const RealizeOutcome out = realize(p);
  ASSERT_EQ(out.status, milp::SolveStatus::optimal);
  const RealizationResult& res = out.decoded->result;
  const KineticsMatrix a_prime = apply_transform(res.A_b, res.c, p.Y);
  const ConjugacyReport report = check_conjugacy_field(p.Y, p.M, a_prime, res.c, 100);
  EXPECT_TRUE(report.passed) << report.max_relative_residual;

  const TrajectoryReport traj =
      trajectory_check(p.Y, build_Ak(r.network), a_prime, res.c, Vector::Ones(3), 5.0);
  EXPECT_EQ(traj.verdict, TrajectoryVerdict::agree) << traj.note << " " << traj.max_error;
}

TEST(Trajectory, IdentityAgrees) {
  const Realization r = example1();
  const KineticsMatrix a = build_Ak(r.network);
  const TrajectoryReport traj = trajectory_check(r.Y, a, a, Vector::Ones(2), Eigen::Vector2d(1.0, 2.0), 1.0);
  EXPECT_EQ(traj.verdict, TrajectoryVerdict::agree);
  EXPECT_EQ(traj.max_error, 0.0);
}

TEST(Trajectory, RejectsBadInputs) {
  const Realization r = example1();
  const KineticsMatrix a = build_Ak(r.network);
  EXPECT_THROW(trajectory_check(r.Y, a, a, Vector::Ones(2), Eigen::Vector2d(0.0, 1.0), 1.0), std::invalid_argument);
  EXPECT_THROW(trajectory_check(r.Y, a, a, Eigen::Vector2d(1.0, 0.0), Vector::Ones(2), 1.0), std::invalid_argument);
  EXPECT_THROW(trajectory_check(r.Y, a, a, Vector::Ones(2), Vector::Ones(2), 0.0), std::invalid_argument);
}

TEST(Trajectory, WrongNetworkDisagrees) {
  const Realization r = example1();
  const KineticsMatrix a = build_Ak(r.network);
  Matrix off = a.matrix();
  off.diagonal().setZero();
  off *= 2.0;
  const TrajectoryReport traj = trajectory_check(r.Y, a, KineticsMatrix::from_off_diagonal(off), Vector::Ones(2),
                                                 Vector::Ones(2), 0.5);
  EXPECT_NE(traj.verdict, TrajectoryVerdict::agree);
}

}  // namespace
}  // namespace kinreal
