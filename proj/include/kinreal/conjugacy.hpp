#pragma once

// Linear conjugacy x -> T^-1 x with T = diag(c). A solved A_b with
// Y A_b = T^-1 M becomes the conjugate network A_k' = A_b diag(Psi(c)); then
// Y A_k' Psi(T^-1 x) = Y A_b Psi(x), so T Y A_k' Psi(T^-1 x) reproduces the
// given vector field M Psi(x).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "kinreal/network.hpp"

namespace kinreal {

struct ConjugacyResult {
  KineticsMatrix A_b;
  Vector c;
  KineticsMatrix A_k_prime;
  /// diag(c).
  Matrix T;
};

namespace detail {

inline void require_positive(const Vector& c) {
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (!(c(i) > 0.0) || !std::isfinite(c(i))) {
      throw std::invalid_argument("conjugacy constants must be positive and finite");
    }
  }
}

inline KineticsMatrix scale_columns(const KineticsMatrix& a, const Vector& factors) {
  Matrix off = a.matrix();
  for (Eigen::Index j = 0; j < off.cols(); ++j) off.col(j) *= factors(j);
  return KineticsMatrix::from_off_diagonal(off);
}

}  // namespace detail

/// [A_k']_ij = [A_b]_ij * Psi_j(c). With c = 1 the result equals A_b exactly.
inline KineticsMatrix apply_transform(const KineticsMatrix& a_b, const Vector& c,
                                      const StoichMatrix& y) {
  detail::require_positive(c);
  if (static_cast<std::size_t>(y.cols()) != a_b.size() || y.rows() != c.size()) {
    throw std::invalid_argument("dimension mismatch in apply_transform");
  }
  if ((c.array() == 1.0).all()) return a_b;
  return detail::scale_columns(a_b, mass_action(y, c));
}

/// Inverse of apply_transform: A_b = A_k' diag(Psi(c))^-1.
inline KineticsMatrix remove_transform(const KineticsMatrix& a_k_prime, const Vector& c,
                                       const StoichMatrix& y) {
  detail::require_positive(c);
  if ((c.array() == 1.0).all()) return a_k_prime;
  return detail::scale_columns(a_k_prime, mass_action(y, c).cwiseInverse());
}

inline ConjugacyResult make_conjugacy(const KineticsMatrix& a_b, const Vector& c,
                                      const StoichMatrix& y) {
  return {a_b, c, apply_transform(a_b, c, y), Matrix(c.asDiagonal())};
}

struct ConjugacyReport {
  bool passed = true;
  std::uint64_t seed = 42;
  std::size_t samples = 0;
  /// max over samples of |f(x) - T g(T^-1 x)|_inf / (1 + |f(x)|_inf).
  double max_relative_residual = 0.0;
  /// max entry of |M - T Y A_b|.
  double algebraic_residual = 0.0;
  bool algebraic_passed = true;
  std::optional<Vector> first_failure;
  double first_failure_residual = 0.0;
};

struct ConjugacyTolerances {
  double sample_relative = 1e-6;
  double algebraic = 1e-7;
};

/// Checks the conjugacy between the given field M Psi(x) (M = Y A_k_given)
/// and the network A_k' at `sample_count` points drawn uniformly from
/// [0.1, 10]^n, plus the entrywise identity M = T Y A_b.
inline ConjugacyReport check_conjugacy_field(const StoichMatrix& y, const Matrix& m,
                                             const KineticsMatrix& a_k_prime, const Vector& c,
                                             std::size_t sample_count, std::uint64_t seed = 42,
                                             ConjugacyTolerances tol = {}) {
  detail::require_positive(c);
  const Eigen::Index n = y.rows();
  if (m.rows() != n || m.cols() != y.cols() || c.size() != n ||
      a_k_prime.size() != static_cast<std::size_t>(y.cols())) {
    throw std::invalid_argument("dimension mismatch in check_conjugacy");
  }
  ConjugacyReport report;
  report.seed = seed;
  report.samples = sample_count;

  const Matrix yd = y.cast<double>();
  const KineticsMatrix a_b = remove_transform(a_k_prime, c, y);
  const Matrix identity_gap = m - c.asDiagonal() * (yd * a_b.matrix());
  report.algebraic_residual = identity_gap.size() == 0 ? 0.0 : identity_gap.cwiseAbs().maxCoeff();
  report.algebraic_passed = report.algebraic_residual <= tol.algebraic;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coordinate(0.1, 10.0);
  const Vector t = c.cwiseInverse();
  for (std::size_t k = 0; k < sample_count; ++k) {
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = coordinate(rng);
    const Vector given = m * mass_action(y, x);
    const Vector conjugate =
        c.asDiagonal() * (yd * (a_k_prime.matrix() * mass_action(y, t.asDiagonal() * x)));
    const double scale = 1.0 + (given.size() ? given.cwiseAbs().maxCoeff() : 0.0);
    const double residual = given.size() ? (given - conjugate).cwiseAbs().maxCoeff() / scale : 0.0;
    report.max_relative_residual = std::max(report.max_relative_residual, residual);
    if (residual > tol.sample_relative && !report.first_failure) {
      report.first_failure = x;
      report.first_failure_residual = residual;
    }
  }
  report.passed = report.algebraic_passed && !report.first_failure;
  return report;
}

inline ConjugacyReport check_conjugacy(const StoichMatrix& y, const KineticsMatrix& a_k_given,
                                       const KineticsMatrix& a_k_prime, const Vector& c,
                                       std::size_t sample_count, std::uint64_t seed = 42,
                                       ConjugacyTolerances tol = {}) {
  const Matrix m = y.cast<double>() * a_k_given.matrix();
  return check_conjugacy_field(y, m, a_k_prime, c, sample_count, seed, tol);
}

enum class TrajectoryVerdict { agree, disagree, inconclusive };

inline const char* to_string(TrajectoryVerdict v) {
  switch (v) {
    case TrajectoryVerdict::agree: return "agree";
    case TrajectoryVerdict::disagree: return "disagree";
    case TrajectoryVerdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

struct TrajectoryReport {
  TrajectoryVerdict verdict = TrajectoryVerdict::inconclusive;
  double max_error = 0.0;
  /// Step size that met the halving criterion (0 if none did).
  double step = 0.0;
  std::string note;
};

namespace detail {

using Field = std::function<Vector(const Vector&)>;

inline bool in_range(const Vector& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x(i)) || x(i) < 1e-12 || x(i) > 1e12) return false;
  }
  return true;
}

// Classical RK4 from 0 to t_end in `steps` equal steps, recording the state
// at every multiple of t_end / checkpoints. Empty when the state leaves
// [1e-12, 1e12].
inline std::vector<Vector> rk4(const Field& f, Vector x, double t_end, std::size_t steps,
                               std::size_t checkpoints) {
  const double h = t_end / static_cast<double>(steps);
  const std::size_t every = steps / checkpoints;
  std::vector<Vector> out;
  for (std::size_t k = 1; k <= steps; ++k) {
    const Vector k1 = f(x);
    const Vector k2 = f(x + 0.5 * h * k1);
    const Vector k3 = f(x + 0.5 * h * k2);
    const Vector k4 = f(x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!in_range(x)) return {};
    if (k % every == 0) out.push_back(x);
  }
  return out;
}

// Halves the step from t_end / (10 * checkpoints) until the endpoint moves
// by less than `tol`.
inline std::optional<std::pair<std::vector<Vector>, double>> converged_rk4(
    const Field& f, const Vector& x0, double t_end, std::size_t checkpoints, double tol) {
  std::size_t steps = 10 * checkpoints;
  auto previous = rk4(f, x0, t_end, steps, checkpoints);
  if (previous.empty()) return std::nullopt;
  for (int halving = 0; halving < 16; ++halving) {
    steps *= 2;
    auto current = rk4(f, x0, t_end, steps, checkpoints);
    if (current.empty()) return std::nullopt;
    const double change = (current.back() - previous.back()).cwiseAbs().maxCoeff();
    if (change < tol) return std::make_pair(std::move(current), t_end / static_cast<double>(steps));
    previous = std::move(current);
  }
  return std::nullopt;
}

}  // namespace detail

/// Integrates the given system from x0 and the conjugate one from T^-1 x0
/// and compares T^-1 Phi(x0, t) with Phi~(T^-1 x0, t) at 10 checkpoints.
/// Advisory: a stiff or blowing-up instance is reported inconclusive.
inline TrajectoryReport trajectory_check(const StoichMatrix& y, const KineticsMatrix& a_k_given,
                                         const KineticsMatrix& a_k_prime, const Vector& c,
                                         const Vector& x0, double t_end, double tol = 1e-5) {
  detail::require_positive(c);
  if (x0.size() != y.rows() || c.size() != y.rows()) {
    throw std::invalid_argument("dimension mismatch in trajectory_check");
  }
  for (Eigen::Index i = 0; i < x0.size(); ++i) {
    if (!(x0(i) > 0.0)) throw std::invalid_argument("initial state must be strictly positive");
  }
  if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
  constexpr std::size_t kCheckpoints = 10;
  constexpr double kHalvingTol = 1e-8;
  const Vector t = c.cwiseInverse();

  detail::Field given = [&](const Vector& x) { return rhs(y, a_k_given, x); };
  detail::Field conjugate = [&](const Vector& x) { return rhs(y, a_k_prime, x); };
  auto phi = detail::converged_rk4(given, x0, t_end, kCheckpoints, kHalvingTol);
  auto phi_tilde = detail::converged_rk4(conjugate, t.asDiagonal() * x0, t_end, kCheckpoints,
                                         kHalvingTol);
  TrajectoryReport report;
  if (!phi || !phi_tilde) {
    report.note = "integration left [1e-12, 1e12] or did not converge under step halving";
    return report;
  }
  report.step = std::min(phi->second, phi_tilde->second);
  for (std::size_t k = 0; k < kCheckpoints; ++k) {
    const Vector mapped = t.asDiagonal() * phi->first[k];
    report.max_error = std::max(report.max_error, (mapped - phi_tilde->first[k]).cwiseAbs().maxCoeff());
  }
  report.verdict = report.max_error <= tol ? TrajectoryVerdict::agree : TrajectoryVerdict::disagree;
  return report;
}

}  // namespace kinreal
