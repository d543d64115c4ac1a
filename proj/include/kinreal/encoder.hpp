#pragma once

// Translation of a realization problem into a MILP.
//
// Decision variables, for every ordered complex pair (i, j) with i != j:
//   a_i_j   [A]_{ij}, rate of C_j -> C_i in the sought network (A_k, or A_b
//           under scaling conjugacy); the diagonal is eliminated.
//   d_i_j   binary, 1 iff the reaction C_j -> C_i is present.
//   w_i_j   [A~]_{ij} = [A]_{ij} * b_j, the kernel-scaled copy used for the
//           weak reversibility balance (only when requested).
// and, under scaling conjugacy, t_s = 1 / c_s for every species s.
//
// Row families:
//   realization  sum_i (Y_si - Y_sj) a_i_j = M_sj           (identity)
//                sum_i (Y_si - Y_sj) a_i_j - M_sj t_s = 0   (scaling)
//   structure    a_i_j - eps d_i_j >= 0,  a_i_j - u_ij d_i_j <= 0
//   balance      sum_i w_i_j - sum_i w_j_i = 0 for every complex j
//   balance structure, the same two rows as structure for w_i_j
// Objective: minimize sum d (sparse) or -sum d (dense).

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kinreal/canonical.hpp"
#include "kinreal/kernel.hpp"
#include "kinreal/milp/model.hpp"
#include "kinreal/network.hpp"

namespace kinreal {

enum class Objective { sparse, dense };
enum class Conjugacy { identity, scaling };

inline const char* to_string(Objective o) { return o == Objective::sparse ? "sparse" : "dense"; }
inline const char* to_string(Conjugacy c) {
  return c == Conjugacy::identity ? "identity" : "scaling";
}

inline Matrix uniform_bounds(std::size_t complexes, double value) {
  Matrix u = Matrix::Constant(static_cast<Eigen::Index>(complexes),
                              static_cast<Eigen::Index>(complexes), value);
  u.diagonal().setZero();
  return u;
}

struct RealizationProblem {
  std::vector<std::string> species;
  StoichMatrix Y;
  /// Target n x m matrix, M = Y * A_k of the given network.
  Matrix M;
  Objective objective = Objective::sparse;
  bool weakly_reversible = false;
  Conjugacy conjugacy = Conjugacy::identity;
  /// Smallest rate of a present reaction.
  double epsilon = 0.1;
  /// Scaling variables are confined to [epsilon_c, 1 / epsilon_c].
  double epsilon_c = 0.1;
  /// Off-diagonal rate upper bounds u_ij.
  Matrix u;

  std::size_t species_count() const { return static_cast<std::size_t>(Y.rows()); }
  std::size_t complex_count() const { return static_cast<std::size_t>(Y.cols()); }

  std::vector<Complex> complexes() const {
    std::vector<Complex> out;
    for (Eigen::Index j = 0; j < Y.cols(); ++j) {
      Complex c{std::vector<int>(static_cast<std::size_t>(Y.rows()))};
      for (Eigen::Index i = 0; i < Y.rows(); ++i) c.coeffs[static_cast<std::size_t>(i)] = Y(i, j);
      out.push_back(std::move(c));
    }
    return out;
  }

  void validate() const {
    const auto n = Y.rows(), m = Y.cols();
    if (M.rows() != n || M.cols() != m) {
      throw std::invalid_argument("M must have the same shape as Y");
    }
    if (u.rows() != m || u.cols() != m) throw std::invalid_argument("u must be m x m");
    if (!species.empty() && static_cast<Eigen::Index>(species.size()) != n) {
      throw std::invalid_argument("species list length differs from Y's row count");
    }
    if ((Y.array() < 0).any()) throw std::invalid_argument("Y has a negative entry");
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (!(epsilon_c > 0.0 && epsilon_c <= 1.0)) {
      throw std::invalid_argument("epsilon_c must lie in (0, 1]");
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index i = 0; i < m; ++i) {
        if (i == j) continue;
        if (!(u(i, j) > 0.0) || !std::isfinite(u(i, j))) {
          throw std::invalid_argument("upper bounds u_ij must be positive and finite");
        }
        if (!(epsilon < u(i, j))) throw std::invalid_argument("epsilon must be below every u_ij");
      }
    }
    if (!M.allFinite()) throw std::invalid_argument("M has a non-finite entry");
  }
};

struct ProblemSettings {
  Objective objective = Objective::sparse;
  bool weakly_reversible = false;
  Conjugacy conjugacy = Conjugacy::identity;
  double epsilon = 0.1;
  /// Defaults to epsilon when unset.
  std::optional<double> epsilon_c;
  double u = 20.0;
  /// Overrides the scalar `u` when present.
  std::optional<Matrix> u_matrix;
};

inline RealizationProblem make_problem(const Realization& source, const ProblemSettings& s) {
  RealizationProblem p;
  p.species = source.network.species();
  p.Y = source.Y;
  p.M = source.M;
  p.objective = s.objective;
  p.weakly_reversible = s.weakly_reversible;
  p.conjugacy = s.conjugacy;
  p.epsilon = s.epsilon;
  p.epsilon_c = s.epsilon_c.value_or(s.epsilon);
  p.u = s.u_matrix ? *s.u_matrix : uniform_bounds(source.network.complex_count(), s.u);
  p.validate();
  return p;
}

inline RealizationProblem make_problem(const Network& given, const ProblemSettings& s) {
  return make_problem(with_matrices(given), s);
}

/// Handles to the encoded variables; entries for (i, i) are always empty.
struct VarMap {
  std::size_t species = 0;
  std::size_t complexes = 0;
  std::vector<std::optional<milp::VarId>> rate;
  std::vector<std::optional<milp::VarId>> indicator;
  std::vector<std::optional<milp::VarId>> balanced;
  std::vector<milp::VarId> scaling;

  std::size_t slot(std::size_t i, std::size_t j) const { return i * complexes + j; }
  std::optional<milp::VarId> rate_var(std::size_t i, std::size_t j) const {
    return rate.empty() ? std::nullopt : rate[slot(i, j)];
  }
  std::optional<milp::VarId> indicator_var(std::size_t i, std::size_t j) const {
    return indicator.empty() ? std::nullopt : indicator[slot(i, j)];
  }
  std::optional<milp::VarId> balanced_var(std::size_t i, std::size_t j) const {
    return balanced.empty() ? std::nullopt : balanced[slot(i, j)];
  }
};

struct EncodedModel {
  milp::MilpModel model;
  VarMap vars;
};

namespace detail {

inline std::string pair_name(const char* prefix, std::size_t i, std::size_t j) {
  return std::string(prefix) + "_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
}

inline void add_rate_variables(const RealizationProblem& p, EncodedModel& enc) {
  const std::size_t m = p.complex_count();
  enc.vars.species = p.species_count();
  enc.vars.complexes = m;
  if (!enc.vars.rate.empty()) throw std::logic_error("rate variables already encoded");
  enc.vars.rate.assign(m * m, std::nullopt);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i != j) enc.vars.rate[enc.vars.slot(i, j)] = enc.model.add_continuous(pair_name("a", i, j));
    }
  }
}

// sum_{i != j} (Y_si - Y_sj) a_i_j  for species s and source complex j.
inline std::vector<milp::LinearTerm> displacement_terms(const RealizationProblem& p,
                                                        const VarMap& vars, std::size_t s,
                                                        std::size_t j) {
  std::vector<milp::LinearTerm> terms;
  const auto si = static_cast<Eigen::Index>(s);
  const auto sj = static_cast<Eigen::Index>(j);
  for (std::size_t i = 0; i < p.complex_count(); ++i) {
    if (i == j) continue;
    const int delta = p.Y(si, static_cast<Eigen::Index>(i)) - p.Y(si, sj);
    if (delta != 0) terms.push_back({*vars.rate_var(i, j), static_cast<double>(delta)});
  }
  return terms;
}

inline void add_structure_rows(const RealizationProblem& p, EncodedModel& enc,
                               const std::vector<std::optional<milp::VarId>>& values,
                               const char* label) {
  const std::size_t m = p.complex_count();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      const milp::VarId value = *values[enc.vars.slot(i, j)];
      const milp::VarId on = *enc.vars.indicator_var(i, j);
      const double u = p.u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      enc.model.add_constraint({{value, 1.0}, {on, -p.epsilon}}, milp::Relation::greater_equal,
                               0.0, pair_name(label, i, j) + "_lo");
      enc.model.add_constraint({{value, 1.0}, {on, -u}}, milp::Relation::less_equal, 0.0,
                               pair_name(label, i, j) + "_hi");
    }
  }
}

}  // namespace detail

/// Dynamical equivalence Y * A_k = M over off-diagonal rates (identity
/// conjugacy). Adds n * m equality rows.
inline void encode_DE(const RealizationProblem& p, EncodedModel& enc) {
  if (p.conjugacy != Conjugacy::identity) {
    throw std::invalid_argument("dynamical-equivalence rows require identity conjugacy");
  }
  p.validate();
  detail::add_rate_variables(p, enc);
  for (std::size_t s = 0; s < p.species_count(); ++s) {
    for (std::size_t j = 0; j < p.complex_count(); ++j) {
      enc.model.add_constraint(detail::displacement_terms(p, enc.vars, s, j), milp::Relation::equal,
                               p.M(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(j)),
                               detail::pair_name("de", s, j));
    }
  }
}

/// Linear conjugacy Y * A_b = T^-1 * M, with the diagonal of T^-1 as
/// variables t_s in [epsilon_c, 1 / epsilon_c].
inline void encode_LC(const RealizationProblem& p, EncodedModel& enc) {
  if (p.conjugacy != Conjugacy::scaling) {
    throw std::invalid_argument("conjugacy rows require scaling conjugacy");
  }
  p.validate();
  detail::add_rate_variables(p, enc);
  for (std::size_t s = 0; s < p.species_count(); ++s) {
    enc.vars.scaling.push_back(enc.model.add_continuous("t_" + std::to_string(s + 1), p.epsilon_c,
                                                        1.0 / p.epsilon_c));
  }
  for (std::size_t s = 0; s < p.species_count(); ++s) {
    for (std::size_t j = 0; j < p.complex_count(); ++j) {
      auto terms = detail::displacement_terms(p, enc.vars, s, j);
      const double target = p.M(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(j));
      if (target != 0.0) terms.push_back({enc.vars.scaling[s], -target});
      enc.model.add_constraint(std::move(terms), milp::Relation::equal, 0.0,
                               detail::pair_name("lc", s, j));
    }
  }
}

/// Indicator binaries d_i_j with eps * d <= a <= u * d.
inline void encode_S(const RealizationProblem& p, EncodedModel& enc) {
  if (enc.vars.rate.empty()) throw std::logic_error("encode rate variables before structure rows");
  if (!enc.vars.indicator.empty()) throw std::logic_error("structure rows already encoded");
  const std::size_t m = p.complex_count();
  enc.vars.indicator.assign(m * m, std::nullopt);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i != j) {
        enc.vars.indicator[enc.vars.slot(i, j)] = enc.model.add_binary(detail::pair_name("d", i, j));
      }
    }
  }
  detail::add_structure_rows(p, enc, enc.vars.rate, "s");
}

/// Weak reversibility: a kernel-scaled copy w of the rate matrix with unit
/// vector in its kernel (inflow = outflow at every complex), sharing the
/// indicator binaries so both have the same support.
inline void encode_WR(const RealizationProblem& p, EncodedModel& enc) {
  if (!p.weakly_reversible) throw std::invalid_argument("weak reversibility was not requested");
  if (enc.vars.indicator.empty()) throw std::logic_error("encode structure rows before balance rows");
  if (!enc.vars.balanced.empty()) throw std::logic_error("balance rows already encoded");
  const std::size_t m = p.complex_count();
  enc.vars.balanced.assign(m * m, std::nullopt);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i != j) {
        enc.vars.balanced[enc.vars.slot(i, j)] = enc.model.add_continuous(detail::pair_name("w", i, j));
      }
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<milp::LinearTerm> terms;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == j) continue;
      terms.push_back({*enc.vars.balanced_var(i, j), 1.0});   // out of C_j
      terms.push_back({*enc.vars.balanced_var(j, i), -1.0});  // into C_j
    }
    enc.model.add_constraint(std::move(terms), milp::Relation::equal, 0.0,
                             "wr_" + std::to_string(j + 1));
  }
  detail::add_structure_rows(p, enc, enc.vars.balanced, "ws");
}

inline void encode_objective(const RealizationProblem& p, EncodedModel& enc) {
  if (enc.vars.indicator.empty()) throw std::logic_error("encode structure rows before the objective");
  const double sign = p.objective == Objective::sparse ? 1.0 : -1.0;
  std::vector<milp::LinearTerm> terms;
  for (const auto& d : enc.vars.indicator) {
    if (d) terms.push_back({*d, sign});
  }
  enc.model.set_objective(std::move(terms));
}

inline EncodedModel encode(const RealizationProblem& p) {
  p.validate();
  EncodedModel enc;
  if (p.conjugacy == Conjugacy::identity) {
    encode_DE(p, enc);
  } else {
    encode_LC(p, enc);
  }
  encode_S(p, enc);
  if (p.weakly_reversible) encode_WR(p, enc);
  encode_objective(p, enc);
  return enc;
}

/// Solved quantities in matrix form. `A_b` is the rate matrix found by the
/// solver (A_k itself under identity conjugacy).
struct RealizationResult {
  Eigen::MatrixXi support;
  KineticsMatrix A_b;
  std::optional<KineticsMatrix> balanced;
  /// Diagonal of T^-1.
  Vector t;
  /// Conjugacy constants, c = 1 / t.
  Vector c;
  /// Positive kernel vector of A_b, entries >= 1; all ones without balance rows.
  Vector b;
};

struct DecodedRealization {
  RealizationResult result;
  /// Network with A_b's reactions over the problem's complexes.
  Network network;
};

/// Reads a solver assignment back into matrices. Rates of absent reactions
/// within `zero_tol` are snapped to 0; a support inconsistency beyond that is
/// an internal error.
inline DecodedRealization decode(const std::vector<double>& values, const VarMap& vars,
                                 const RealizationProblem& p, double zero_tol = 1e-6) {
  const std::size_t m = p.complex_count();
  const std::size_t n = p.species_count();
  if (vars.complexes != m || vars.species != n) throw std::logic_error("variable map mismatch");
  RealizationResult r;
  r.support = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  Matrix rates = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  Matrix balanced = rates;
  auto read = [&](const std::optional<milp::VarId>& id) { return values.at(id->index); };
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      const auto ei = static_cast<Eigen::Index>(i), ej = static_cast<Eigen::Index>(j);
      const bool on = std::round(read(vars.indicator_var(i, j))) == 1.0;
      r.support(ei, ej) = on ? 1 : 0;
      auto take = [&](double v, const char* what) {
        if (on) {
          if (v < p.epsilon - 1e-7) {
            throw std::logic_error(std::string(what) + " below epsilon on a present reaction");
          }
          return v;
        }
        if (std::abs(v) > zero_tol) {
          throw std::logic_error(std::string(what) + " nonzero on an absent reaction");
        }
        return 0.0;
      };
      rates(ei, ej) = take(read(vars.rate_var(i, j)), "rate");
      if (!vars.balanced.empty()) balanced(ei, ej) = take(read(vars.balanced_var(i, j)), "balanced rate");
    }
  }
  r.A_b = KineticsMatrix::from_off_diagonal(rates);
  if (!vars.balanced.empty()) r.balanced = KineticsMatrix::from_off_diagonal(balanced);
  r.t = Vector::Ones(static_cast<Eigen::Index>(n));
  r.c = Vector::Ones(static_cast<Eigen::Index>(n));
  if (!vars.scaling.empty()) {
    for (std::size_t s = 0; s < n; ++s) {
      const auto es = static_cast<Eigen::Index>(s);
      r.t(es) = values.at(vars.scaling[s].index);
      r.c(es) = 1.0 / r.t(es);
    }
  }
  r.b = Vector::Ones(static_cast<Eigen::Index>(m));
  if (r.balanced) {
    const KernelOracleResult kernel = kernel_oracle(r.A_b);
    if (!kernel.feasible) throw std::logic_error("balanced support without a positive kernel vector");
    if (m > 0) r.b = kernel.b;
  }
  std::vector<std::string> species = p.species.empty() ? default_species_names(n) : p.species;
  Network net = network_from_kinetics(species, p.complexes(), r.A_b);
  return {std::move(r), std::move(net)};
}

}  // namespace kinreal
