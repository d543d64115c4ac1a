#pragma once

// Independent oracles: the balanced-flow LP for weak reversibility, a
// brute-force binary enumerator for tiny MILPs, and an audit that re-checks
// a realization against every constraint family by direct substitution.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "kinreal/conjugacy.hpp"
#include "kinreal/encoder.hpp"
#include "kinreal/graph.hpp"
#include "kinreal/milp/check.hpp"
#include "kinreal/milp/model.hpp"
#include "kinreal/milp/simplex.hpp"
#include "kinreal/network.hpp"

namespace kinreal {

/// Searches a kernel vector b >= 0 of A_b whose scaled copy
/// [A~]_ij = [A_b]_ij b_j satisfies eps <= [A~]_ij <= u_ij on the support,
/// i.e. a witness for the balance rows of the encoding. Columns without
/// outgoing reactions get b_j = 1.
inline std::optional<KineticsMatrix> find_balanced_flow(const KineticsMatrix& a_b, double epsilon,
                                                        const Matrix& u) {
  const std::size_t m = a_b.size();
  const Matrix& a = a_b.matrix();
  milp::MilpModel model;
  std::vector<milp::VarId> b;
  std::vector<bool> has_out(m, false);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      if (i != j && a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > 0.0) has_out[j] = true;
    }
    const double fixed = has_out[j] ? 0.0 : 1.0;
    b.push_back(model.add_continuous("b_" + std::to_string(j + 1), fixed,
                                     has_out[j] ? milp::kInfinity : 1.0));
  }
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<milp::LinearTerm> terms;
    for (std::size_t j = 0; j < m; ++j) {
      const double v = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (v != 0.0 && has_out[j]) terms.push_back({b[j], v});
    }
    if (!terms.empty()) model.add_constraint(std::move(terms), milp::Relation::equal, 0.0);
  }
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      const auto ei = static_cast<Eigen::Index>(i), ej = static_cast<Eigen::Index>(j);
      if (i == j || a(ei, ej) <= 0.0) continue;
      model.add_constraint({{b[j], a(ei, ej)}}, milp::Relation::greater_equal, epsilon);
      model.add_constraint({{b[j], a(ei, ej)}}, milp::Relation::less_equal, u(ei, ej));
    }
  }
  const milp::Solution s = milp::solve_lp(model);
  if (s.status != milp::SolveStatus::optimal) return std::nullopt;
  Matrix off = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      const auto ei = static_cast<Eigen::Index>(i), ej = static_cast<Eigen::Index>(j);
      if (i != j && a(ei, ej) > 0.0) off(ei, ej) = a(ei, ej) * s.value(b[j]);
    }
  }
  return KineticsMatrix::from_off_diagonal(off);
}

struct AuditCheck {
  explicit AuditCheck(std::string check_name = {}) : name(std::move(check_name)) {}

  std::string name;
  bool passed = true;
  double max_residual = 0.0;
  std::vector<std::string> failures;
};

struct AuditReport {
  bool passed = true;
  std::vector<AuditCheck> checks;
  std::optional<ConjugacyReport> conjugacy;

  const AuditCheck* find(const std::string& name) const {
    for (const auto& c : checks) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }
};

struct AuditOptions {
  double feasibility_tol = 1e-7;
  std::size_t conjugacy_samples = 100;
  std::uint64_t seed = 42;
};

/// Assignment for encode(p).model built from a result: rates from A_b,
/// indicators from its support, balanced rates, and t = 1 / c.
inline std::vector<double> assignment_from(const RealizationResult& r, const VarMap& vars) {
  std::size_t count = 0;
  auto bump = [&](const std::optional<milp::VarId>& id) {
    if (id) count = std::max(count, id->index + 1);
  };
  for (const auto& v : vars.rate) bump(v);
  for (const auto& v : vars.indicator) bump(v);
  for (const auto& v : vars.balanced) bump(v);
  for (const auto& v : vars.scaling) count = std::max(count, v.index + 1);
  std::vector<double> values(count, 0.0);
  const std::size_t m = vars.complexes;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      const double rate = r.A_b.rate(j, i);
      if (auto a = vars.rate_var(i, j)) values[a->index] = rate;
      if (auto d = vars.indicator_var(i, j)) values[d->index] = r.support(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (auto w = vars.balanced_var(i, j); w && r.balanced) values[w->index] = r.balanced->rate(j, i);
    }
  }
  for (std::size_t s = 0; s < vars.scaling.size(); ++s) {
    values[vars.scaling[s].index] = r.t(static_cast<Eigen::Index>(s));
  }
  return values;
}

/// Result built from a candidate A_b and c alone (e.g. a published
/// solution): support from the nonzero pattern, t = 1 / c, and a balanced
/// copy searched with find_balanced_flow when weak reversibility is required.
inline RealizationResult result_from(const RealizationProblem& p, const KineticsMatrix& a_b,
                                     const Vector& c) {
  RealizationResult r;
  const auto m = static_cast<Eigen::Index>(p.complex_count());
  r.A_b = a_b;
  r.support = Eigen::MatrixXi::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (i != j && a_b.matrix()(i, j) > 0.0) r.support(i, j) = 1;
    }
  }
  r.c = c;
  r.t = c.cwiseInverse();
  r.b = Vector::Ones(m);
  if (p.weakly_reversible) r.balanced = find_balanced_flow(a_b, p.epsilon, p.u);
  return r;
}

namespace detail {

inline std::string pair_label(std::size_t i, std::size_t j) {
  return "C" + std::to_string(j + 1) + "->C" + std::to_string(i + 1);
}

inline void fail(AuditCheck& check, double residual, const std::string& what) {
  check.passed = false;
  if (check.failures.size() < 20) {
    std::ostringstream os;
    os << what << " (residual " << residual << ")";
    check.failures.push_back(os.str());
  }
}

}  // namespace detail

/// Re-checks a realization without trusting the solver: kinetics-matrix
/// invariants, the realization rows, structure rows, scaling bounds, the
/// balance rows and their structure rows (when weak reversibility is
/// required), SCC weak reversibility, the conjugacy identity at sampled
/// points, and feasibility of the rebuilt assignment for the encoded model.
inline AuditReport audit_solution(const RealizationProblem& p, const RealizationResult& r,
                                  const AuditOptions& options = {}) {
  p.validate();
  const double tol = options.feasibility_tol;
  const std::size_t m = p.complex_count();
  const std::size_t n = p.species_count();
  AuditReport report;
  const Matrix& a = r.A_b.matrix();
  auto at = [](const Matrix& x, std::size_t i, std::size_t j) {
    return x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  };

  AuditCheck kinetics{"kinetics_matrix"};
  if (r.A_b.size() != m) {
    detail::fail(kinetics, 0.0, "A_b size differs from the complex count");
  } else {
    for (std::size_t j = 0; j < m; ++j) {
      const double sum = a.col(static_cast<Eigen::Index>(j)).sum();
      kinetics.max_residual = std::max(kinetics.max_residual, std::abs(sum));
      if (std::abs(sum) > 1e-9 * (1.0 + a.col(static_cast<Eigen::Index>(j)).cwiseAbs().sum())) {
        detail::fail(kinetics, std::abs(sum), "column C" + std::to_string(j + 1) + " does not sum to zero");
      }
      for (std::size_t i = 0; i < m; ++i) {
        if (i != j && at(a, i, j) < 0.0) detail::fail(kinetics, -at(a, i, j), "negative rate " + detail::pair_label(i, j));
      }
    }
  }
  report.checks.push_back(kinetics);
  if (!kinetics.passed) {
    report.passed = false;
    return report;
  }

  AuditCheck realization{p.conjugacy == Conjugacy::identity ? "realization_DE" : "realization_LC"};
  const Matrix ya = p.Y.cast<double>() * a;
  for (std::size_t s = 0; s < n; ++s) {
    const double ts = p.conjugacy == Conjugacy::identity ? 1.0 : r.t(static_cast<Eigen::Index>(s));
    for (std::size_t j = 0; j < m; ++j) {
      const double gap = std::abs(at(ya, s, j) - ts * at(p.M, s, j));
      realization.max_residual = std::max(realization.max_residual, gap);
      if (gap > tol) {
        detail::fail(realization, gap, "species " + std::to_string(s + 1) + ", complex C" + std::to_string(j + 1));
      }
    }
  }
  report.checks.push_back(realization);

  AuditCheck structure{"structure_S"};
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      const double v = at(a, i, j);
      const bool on = r.support(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) == 1;
      if (on) {
        if (v < p.epsilon - tol) detail::fail(structure, p.epsilon - v, "rate below epsilon on " + detail::pair_label(i, j));
        if (v > at(p.u, i, j) + tol) detail::fail(structure, v - at(p.u, i, j), "rate above u on " + detail::pair_label(i, j));
      } else if (v != 0.0) {
        detail::fail(structure, v, "rate on absent reaction " + detail::pair_label(i, j));
      }
    }
  }
  report.checks.push_back(structure);

  if (p.conjugacy == Conjugacy::scaling) {
    AuditCheck bounds{"scaling_bounds"};
    for (std::size_t s = 0; s < n; ++s) {
      const double t = r.t(static_cast<Eigen::Index>(s));
      const double below = p.epsilon_c - t, above = t - 1.0 / p.epsilon_c;
      if (below > tol) detail::fail(bounds, below, "t_" + std::to_string(s + 1) + " below epsilon_c");
      if (above > tol) detail::fail(bounds, above, "t_" + std::to_string(s + 1) + " above 1/epsilon_c");
    }
    report.checks.push_back(bounds);
  } else if (!(r.c.array() == 1.0).all()) {
    AuditCheck bounds{"scaling_bounds"};
    detail::fail(bounds, (r.c.array() - 1.0).abs().maxCoeff(), "identity conjugacy requires c = 1");
    report.checks.push_back(bounds);
  }

  if (p.weakly_reversible) {
    AuditCheck balance{"balance_WR"};
    AuditCheck balance_structure{"balance_structure_WRS"};
    if (!r.balanced) {
      detail::fail(balance, 0.0, "no balanced flow on the support");
    } else {
      const Matrix& w = r.balanced->matrix();
      for (std::size_t j = 0; j < m; ++j) {
        double inflow = 0.0, outflow = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          if (i == j) continue;
          inflow += at(w, j, i);
          outflow += at(w, i, j);
        }
        const double gap = std::abs(inflow - outflow);
        balance.max_residual = std::max(balance.max_residual, gap);
        if (gap > tol) detail::fail(balance, gap, "complex C" + std::to_string(j + 1) + " is not balanced");
        for (std::size_t i = 0; i < m; ++i) {
          if (i == j) continue;
          const double v = at(w, i, j);
          const bool on = r.support(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) == 1;
          if (on) {
            if (v < p.epsilon - tol) detail::fail(balance_structure, p.epsilon - v, "balanced rate below epsilon on " + detail::pair_label(i, j));
            if (v > at(p.u, i, j) + tol) detail::fail(balance_structure, v - at(p.u, i, j), "balanced rate above u on " + detail::pair_label(i, j));
          } else if (v != 0.0) {
            detail::fail(balance_structure, v, "balanced rate on absent reaction " + detail::pair_label(i, j));
          }
        }
      }
    }
    report.checks.push_back(balance);
    report.checks.push_back(balance_structure);

    AuditCheck scc{"weak_reversibility_SCC"};
    const auto wr = is_weakly_reversible(r.A_b);
    if (!wr.weakly_reversible) {
      for (auto [src, dst] : wr.witness_edges) {
        detail::fail(scc, 0.0, "C" + std::to_string(src + 1) + "->C" + std::to_string(dst + 1) + " leaves its strong component");
      }
    }
    report.checks.push_back(scc);
  }

  AuditCheck conjugacy{"conjugacy_identity"};
  const KineticsMatrix a_k_prime = apply_transform(r.A_b, r.c, p.Y);
  const ConjugacyReport cr =
      check_conjugacy_field(p.Y, p.M, a_k_prime, r.c, options.conjugacy_samples, options.seed);
  conjugacy.max_residual = std::max(cr.max_relative_residual, cr.algebraic_residual);
  if (!cr.algebraic_passed) detail::fail(conjugacy, cr.algebraic_residual, "M != T Y A_b");
  if (cr.first_failure) detail::fail(conjugacy, cr.first_failure_residual, "sampled vector fields differ");
  report.conjugacy = cr;
  report.checks.push_back(conjugacy);

  AuditCheck substitution{"milp_substitution"};
  const EncodedModel enc = encode(p);
  const auto values = assignment_from(r, enc.vars);
  if (values.size() != enc.model.variable_count() || (p.weakly_reversible && !r.balanced)) {
    detail::fail(substitution, 0.0, "cannot rebuild a full assignment");
  } else {
    const auto check = milp::check_solution(enc.model, values, tol);
    substitution.max_residual = check.max_violation;
    for (const auto& v : check.violations) detail::fail(substitution, check.max_violation, v);
  }
  report.checks.push_back(substitution);

  for (const auto& c : report.checks) report.passed = report.passed && c.passed;
  return report;
}

struct CrosscheckReport {
  std::size_t trials = 0;
  std::size_t agreements = 0;
  std::size_t weakly_reversible = 0;
  /// Trials without reactions; both sides call them weakly reversible by the
  /// vacuous convention.
  std::size_t empty_graphs = 0;
  std::vector<std::string> disagreements;
};

/// Random kinetics matrices with m in [1, m_max]: half plain random digraphs,
/// half unions of random directed cycles (weakly reversible by construction),
/// with rates uniform in [0.1, 10]. Compares kernel_oracle with the SCC test.
inline CrosscheckReport wr_kernel_crosscheck(std::uint64_t seed, std::size_t trials,
                                             std::size_t m_max) {
  if (trials == 0 || m_max == 0) throw std::invalid_argument("trials and m_max must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> size(1, m_max);
  std::uniform_real_distribution<double> rate(0.1, 10.0), unit(0.0, 1.0);
  CrosscheckReport report;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::size_t m = size(rng);
    KineticsMatrix ak(m);
    if (trial % 2 == 0) {
      const double density = 0.6 * unit(rng);
      for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < m; ++i) {
          if (i != j && unit(rng) < density) ak.set_rate(j, i, rate(rng));
        }
      }
    } else if (m > 1) {
      std::uniform_int_distribution<std::size_t> cycles(1, 3);
      for (std::size_t c = cycles(rng); c > 0; --c) {
        std::vector<std::size_t> nodes(m);
        for (std::size_t k = 0; k < m; ++k) nodes[k] = k;
        std::shuffle(nodes.begin(), nodes.end(), rng);
        std::uniform_int_distribution<std::size_t> length(2, m);
        nodes.resize(length(rng));
        for (std::size_t k = 0; k < nodes.size(); ++k) {
          ak.set_rate(nodes[k], nodes[(k + 1) % nodes.size()], rate(rng));
        }
      }
    }
    const bool scc = is_weakly_reversible(ak).weakly_reversible;
    const bool kernel = kernel_oracle(ak).feasible;
    ++report.trials;
    if (ak.reaction_count() == 0) ++report.empty_graphs;
    if (scc) ++report.weakly_reversible;
    if (scc == kernel) {
      ++report.agreements;
    } else {
      report.disagreements.push_back("trial " + std::to_string(trial) + " (m = " + std::to_string(m) +
                                     "): SCC says " + (scc ? "true" : "false") + ", kernel LP says " +
                                     (kernel ? "true" : "false"));
    }
  }
  return report;
}

/// Exhaustive search over the binaries (at most 20): every assignment is
/// fixed and the continuous part solved as an LP. Ties keep the first
/// assignment in counting order.
inline milp::Solution enumerate_binary(const milp::MilpModel& model) {
  std::vector<std::size_t> binaries;
  for (const auto& v : model.variables()) {
    if (v.kind == milp::VarKind::binary) binaries.push_back(v.id.index);
  }
  if (binaries.size() > 20) throw std::invalid_argument("too many binaries to enumerate");
  milp::Solution best;
  best.status = milp::SolveStatus::infeasible;
  double best_value = milp::kInfinity;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << binaries.size()); ++mask) {
    milp::BoundedSimplex simplex(model);
    for (std::size_t k = 0; k < binaries.size(); ++k) {
      const double v = ((mask >> k) & 1U) ? 1.0 : 0.0;
      simplex.set_bounds(binaries[k], v, v);
    }
    const milp::LpStatus status = simplex.solve();
    if (status == milp::LpStatus::unbounded) {
      best.status = milp::SolveStatus::unbounded;
      return best;
    }
    if (status != milp::LpStatus::optimal) continue;
    std::vector<double> values = simplex.primal_values();
    for (std::size_t k = 0; k < binaries.size(); ++k) values[binaries[k]] = ((mask >> k) & 1U) ? 1.0 : 0.0;
    const double value = model.evaluate_objective(values);
    if (value < best_value) {
      best_value = value;
      best.values = std::move(values);
    }
  }
  if (best_value < milp::kInfinity) {
    best.status = milp::SolveStatus::optimal;
    best.has_incumbent = true;
    best.objective_value = best_value;
  }
  return best;
}

}  // namespace kinreal
