#pragma once

// Solve pipeline for a realization problem.
//
//   1. primary   the encoded MILP with its sparse or dense objective.
//   2. tie-break among supports with the primary optimum K, minimize the total
//                l1 length of the reaction vectors (sum |y_i - y_j|_1 d_ij)
//                subject to sum d = K. The stage-1 optimum seeds the search.
//   3. polish    scaling conjugacy only: with the support fixed, an LP picks
//                the t closest to all-ones in l1, so an identity conjugacy is
//                returned whenever the support admits one.
//
// Stages 2 and 3 never change the primary objective value.

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kinreal/encoder.hpp"
#include "kinreal/milp/branch_and_bound.hpp"
#include "kinreal/milp/check.hpp"
#include "kinreal/milp/model.hpp"
#include "kinreal/milp/simplex.hpp"

namespace kinreal {

struct RealizeOptions {
  milp::MilpConfig milp;
  bool tie_break = true;
  bool polish = true;
};

struct StageReport {
  std::string name;
  milp::SolveStatus status = milp::SolveStatus::infeasible;
  double objective = 0.0;
  std::size_t nodes = 0;
  std::size_t lp_iterations = 0;
  double seconds = 0.0;
};

struct RealizeOutcome {
  /// Status of the primary stage; later stages only refine its incumbent.
  milp::SolveStatus status = milp::SolveStatus::infeasible;
  EncodedModel encoded;
  /// Assignment for `encoded.model`.
  std::vector<double> values;
  std::optional<DecodedRealization> decoded;
  std::vector<StageReport> stages;

  bool has_solution() const { return decoded.has_value(); }
};

/// Integer l1 length of the reaction vector y_i - y_j.
inline int reaction_length(const StoichMatrix& y, std::size_t i, std::size_t j) {
  int total = 0;
  for (Eigen::Index s = 0; s < y.rows(); ++s) {
    total += std::abs(y(s, static_cast<Eigen::Index>(i)) - y(s, static_cast<Eigen::Index>(j)));
  }
  return total;
}

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

inline StageReport stage_report(std::string name, const milp::Solution& s, double seconds) {
  return {std::move(name), s.status, s.objective_value, s.nodes, s.lp_iterations, seconds};
}

inline double indicator_sum(const std::vector<double>& values, const VarMap& vars) {
  double total = 0.0;
  for (const auto& d : vars.indicator) {
    if (d) total += std::round(values[d->index]);
  }
  return total;
}

inline milp::MilpModel tie_break_model(const EncodedModel& enc, const RealizationProblem& p,
                                       double support_size) {
  milp::MilpModel model = enc.model;
  std::vector<milp::LinearTerm> all, weighted;
  const std::size_t m = p.complex_count();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const auto d = enc.vars.indicator_var(i, j);
      if (!d) continue;
      all.push_back({*d, 1.0});
      weighted.push_back({*d, static_cast<double>(reaction_length(p.Y, i, j))});
    }
  }
  model.add_constraint(std::move(all), milp::Relation::equal, support_size, "support_size");
  model.set_objective(std::move(weighted));
  return model;
}

// Appends p_s >= |t_s - 1| and minimizes sum p with every indicator fixed.
inline milp::MilpModel polish_model(const EncodedModel& enc, const std::vector<double>& values) {
  milp::MilpModel model = enc.model;
  for (const auto& d : enc.vars.indicator) {
    if (!d) continue;
    const double v = std::round(values[d->index]);
    model.set_bounds(*d, v, v);
  }
  std::vector<milp::LinearTerm> objective;
  for (std::size_t s = 0; s < enc.vars.scaling.size(); ++s) {
    const milp::VarId t = enc.vars.scaling[s];
    const milp::VarId gap = model.add_continuous("p_" + std::to_string(s + 1));
    model.add_constraint({{gap, 1.0}, {t, -1.0}}, milp::Relation::greater_equal, -1.0,
                         "polish_hi_" + std::to_string(s + 1));
    model.add_constraint({{gap, 1.0}, {t, 1.0}}, milp::Relation::greater_equal, 1.0,
                         "polish_lo_" + std::to_string(s + 1));
    objective.push_back({gap, 1.0});
  }
  model.set_objective(std::move(objective));
  return model;
}

}  // namespace detail

inline RealizeOutcome realize(const RealizationProblem& problem, const RealizeOptions& options = {}) {
  problem.validate();
  const auto start = std::chrono::steady_clock::now();
  RealizeOutcome out;
  out.encoded = encode(problem);
  const auto& enc = out.encoded;

  milp::MilpConfig config = options.milp;
  auto stage_start = std::chrono::steady_clock::now();
  const milp::Solution primary = milp::solve_milp(enc.model, config);
  out.stages.push_back(detail::stage_report("primary", primary, detail::seconds_since(stage_start)));
  out.status = primary.status;
  if (!primary.has_incumbent) return out;
  out.values = primary.values;

  const bool proved = primary.status == milp::SolveStatus::optimal;
  if (options.tie_break && proved && !enc.vars.indicator.empty()) {
    config.time_limit_seconds = options.milp.time_limit_seconds - detail::seconds_since(start);
    config.start = out.values;
    const double k = detail::indicator_sum(out.values, enc.vars);
    const milp::MilpModel model = detail::tie_break_model(enc, problem, k);
    stage_start = std::chrono::steady_clock::now();
    const milp::Solution tie = milp::solve_milp(model, config);
    out.stages.push_back(detail::stage_report("tie-break", tie, detail::seconds_since(stage_start)));
    if (tie.has_incumbent) {
      out.values.assign(tie.values.begin(),
                        tie.values.begin() + static_cast<std::ptrdiff_t>(enc.model.variable_count()));
    }
  }

  if (options.polish && !enc.vars.scaling.empty()) {
    const milp::MilpModel model = detail::polish_model(enc, out.values);
    stage_start = std::chrono::steady_clock::now();
    const milp::Solution polished = milp::solve_lp(model);
    out.stages.push_back(detail::stage_report("polish", polished, detail::seconds_since(stage_start)));
    if (polished.status == milp::SolveStatus::optimal) {
      std::vector<double> values(polished.values.begin(),
                                 polished.values.begin() +
                                     static_cast<std::ptrdiff_t>(enc.model.variable_count()));
      for (const auto& d : enc.vars.indicator) {
        if (d) values[d->index] = std::round(values[d->index]);
      }
      if (milp::check_solution(enc.model, values, options.milp.feasibility_tol).feasible) {
        out.values = std::move(values);
      }
    }
  }

  out.decoded = decode(out.values, enc.vars, problem);
  return out;
}

}  // namespace kinreal
