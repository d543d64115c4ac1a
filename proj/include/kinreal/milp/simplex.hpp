#pragma once

// Bounded-variable revised primal simplex.
//
// Every row r of the model becomes  sum_j a_rj x_j + s_r = b_r  with a slack
// s_r whose bounds encode the relation (<=: s >= 0, >=: s <= 0, =: s = 0).
// The basis inverse is a sparse LU factorization of the basis matrix
// followed by a product-form list of eta columns, one per pivot, and is
// refactored from the original columns periodically; a basis found singular
// on refactoring is repaired with slacks. The basis survives
// bound changes, so one instance can be re-solved after branching starting
// from the last basis. Infeasible starting points are handled with a
// composite phase 1 that minimizes the sum of bound violations of basic
// variables.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kinreal/milp/basis_lu.hpp"
#include "kinreal/milp/model.hpp"

namespace kinreal::milp {

enum class LpStatus { optimal, infeasible, unbounded };

struct SimplexOptions {
  /// Half the checker's 1e-7 so accepted points keep a margin.
  double feasibility_tol = 5e-8;
  double optimality_tol = 1e-7;
  double pivot_tol = 1e-7;
  double relative_pivot_tol = 1e-9;
  /// Eta columns accumulated before the basis is refactored.
  std::size_t refactor_interval = 100;
};

class BoundedSimplex {
 public:
  explicit BoundedSimplex(const MilpModel& model, SimplexOptions options = {})
      : options_(options),
        n_(model.variable_count()),
        m_(model.constraint_count()),
        cols_(n_ + m_),
        columns_(n_) {
    rows_.reserve(m_);
    rhs_.reserve(m_);
    for (std::size_t r = 0; r < m_; ++r) {
      const auto& c = model.constraints()[r];
      std::vector<std::pair<std::size_t, double>> row;
      for (const auto& t : c.terms) {
        if (t.coeff == 0.0) continue;
        row.emplace_back(t.var.index, t.coeff);
        columns_[t.var.index].emplace_back(r, t.coeff);
      }
      rows_.push_back(std::move(row));
      rhs_.push_back(c.rhs);
    }
    base_lo_.assign(cols_, 0.0);
    base_hi_.assign(cols_, 0.0);
    for (const auto& v : model.variables()) {
      base_lo_[v.id.index] = v.lower;
      base_hi_[v.id.index] = v.upper;
    }
    for (std::size_t r = 0; r < m_; ++r) {
      switch (model.constraints()[r].relation) {
        case Relation::less_equal:
          base_lo_[n_ + r] = 0.0;
          base_hi_[n_ + r] = kInfinity;
          break;
        case Relation::greater_equal:
          base_lo_[n_ + r] = -kInfinity;
          base_hi_[n_ + r] = 0.0;
          break;
        case Relation::equal:
          base_lo_[n_ + r] = 0.0;
          base_hi_[n_ + r] = 0.0;
          break;
      }
    }
    lo_ = base_lo_;
    hi_ = base_hi_;
    cost_.assign(cols_, 0.0);
    auto c = model.objective_vector();
    std::copy(c.begin(), c.end(), cost_.begin());
    x_.assign(cols_, 0.0);
    state_.assign(cols_, NonbasicState::lower);
    slack_basis();
  }

  std::size_t structural_count() const { return n_; }
  std::size_t row_count() const { return m_; }

  void set_bounds(std::size_t var, double lower, double upper) {
    if (var >= n_) throw std::out_of_range("variable index out of range");
    if (lower > upper) throw std::invalid_argument("lower bound exceeds upper bound");
    std::erase_if(shifts_, [&](const Shift& sh) { return sh.var == var; });
    lo_[var] = lower;
    hi_[var] = upper;
  }

  void reset_bounds() {
    shifts_.clear();
    lo_ = base_lo_;
    hi_ = base_hi_;
  }

  double lower(std::size_t var) const { return lo_.at(var); }
  double upper(std::size_t var) const { return hi_.at(var); }

  void set_objective(const std::vector<double>& costs) {
    if (costs.size() != n_) throw std::invalid_argument("objective size mismatch");
    std::fill(cost_.begin(), cost_.end(), 0.0);
    std::copy(costs.begin(), costs.end(), cost_.begin());
  }

  /// Solves from the retained basis. After an optimal solve the basis stays
  /// dual feasible under bound changes, so the next solve starts with the
  /// dual simplex; the primal method is the fallback. A warm primal start
  /// can stall in a basis that small pivots have made ill-conditioned, so
  /// its infeasible verdict or a numerical failure is confirmed by a cold
  /// start from the slack basis.
  LpStatus solve() {
    if (dual_ready_) {
      try {
        if (auto status = dual_iterate()) {
          return finish(*status == LpStatus::infeasible ? *status : iterate());
        }
      } catch (const NumericalError&) {
      }
      restore_shifts();
    }
    if (pivots_since_cold_start_ > 0) {
      try {
        const LpStatus status = iterate();
        if (status != LpStatus::infeasible) return finish(status);
      } catch (const NumericalError&) {
      }
      restore_shifts();
      ++cold_restarts_;
      std::fill(x_.begin(), x_.end(), 0.0);
      slack_basis();
    }
    return finish(iterate());
  }

  /// Structural variable values of the last solve.
  std::vector<double> primal_values() const {
    return std::vector<double>(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
  }

  double objective_value() const {
    double total = 0.0;
    for (std::size_t j = 0; j < n_; ++j) total += cost_[j] * x_[j];
    return total;
  }

  std::size_t iterations() const { return total_iterations_; }
  std::size_t cold_restarts() const { return cold_restarts_; }
  std::size_t basis_repairs() const { return basis_repairs_; }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  enum class NonbasicState { lower, upper, zero };

  struct Step {
    bool unbounded = false;
    bool bound_flip = false;
    std::size_t row = kNone;
    double theta = 0.0;
    double leaving_value = 0.0;
    bool leaving_at_upper = false;
  };

  // Identity with column `row` replaced by the entering column expressed in
  // the basis at pivot time; `entries` holds its off-pivot nonzeros.
  struct Eta {
    std::size_t row;
    double pivot;
    std::vector<std::pair<std::size_t, double>> entries;
  };

  LpStatus iterate() {
    for (std::size_t j = 0; j < cols_; ++j) {
      if (row_of_[j] < 0) place_nonbasic(j);
    }
    recompute_basics();
    std::size_t iterations_this_solve = 0;
    const std::size_t bland_after = 10 * (m_ + cols_);
    const std::size_t hard_limit = 60 * (m_ + cols_) + 10000;
    std::size_t repairs = 0;
    std::vector<double> reduced(cols_, 0.0);
    std::vector<double> alpha(m_, 0.0);

    while (true) {
      if (iterations_this_solve > hard_limit) {
        throw NumericalError("simplex iteration limit exceeded (cycling or instability)");
      }
      const bool bland = iterations_this_solve > bland_after;
      const bool feasible = price(reduced);

      int dir = 0;
      const std::size_t entering = choose_entering(reduced, bland, dir);
      if (entering == kNone) {
        // An infeasible verdict must come from a fresh factorization.
        if (!feasible && !etas_.empty()) {
          refactor();
          continue;
        }
        if (!accurate()) {
          if (++repairs > 3) throw NumericalError("simplex lost accuracy repeatedly");
          refactor();
          continue;
        }
        return feasible ? LpStatus::optimal : LpStatus::infeasible;
      }

      column_in_basis(entering, alpha);
      const Step step = ratio_test(entering, dir, bland, alpha);
      if (step.unbounded) {
        if (feasible) {
          if (!accurate()) {
            if (++repairs > 3) throw NumericalError("simplex lost accuracy repeatedly");
            refactor();
            continue;
          }
          return LpStatus::unbounded;
        }
        // A phase-1 improving direction always meets a violated bound; reaching
        // here means the factorization has drifted.
        if (++repairs > 3) throw NumericalError("phase 1 found no blocking variable");
        refactor();
        continue;
      }
      apply_step(entering, dir, step, alpha);
      ++iterations_this_solve;
      ++total_iterations_;
      if (etas_.size() >= options_.refactor_interval) refactor();
    }
  }

  // Restores shifted bounds. An optimal basis stays dual feasible, so the
  // dual simplex removes the small primal infeasibility this leaves.
  LpStatus finish(LpStatus status) {
    for (int round = 0; round < 3 && !shifts_.empty(); ++round) {
      restore_shifts();
      if (status != LpStatus::optimal) break;
      auto cleaned = dual_iterate();
      status = cleaned ? *cleaned : iterate();
    }
    restore_shifts();
    dual_ready_ = status == LpStatus::optimal;
    return status;
  }

  struct Shift {
    std::size_t var;
    bool upper;
    double original;
  };

  void shift_bound(std::size_t var, bool upper, double value) {
    const bool known = std::any_of(shifts_.begin(), shifts_.end(), [&](const Shift& sh) {
      return sh.var == var && sh.upper == upper;
    });
    double& bound = upper ? hi_[var] : lo_[var];
    if (!known) shifts_.push_back({var, upper, bound});
    bound = value;
    if (lo_[var] > hi_[var]) shift_bound(var, !upper, value);
  }

  void restore_shifts() {
    for (auto it = shifts_.rbegin(); it != shifts_.rend(); ++it) {
      (it->upper ? hi_[it->var] : lo_[it->var]) = it->original;
    }
    shifts_.clear();
  }

  // Bounded dual simplex from a dual feasible basis. Returns nullopt when the
  // basis is not dual feasible, the method stalls, or an infeasibility
  // verdict cannot be certified; the caller then falls back to the primal
  // method. An optimal return leaves a primal feasible basis.
  std::optional<LpStatus> dual_iterate() {
    const double ftol = options_.feasibility_tol;
    const double dtol = options_.optimality_tol;
    std::vector<double> reduced(cols_, 0.0);
    for (std::size_t j = 0; j < cols_; ++j) {
      if (row_of_[j] < 0) place_nonbasic(j);
    }
    recompute_basics();
    price_objective(reduced);
    for (std::size_t j = 0; j < cols_; ++j) {
      if (row_of_[j] >= 0 || lo_[j] == hi_[j]) continue;
      if (reduced[j] > dtol) {
        if (!std::isfinite(lo_[j])) return std::nullopt;
        state_[j] = NonbasicState::lower;
      } else if (reduced[j] < -dtol) {
        if (!std::isfinite(hi_[j])) return std::nullopt;
        state_[j] = NonbasicState::upper;
      }
      place_nonbasic(j);
    }
    recompute_basics();

    const std::size_t limit = 4 * (m_ + cols_) + 1000;
    std::vector<double> rho(m_, 0.0);
    std::vector<double> row(cols_, 0.0);
    std::vector<double> alpha(m_, 0.0);
    bool fresh_retry = false;
    for (std::size_t it = 0; it < limit; ++it) {
      std::size_t r = kNone;
      double worst = ftol;
      for (std::size_t k = 0; k < m_; ++k) {
        const std::size_t v = basis_[k];
        const double violation = std::max(lo_[v] - x_[v], x_[v] - hi_[v]);
        if (violation > worst) {
          worst = violation;
          r = k;
        }
      }
      if (r == kNone) return LpStatus::optimal;

      const std::size_t v = basis_[r];
      const bool to_lower = x_[v] < lo_[v];
      const double target = to_lower ? lo_[v] : hi_[v];
      // x_v moves by -row[j] * dx_j; `sign` is the direction x_v must go.
      const double sign = to_lower ? 1.0 : -1.0;
      std::fill(rho.begin(), rho.end(), 0.0);
      rho[r] = 1.0;
      btran(rho);
      price_objective(reduced);

      std::size_t q = kNone;
      double relaxed_min = kInfinity;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (row_of_[j] >= 0 || lo_[j] == hi_[j]) {
          row[j] = 0.0;
          continue;
        }
        row[j] = column_dot(j, rho);
        if (!dual_eligible(j, sign * row[j])) continue;
        const double ratio = (std::abs(reduced[j]) + dtol) / std::abs(row[j]);
        relaxed_min = std::min(relaxed_min, ratio);
      }
      if (relaxed_min == kInfinity) {
        if (!etas_.empty() && !fresh_retry) {
          refactor();
          fresh_retry = true;
          continue;
        }
        return certified_infeasible(v, sign, target, row) ? std::optional(LpStatus::infeasible)
                                                          : std::nullopt;
      }
      fresh_retry = false;
      double best_mag = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (row_of_[j] >= 0 || lo_[j] == hi_[j]) continue;
        if (!dual_eligible(j, sign * row[j])) continue;
        const double exact = std::abs(reduced[j]) / std::abs(row[j]);
        if (exact <= relaxed_min && std::abs(row[j]) > best_mag) {
          best_mag = std::abs(row[j]);
          q = j;
        }
      }

      column_in_basis(q, alpha);
      if (std::abs(alpha[r]) <= options_.pivot_tol) {
        if (etas_.empty()) return std::nullopt;
        refactor();
        continue;
      }
      const double dx = (x_[v] - target) / alpha[r];
      for (std::size_t k = 0; k < m_; ++k) {
        if (alpha[k] != 0.0) x_[basis_[k]] -= alpha[k] * dx;
      }
      x_[q] += dx;
      Eta eta{r, alpha[r], {}};
      for (std::size_t k = 0; k < m_; ++k) {
        if (k != r && alpha[k] != 0.0) eta.entries.emplace_back(k, alpha[k]);
      }
      etas_.push_back(std::move(eta));
      row_of_[v] = -1;
      basis_[r] = q;
      row_of_[q] = static_cast<long>(r);
      x_[v] = target;
      state_[v] = to_lower ? NonbasicState::lower : NonbasicState::upper;
      ++pivots_since_cold_start_;
      ++total_iterations_;
      if (etas_.size() >= options_.refactor_interval) refactor();
    }
    return std::nullopt;
  }

  // Nonbasic j can move x_v in the required direction when `signed_entry`
  // (sign * row entry) is negative and j may increase, or positive and j may
  // decrease.
  bool dual_eligible(std::size_t j, double signed_entry) const {
    if (std::abs(signed_entry) <= options_.pivot_tol) return false;
    if (signed_entry < 0.0) return x_[j] < hi_[j];
    return x_[j] > lo_[j];
  }

  // Confirms that no movement of the nonbasic variables within their bounds
  // brings x_v to its bound. Entries below the pivot tolerance still count
  // when the variable's room is finite; on unbounded variables they are
  // treated as round-off, as in the primal ratio test.
  bool certified_infeasible(std::size_t v, double sign, double target,
                            const std::vector<double>& row) const {
    double reach = sign * x_[v];
    for (std::size_t j = 0; j < cols_; ++j) {
      if (row_of_[j] >= 0 || row[j] == 0.0) continue;
      const double e = sign * row[j];
      const double room = e < 0.0 ? hi_[j] - x_[j] : x_[j] - lo_[j];
      if (room <= 0.0) continue;
      if (!std::isfinite(room)) {
        if (std::abs(e) > options_.pivot_tol) return false;
        continue;
      }
      reach += std::abs(e) * room;
    }
    return reach < sign * target - options_.feasibility_tol;
  }

  void price_objective(std::vector<double>& reduced) const {
    std::vector<double> y(m_);
    for (std::size_t r = 0; r < m_; ++r) y[r] = cost_[basis_[r]];
    btran(y);
    for (std::size_t j = 0; j < cols_; ++j) {
      reduced[j] = row_of_[j] >= 0 ? 0.0 : cost_[j] - column_dot(j, y);
    }
  }

  void install_slack_basis() {
    basis_.resize(m_);
    row_of_.assign(cols_, -1);
    for (std::size_t r = 0; r < m_; ++r) {
      basis_[r] = n_ + r;
      row_of_[n_ + r] = static_cast<long>(r);
    }
    for (std::size_t j = 0; j < n_; ++j) {
      state_[j] = (std::isfinite(hi_[j]) && x_[j] >= hi_[j] && hi_[j] != lo_[j])
                      ? NonbasicState::upper
                      : NonbasicState::lower;
    }
    identity_factor_ = true;
    etas_.clear();
  }

  void slack_basis() {
    install_slack_basis();
    pivots_since_cold_start_ = 0;
  }

  // Factorizes the current basis. Dependent columns are swapped for the
  // slacks of the rows they leave uncovered and become nonbasic at their
  // nearest bound.
  void factor() {
    etas_.clear();
    for (int attempt = 0; attempt < 3; ++attempt) {
      bool all_slack = true;
      for (std::size_t r = 0; r < m_; ++r) {
        if (basis_[r] != n_ + r) all_slack = false;
      }
      if (all_slack) {
        identity_factor_ = true;
        return;
      }
      std::vector<BasisLU::SparseColumn> columns(m_);
      for (std::size_t k = 0; k < m_; ++k) {
        const std::size_t j = basis_[k];
        if (j >= n_) {
          columns[k].emplace_back(j - n_, 1.0);
        } else {
          columns[k].assign(columns_[j].begin(), columns_[j].end());
        }
      }
      identity_factor_ = false;
      const auto deficiency = lu_.factor(m_, columns);
      if (deficiency.positions.empty()) return;
      ++basis_repairs_;
      for (std::size_t i = 0; i < deficiency.positions.size(); ++i) {
        const std::size_t k = deficiency.positions[i];
        const std::size_t leaving = basis_[k];
        const std::size_t slack = n_ + deficiency.rows[i];
        row_of_[leaving] = -1;
        const bool nearer_upper = std::isfinite(hi_[leaving]) &&
                                  (!std::isfinite(lo_[leaving]) ||
                                   hi_[leaving] - x_[leaving] < x_[leaving] - lo_[leaving]);
        state_[leaving] = nearer_upper ? NonbasicState::upper : NonbasicState::lower;
        place_nonbasic(leaving);
        basis_[k] = slack;
        row_of_[slack] = static_cast<long>(k);
      }
    }
    install_slack_basis();
  }

  void refactor() {
    factor();
    for (std::size_t j = 0; j < cols_; ++j) {
      if (row_of_[j] < 0) place_nonbasic(j);
    }
    recompute_basics();
  }

  // v <- B^-1 v
  void ftran(std::vector<double>& v) const {
    if (!identity_factor_) lu_.solve(v);
    for (const auto& eta : etas_) {
      const double xp = v[eta.row] / eta.pivot;
      if (xp != 0.0) {
        for (auto [i, a] : eta.entries) v[i] -= a * xp;
      }
      v[eta.row] = xp;
    }
  }

  // v <- B^-T v
  void btran(std::vector<double>& v) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double acc = v[it->row];
      for (auto [i, a] : it->entries) acc -= a * v[i];
      v[it->row] = acc / it->pivot;
    }
    if (!identity_factor_) lu_.solve_transpose(v);
  }

  void column_in_basis(std::size_t q, std::vector<double>& alpha) const {
    std::fill(alpha.begin(), alpha.end(), 0.0);
    if (q >= n_) {
      alpha[q - n_] = 1.0;
    } else {
      for (auto [r, a] : columns_[q]) alpha[r] = a;
    }
    ftran(alpha);
  }

  double column_dot(std::size_t j, const std::vector<double>& y) const {
    if (j >= n_) return y[j - n_];
    double s = 0.0;
    for (auto [r, a] : columns_[j]) s += a * y[r];
    return s;
  }

  void place_nonbasic(std::size_t j) {
    const double l = lo_[j], h = hi_[j];
    if (state_[j] == NonbasicState::upper && std::isfinite(h)) {
      x_[j] = h;
    } else if (std::isfinite(l)) {
      x_[j] = l;
      state_[j] = NonbasicState::lower;
    } else if (std::isfinite(h)) {
      x_[j] = h;
      state_[j] = NonbasicState::upper;
    } else {
      x_[j] = 0.0;
      state_[j] = NonbasicState::zero;
    }
  }

  // x_B = B^-1 (b - N x_N)
  void recompute_basics() {
    std::vector<double> v = rhs_;
    for (std::size_t j = 0; j < cols_; ++j) {
      if (row_of_[j] >= 0 || x_[j] == 0.0) continue;
      if (j >= n_) {
        v[j - n_] -= x_[j];
      } else {
        for (auto [r, a] : columns_[j]) v[r] -= a * x_[j];
      }
    }
    ftran(v);
    for (std::size_t r = 0; r < m_; ++r) x_[basis_[r]] = v[r];
  }

  // Reduced costs of the phase-1 objective (sum of basic bound violations)
  // while some basic variable is out of bounds, else of the true objective.
  // Returns true in the latter case.
  bool price(std::vector<double>& reduced) const {
    const double tol = options_.feasibility_tol;
    std::vector<double> y(m_, 0.0);
    bool feasible = true;
    for (std::size_t r = 0; r < m_; ++r) {
      const std::size_t v = basis_[r];
      if (x_[v] < lo_[v] - tol) {
        y[r] = -1.0;
        feasible = false;
      } else if (x_[v] > hi_[v] + tol) {
        y[r] = 1.0;
        feasible = false;
      }
    }
    if (feasible) {
      for (std::size_t r = 0; r < m_; ++r) y[r] = cost_[basis_[r]];
    }
    btran(y);
    for (std::size_t j = 0; j < cols_; ++j) {
      reduced[j] = row_of_[j] >= 0 ? 0.0 : (feasible ? cost_[j] : 0.0) - column_dot(j, y);
    }
    return feasible;
  }

  std::size_t choose_entering(const std::vector<double>& reduced, bool bland, int& dir) const {
    const double tol = options_.optimality_tol;
    std::size_t best = kNone;
    double best_score = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
      if (row_of_[j] >= 0 || lo_[j] == hi_[j]) continue;
      const double dj = reduced[j];
      int candidate_dir = 0;
      if (dj < -tol && x_[j] < hi_[j]) {
        candidate_dir = 1;
      } else if (dj > tol && x_[j] > lo_[j]) {
        candidate_dir = -1;
      } else {
        continue;
      }
      const double score = std::abs(dj);
      if (bland) {
        dir = candidate_dir;
        return j;
      }
      if (score > best_score) {
        best_score = score;
        best = j;
        dir = candidate_dir;
      }
    }
    return best;
  }

  // Harris two-pass ratio test: the first pass finds the largest step that
  // keeps every blocking basic within its bound relaxed by the feasibility
  // tolerance, the second picks the largest pivot among rows blocking within
  // that step. Under Bland's rule the lowest-index blocking variable leaves.
  Step ratio_test(std::size_t q, int dir, bool bland, const std::vector<double>& alpha) const {
    const double ftol = options_.feasibility_tol;
    struct Candidate {
      std::size_t row;
      double exact;
      double magnitude;
      double target;
      bool at_upper;
    };
    std::vector<Candidate> candidates;
    double relaxed_min = kInfinity;
    double exact_min = kInfinity;
    double alpha_max = 0.0;
    for (double t : alpha) alpha_max = std::max(alpha_max, std::abs(t));
    // Entries this far below the column's largest are round-off.
    const double pivot_floor = std::max(options_.pivot_tol, options_.relative_pivot_tol * alpha_max);
    for (std::size_t r = 0; r < m_; ++r) {
      const double t = alpha[r];
      if (std::abs(t) <= pivot_floor) continue;
      const double rate = -dir * t;
      const std::size_t v = basis_[r];
      const double xv = x_[v], l = lo_[v], h = hi_[v];
      double exact = kInfinity, relaxed = kInfinity, target = 0.0;
      bool at_upper = false;
      if (rate > 0.0) {
        if (xv < l - ftol) {
          exact = (l - xv) / rate;
          relaxed = (l - xv + ftol) / rate;
          target = l;
        } else if (xv > h + ftol) {
          continue;
        } else if (std::isfinite(h)) {
          exact = (h - xv) / rate;
          relaxed = (h + ftol - xv) / rate;
          target = h;
          at_upper = true;
        } else {
          continue;
        }
      } else {
        if (xv > h + ftol) {
          exact = (xv - h) / -rate;
          relaxed = (xv - h + ftol) / -rate;
          target = h;
          at_upper = true;
        } else if (xv < l - ftol) {
          continue;
        } else if (std::isfinite(l)) {
          exact = (xv - l) / -rate;
          relaxed = (xv - l + ftol) / -rate;
          target = l;
        } else {
          continue;
        }
      }
      candidates.push_back({r, exact, std::abs(t), target, at_upper});
      relaxed_min = std::min(relaxed_min, relaxed);
      exact_min = std::min(exact_min, exact);
    }

    const double range = hi_[q] - lo_[q];
    Step step;
    if (candidates.empty()) {
      if (std::isfinite(range)) {
        step.bound_flip = true;
        step.theta = range;
      } else {
        step.unbounded = true;
      }
      return step;
    }

    const Candidate* chosen = nullptr;
    if (bland) {
      for (const auto& c : candidates) {
        if (c.exact <= exact_min + 1e-12 &&
            (!chosen || basis_[c.row] < basis_[chosen->row])) {
          chosen = &c;
        }
      }
    } else {
      for (const auto& c : candidates) {
        if (c.exact > relaxed_min) continue;
        if (!chosen || c.magnitude > chosen->magnitude ||
            (c.magnitude == chosen->magnitude && basis_[c.row] < basis_[chosen->row])) {
          chosen = &c;
        }
      }
    }
    const double theta = std::max(0.0, chosen->exact);
    if (std::isfinite(range) && range <= theta) {
      step.bound_flip = true;
      step.theta = range;
      return step;
    }
    step.row = chosen->row;
    step.theta = theta;
    step.leaving_value = chosen->target;
    step.leaving_at_upper = chosen->at_upper;
    return step;
  }

  void apply_step(std::size_t q, int dir, const Step& step, const std::vector<double>& alpha) {
    const double theta = step.theta;
    if (theta != 0.0) {
      for (std::size_t r = 0; r < m_; ++r) {
        if (alpha[r] != 0.0) x_[basis_[r]] -= dir * alpha[r] * theta;
      }
    }
    if (step.bound_flip) {
      if (dir > 0) {
        x_[q] = hi_[q];
        state_[q] = NonbasicState::upper;
      } else {
        x_[q] = lo_[q];
        state_[q] = NonbasicState::lower;
      }
      return;
    }
    x_[q] += dir * theta;
    const std::size_t p = step.row;
    const std::size_t leaving = basis_[p];
    Eta eta{p, alpha[p], {}};
    for (std::size_t r = 0; r < m_; ++r) {
      if (r != p && alpha[r] != 0.0) eta.entries.emplace_back(r, alpha[r]);
    }
    etas_.push_back(std::move(eta));
    row_of_[leaving] = -1;
    basis_[p] = q;
    row_of_[q] = static_cast<long>(p);
    // A Harris step may stop the leaving variable a little short of or past
    // its bound; the bound is shifted to the actual value so x stays
    // consistent with the basis, and restored when the solve finishes.
    if (x_[leaving] != step.leaving_value) {
      shift_bound(leaving, step.leaving_at_upper, x_[leaving]);
    }
    state_[leaving] = step.leaving_at_upper ? NonbasicState::upper : NonbasicState::lower;
    ++pivots_since_cold_start_;
  }

  // Checks the current point against the original rows.
  bool accurate() const {
    const double tol = 1e-9;
    for (std::size_t r = 0; r < m_; ++r) {
      double activity = x_[n_ + r];
      double scale = 1.0 + std::abs(rhs_[r]);
      for (auto [j, a] : rows_[r]) {
        activity += a * x_[j];
        scale += std::abs(a * x_[j]);
      }
      if (std::abs(activity - rhs_[r]) > tol * scale) return false;
    }
    return true;
  }

  SimplexOptions options_;
  std::size_t n_;
  std::size_t m_;
  std::size_t cols_;
  std::vector<std::vector<std::pair<std::size_t, double>>> rows_;
  std::vector<std::vector<std::pair<std::size_t, double>>> columns_;
  std::vector<double> rhs_;
  std::vector<double> base_lo_, base_hi_, lo_, hi_;
  std::vector<double> cost_;
  std::vector<double> x_;
  std::vector<NonbasicState> state_;
  std::vector<std::size_t> basis_;
  std::vector<long> row_of_;
  BasisLU lu_;
  bool identity_factor_ = true;
  bool dual_ready_ = false;
  std::vector<Eta> etas_;
  std::vector<Shift> shifts_;
  std::size_t pivots_since_cold_start_ = 0;
  std::size_t cold_restarts_ = 0;
  std::size_t basis_repairs_ = 0;
  std::size_t total_iterations_ = 0;
};

inline Solution solve_lp(const MilpModel& model) {
  BoundedSimplex simplex(model);
  Solution solution;
  const LpStatus status = simplex.solve();
  solution.lp_iterations = simplex.iterations();
  switch (status) {
    case LpStatus::optimal:
      solution.status = SolveStatus::optimal;
      solution.values = simplex.primal_values();
      solution.objective_value = model.evaluate_objective(solution.values);
      solution.root_bound = solution.objective_value;
      break;
    case LpStatus::infeasible:
      solution.status = SolveStatus::infeasible;
      break;
    case LpStatus::unbounded:
      solution.status = SolveStatus::unbounded;
      break;
  }
  return solution;
}

}  // namespace kinreal::milp
