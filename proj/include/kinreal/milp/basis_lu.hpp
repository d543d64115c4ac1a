#pragma once

// Sparse LU factorization of a simplex basis with singularity detection.
//
// Gaussian elimination picks, at every step, an active column with the
// fewest active entries and, inside it, the row of largest magnitude. A
// column whose active entries all fall below the singularity tolerance is
// dependent on the columns already pivoted; it is reported together with an
// unpivoted row so the caller can swap in that row's slack.
//
// Step k records pivot (r_k, c_k, p_k), multipliers l_i for the rows still
// active, and the pivot row's entries u_c in the columns still active. Then
// B z = b is solved by eliminating forward in step order and substituting
// backward, and B^T y = d by the transposed sequence.

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace kinreal::milp {

class BasisLU {
 public:
  using SparseColumn = std::vector<std::pair<std::size_t, double>>;

  struct Deficiency {
    /// Basis positions whose columns could not be pivoted.
    std::vector<std::size_t> positions;
    /// Rows left without a pivot; same length as `positions`.
    std::vector<std::size_t> rows;
  };

  double singular_tol = 1e-8;
  double drop_tol = 1e-14;

  /// Factorizes the m x m matrix whose column k is `columns[k]`.
  Deficiency factor(std::size_t m, const std::vector<SparseColumn>& columns) {
    m_ = m;
    steps_.clear();
    steps_.reserve(m);
    std::vector<SparseColumn> active = columns;
    std::vector<bool> column_done(m, false), row_done(m, false);
    std::vector<std::vector<std::size_t>> row_columns(m);
    for (std::size_t k = 0; k < m; ++k) {
      for (auto [r, a] : active[k]) row_columns[r].push_back(k);
    }
    std::vector<double> work(m, 0.0);
    std::vector<long> mark(m, -1);
    Deficiency deficiency;

    for (std::size_t step = 0; step < m; ++step) {
      std::size_t c = m;
      for (std::size_t k = 0; k < m; ++k) {
        if (column_done[k]) continue;
        if (c == m || active[k].size() < active[c].size()) c = k;
        if (active[c].size() <= 1) break;
      }
      if (c == m) break;
      column_done[c] = true;

      std::size_t pivot_row = m;
      double pivot = 0.0;
      for (auto [r, a] : active[c]) {
        if (std::abs(a) > std::abs(pivot)) {
          pivot = a;
          pivot_row = r;
        }
      }
      if (pivot_row == m || std::abs(pivot) < singular_tol) {
        deficiency.positions.push_back(c);
        active[c].clear();
        continue;
      }
      row_done[pivot_row] = true;

      Step s{pivot_row, c, pivot, {}, {}};
      for (auto [r, a] : active[c]) {
        if (r != pivot_row) s.lower.emplace_back(r, a / pivot);
      }
      for (std::size_t k : row_columns[pivot_row]) {
        if (column_done[k]) continue;
        // Stale row lists may name a column twice or one that lost the entry.
        auto& col = active[k];
        double a = 0.0;
        std::size_t at = col.size();
        for (std::size_t e = 0; e < col.size(); ++e) {
          if (col[e].first == pivot_row) {
            a = col[e].second;
            at = e;
            break;
          }
        }
        if (at == col.size()) continue;
        col[at] = col.back();
        col.pop_back();
        s.upper.emplace_back(k, a);
        if (s.lower.empty()) continue;
        for (std::size_t e = 0; e < col.size(); ++e) {
          work[col[e].first] = col[e].second;
          mark[col[e].first] = static_cast<long>(k);
        }
        for (auto [r, l] : s.lower) {
          if (mark[r] != static_cast<long>(k)) {
            mark[r] = static_cast<long>(k);
            work[r] = 0.0;
            col.emplace_back(r, 0.0);
            row_columns[r].push_back(k);
          }
          work[r] -= l * a;
        }
        std::size_t keep = 0;
        for (std::size_t e = 0; e < col.size(); ++e) {
          const std::size_t r = col[e].first;
          mark[r] = -1;
          if (std::abs(work[r]) > drop_tol) col[keep++] = {r, work[r]};
        }
        col.resize(keep);
      }
      active[c].clear();
      steps_.push_back(std::move(s));
    }
    for (std::size_t r = 0; r < m; ++r) {
      if (!row_done[r]) deficiency.rows.push_back(r);
    }
    return deficiency;
  }

  /// b (indexed by row) becomes z (indexed by basis position) with B z = b.
  void solve(std::vector<double>& b) const {
    for (const auto& s : steps_) {
      const double br = b[s.row];
      if (br == 0.0) continue;
      for (auto [i, l] : s.lower) b[i] -= l * br;
    }
    std::vector<double> z(m_, 0.0);
    for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
      double acc = b[it->row];
      for (auto [c, u] : it->upper) acc -= u * z[c];
      z[it->column] = acc / it->pivot;
    }
    b = std::move(z);
  }

  /// d (indexed by basis position) becomes y (indexed by row) with B^T y = d.
  void solve_transpose(std::vector<double>& d) const {
    std::vector<double> y(m_, 0.0);
    for (const auto& s : steps_) {
      const double w = d[s.column] / s.pivot;
      y[s.row] = w;
      if (w == 0.0) continue;
      for (auto [c, u] : s.upper) d[c] -= u * w;
    }
    for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
      double acc = y[it->row];
      for (auto [i, l] : it->lower) acc -= l * y[i];
      y[it->row] = acc;
    }
    d = std::move(y);
  }

 private:
  struct Step {
    std::size_t row;
    std::size_t column;
    double pivot;
    std::vector<std::pair<std::size_t, double>> lower;
    std::vector<std::pair<std::size_t, double>> upper;
  };

  std::size_t m_ = 0;
  std::vector<Step> steps_;
};

}  // namespace kinreal::milp
