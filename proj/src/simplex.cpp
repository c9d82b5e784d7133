#include "hgfc/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hgfc {

namespace {

constexpr double kEps = 1e-9;

class Tableau {
 public:
  Tableau(int rows, int cols) : rows_(rows), cols_(cols), data_(size_t(rows) * cols, 0.0) {}
  double& at(int r, int c) { return data_[size_t(r) * cols_ + c]; }
  double at(int r, int c) const { return data_[size_t(r) * cols_ + c]; }
  double* row(int r) { return data_.data() + size_t(r) * cols_; }

  // Gauss-Jordan pivot on (pr, pc).
  void pivot(int pr, int pc) {
    double* prow = row(pr);
    double inv = 1.0 / prow[pc];
    for (int c = 0; c < cols_; ++c) prow[c] *= inv;
    prow[pc] = 1.0;
    for (int r = 0; r < rows_; ++r) {
      if (r == pr) continue;
      double factor = at(r, pc);
      if (factor == 0.0) continue;
      double* rr = row(r);
      for (int c = 0; c < cols_; ++c) rr[c] -= factor * prow[c];
      rr[pc] = 0.0;
    }
  }

  int rows_, cols_;
  std::vector<double> data_;
};

}  // namespace

LpResult solve_lp(const LpProblem& problem) {
  const int m = int(problem.rows.size());
  const int n = problem.num_vars;

  // Count slacks/surplus and artificials.
  int num_slack = 0, num_art = 0;
  for (const auto& row : problem.rows) {
    if (row.sense != RowSense::Equal) ++num_slack;
    double rhs = row.rhs;
    bool needs_art = row.sense == RowSense::Equal || (row.sense == RowSense::GreaterEqual && rhs >= 0) ||
                     (row.sense == RowSense::LessEqual && rhs < 0);
    if (needs_art) ++num_art;
  }

  const int total = n + num_slack + num_art;
  // Layout: columns [0, n) structural, [n, n+num_slack) slack, then
  // artificial, last column = rhs. Rows: m constraints, then phase-2
  // objective, then phase-1 objective.
  Tableau tab(m + 2, total + 1);
  const int rhs_col = total;
  const int obj_row = m;
  const int phase1_row = m + 1;

  std::vector<int> basis(m, -1);
  int slack_at = n, art_at = n + num_slack;
  for (int r = 0; r < m; ++r) {
    const auto& row = problem.rows[r];
    double sign = 1.0;
    if (row.rhs < 0) sign = -1.0;  // normalize to nonnegative rhs
    for (auto [var, coef] : row.coeffs) tab.at(r, var) += sign * coef;
    tab.at(r, rhs_col) = sign * row.rhs;
    RowSense sense = row.sense;
    if (sign < 0) {
      if (sense == RowSense::LessEqual)
        sense = RowSense::GreaterEqual;
      else if (sense == RowSense::GreaterEqual)
        sense = RowSense::LessEqual;
    }
    if (row.sense != RowSense::Equal) {
      tab.at(r, slack_at) = sense == RowSense::LessEqual ? 1.0 : -1.0;
      if (sense == RowSense::LessEqual) basis[r] = slack_at;
      ++slack_at;
    }
    if (basis[r] < 0) {
      tab.at(r, art_at) = 1.0;
      basis[r] = art_at;
      ++art_at;
    }
  }

  for (int v = 0; v < n; ++v) tab.at(obj_row, v) = problem.objective[v];
  // Phase-1 objective: minimize the sum of artificials.
  for (int v = n + num_slack; v < total; ++v) tab.at(phase1_row, v) = 1.0;
  for (int r = 0; r < m; ++r) {
    if (basis[r] >= n + num_slack) {
      double* rr = tab.row(r);
      double* p1 = tab.row(phase1_row);
      for (int c = 0; c <= total; ++c) p1[c] -= rr[c];
    }
  }

  auto run_phase = [&](int price_row, int allowed_cols) -> bool {
    long iter = 0;
    long degenerate_streak = 0;
    const long max_iter = 50000L + 200L * (m + total);
    while (true) {
      if (++iter > max_iter) throw Error("simplex: iteration limit reached");
      // Pricing: Dantzig, falling back to Bland after a degenerate streak.
      int enter = -1;
      const bool bland = degenerate_streak > 2 * (m + 8);
      double best = -kEps;
      const double* price = tab.row(price_row);
      for (int c = 0; c < allowed_cols; ++c) {
        if (price[c] < -kEps) {
          if (bland) {
            enter = c;
            break;
          }
          if (price[c] < best) {
            best = price[c];
            enter = c;
          }
        }
      }
      if (enter < 0) return true;  // optimal for this phase
      // Ratio test (Bland tie-break on basis index).
      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int r = 0; r < m; ++r) {
        double a = tab.at(r, enter);
        if (a > kEps) {
          double ratio = tab.at(r, rhs_col) / a;
          if (ratio < best_ratio - 1e-12 ||
              (ratio < best_ratio + 1e-12 && (leave < 0 || basis[r] < basis[leave]))) {
            best_ratio = ratio;
            leave = r;
          }
        }
      }
      if (leave < 0) return false;  // unbounded
      degenerate_streak = best_ratio < 1e-12 ? degenerate_streak + 1 : 0;
      tab.pivot(leave, enter);
      basis[leave] = enter;
    }
  };

  LpResult result;
  if (num_art > 0) {
    if (!run_phase(phase1_row, n + num_slack)) return result;  // cannot happen: phase 1 bounded
    if (tab.at(phase1_row, rhs_col) < -1e-7) return result;    // infeasible
    // Drive any leftover artificial out of the basis if possible.
    for (int r = 0; r < m; ++r) {
      if (basis[r] < n + num_slack) continue;
      int enter = -1;
      for (int c = 0; c < n + num_slack; ++c)
        if (std::abs(tab.at(r, c)) > kEps) {
          enter = c;
          break;
        }
      if (enter >= 0) {
        tab.pivot(r, enter);
        basis[r] = enter;
      }
    }
  }
  if (!run_phase(obj_row, n + num_slack)) throw Error("simplex: objective unbounded");

  result.feasible = true;
  result.x.assign(n, 0.0);
  for (int r = 0; r < m; ++r)
    if (basis[r] < n) result.x[basis[r]] = tab.at(r, rhs_col);
  double value = 0.0;
  for (int v = 0; v < n; ++v) value += problem.objective[v] * result.x[v];
  result.value = value;
  return result;
}

}  // namespace hgfc
