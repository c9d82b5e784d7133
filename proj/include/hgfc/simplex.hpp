#ifndef HGFC_SIMPLEX_HPP
#define HGFC_SIMPLEX_HPP

#include <vector>

#include "hgfc/errors.hpp"

namespace hgfc {

enum class RowSense { LessEqual, GreaterEqual, Equal };

struct LpRow {
  std::vector<std::pair<int, double>> coeffs;  // (variable index, coefficient)
  RowSense sense = RowSense::LessEqual;
  double rhs = 0.0;
};

// min c.x subject to rows, x >= 0.
struct LpProblem {
  int num_vars = 0;
  std::vector<double> objective;
  std::vector<LpRow> rows;
};

struct LpResult {
  bool feasible = false;
  double value = 0.0;
  std::vector<double> x;
};

// Dense two-phase primal simplex (Dantzig pricing with a Bland fallback
// against cycling). Sized for a few thousand variables.
LpResult solve_lp(const LpProblem& problem);

}  // namespace hgfc

#endif
