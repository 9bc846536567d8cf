#pragma once

// Exact two-phase simplex over the rationals (Bland's rule, no cycling).

#include "apdisc/rational.hpp"

namespace apdisc {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Rational objective;
  RationalVector x;
};

/// minimize c^T x subject to A x = b, x >= 0.
LpResult solve_standard_lp(const RationalMatrix& A, const RationalVector& b, const RationalVector& c);

/// Is there x >= 0 with A x = b?
bool lp_feasible(const RationalMatrix& A, const RationalVector& b);

}  // namespace apdisc
