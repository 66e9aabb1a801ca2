#pragma once

#include "delaynet/linalg.hpp"

namespace delaynet {

struct LpResult {
  enum class Status { optimal, infeasible, unbounded };
  Status status = Status::infeasible;
  RationalVector x;
  Rational objective = 0;
  // Set when infeasible: y with y^T A >= 0 and y^T b < 0.
  RationalVector farkas;
};

/// Exact two-phase simplex (Bland's rule) for
///   maximize c^T x  subject to  A x = b, x >= 0.
/// A has one row per constraint. Intended for the small systems that arise
/// per reactant complex, not for general LP workloads.
LpResult solve_lp(const RationalMatrix& A, const RationalVector& b, const RationalVector& c);

}  // namespace delaynet
