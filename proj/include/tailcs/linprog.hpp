#pragma once

#include "tailcs/types.hpp"

namespace tailcs {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::optimal;
  Vector x;             // primal solution (standard form, x >= 0)
  double objective = 0.0;
};

/// Solves min c^T x subject to B x = b, x >= 0 with a dense two-phase
/// tableau simplex using Bland's rule. Intended for desk-scale problems.
LpResult lp_solve_standard_form(const Matrix& B, const Vector& b, const Vector& c);

}  // namespace tailcs
