#include "tailcs/linprog.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace tailcs {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-9;

struct Tableau {
  Matrix tab;                // (m+1) x (ncols+1); row m = reduced costs, col ncols = rhs
  std::vector<Index> basis;  // basis[i] = column basic in row i
  Index m, ncols;

  double rhs(Index i) const { return tab(i, ncols); }

  void pivot(Index r, Index e) {
    tab.row(r) /= tab(r, e);
    for (Index i = 0; i <= m; ++i) {
      if (i == r) continue;
      const double factor = tab(i, e);
      if (factor != 0.0) tab.row(i) -= factor * tab.row(r);
    }
    basis[static_cast<std::size_t>(r)] = e;
  }

  // Bland's rule: smallest eligible entering index; leaving row by minimum
  // ratio with ties broken by smallest basis index. Returns false on
  // unboundedness.
  bool iterate(Index allowed_cols) {
    for (;;) {
      Index entering = -1;
      for (Index j = 0; j < allowed_cols; ++j) {
        if (tab(m, j) < -kCostTol) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return true;  // optimal

      Index leaving = -1;
      double best_ratio = 0.0;
      for (Index i = 0; i < m; ++i) {
        const double a = tab(i, entering);
        if (a > kPivotTol) {
          const double ratio = rhs(i) / a;
          if (leaving < 0 || ratio < best_ratio - kPivotTol ||
              (ratio < best_ratio + kPivotTol &&
               basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leaving)])) {
            leaving = i;
            best_ratio = ratio;
          }
        }
      }
      if (leaving < 0) return false;  // unbounded
      pivot(leaving, entering);
    }
  }
};

}  // namespace

LpResult lp_solve_standard_form(const Matrix& B, const Vector& b, const Vector& c) {
  const Index m = B.rows();
  const Index n = B.cols();
  if (b.size() != m || c.size() != n)
    throw std::invalid_argument("lp_solve_standard_form: dimension mismatch");

  Tableau t;
  t.m = m;
  t.ncols = n + m;  // real variables then artificials
  t.tab = Matrix::Zero(m + 1, t.ncols + 1);
  t.tab.topLeftCorner(m, n) = B;
  t.tab.block(0, n, m, m) = Matrix::Identity(m, m);
  t.tab.col(t.ncols).head(m) = b;
  for (Index i = 0; i < m; ++i) {
    if (t.tab(i, t.ncols) < 0.0) t.tab.row(i) = -t.tab.row(i);
    t.tab(i, n + i) = 1.0;  // keep the artificial's sign after a row flip
  }
  t.basis.resize(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) t.basis[static_cast<std::size_t>(i)] = n + i;

  // Phase 1: minimize the sum of artificials.
  for (Index j = n; j < t.ncols; ++j) t.tab(m, j) = 1.0;
  for (Index i = 0; i < m; ++i) t.tab.row(m) -= t.tab.row(i);
  if (!t.iterate(t.ncols)) throw std::runtime_error("lp: phase-1 unbounded");

  const double feas_tol = 1e-7 * (1.0 + b.cwiseAbs().sum());
  if (-t.tab(m, t.ncols) > feas_tol) {
    LpResult res;
    res.status = LpStatus::infeasible;
    return res;
  }

  // Drive any artificial left in the basis out; a row with no real pivot is a
  // redundant constraint and its artificial stays basic at value zero.
  for (Index i = 0; i < m; ++i) {
    if (t.basis[static_cast<std::size_t>(i)] < n) continue;
    for (Index j = 0; j < n; ++j) {
      if (std::abs(t.tab(i, j)) > 1e-8) {
        t.pivot(i, j);
        break;
      }
    }
  }

  // Phase 2 with the real costs; artificial columns are never eligible.
  t.tab.row(m).setZero();
  for (Index j = 0; j < n; ++j) t.tab(m, j) = c[j];
  for (Index i = 0; i < m; ++i) {
    const Index bj = t.basis[static_cast<std::size_t>(i)];
    if (bj < n && c[bj] != 0.0) t.tab.row(m) -= c[bj] * t.tab.row(i);
  }
  if (!t.iterate(n)) {
    LpResult res;
    res.status = LpStatus::unbounded;
    return res;
  }

  LpResult res;
  res.status = LpStatus::optimal;
  res.x = Vector::Zero(n);
  for (Index i = 0; i < m; ++i) {
    const Index bj = t.basis[static_cast<std::size_t>(i)];
    if (bj < n) res.x[bj] = t.rhs(i);
  }
  res.objective = c.dot(res.x);
  return res;
}

}  // namespace tailcs
