#include "tailcs/reference_solvers.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "tailcs/linprog.hpp"

namespace tailcs {

namespace {

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

Vector least_squares_on(const Matrix& A, const Vector& y, const SupportSet& S) {
  const Index s = static_cast<Index>(S.size());
  Vector z = Vector::Zero(A.cols());
  if (s == 0) return z;
  Matrix As(A.rows(), s);
  for (Index i = 0; i < s; ++i) As.col(i) = A.col(S[static_cast<std::size_t>(i)]);
  const Vector c = As.colPivHouseholderQr().solve(y);
  if (!c.allFinite()) throw std::runtime_error("least squares on support failed");
  for (Index i = 0; i < s; ++i) z[S[static_cast<std::size_t>(i)]] = c[i];
  return z;
}

void check_greedy(const Matrix& A, const Vector& y, const BaselineConfig& cfg) {
  if (y.size() != A.rows()) throw std::invalid_argument("greedy solver: y length != m");
  if (cfg.k < 1) throw std::invalid_argument("greedy solver: k must be >= 1");
  if (cfg.k > A.rows()) throw std::invalid_argument("greedy solver: k must be <= m");
}

}  // namespace

double spectral_norm_squared(const Matrix& A, Index iters) {
  Vector x = Vector::Ones(A.cols());
  x.normalize();
  double lam = 0.0;
  for (Index it = 0; it < iters; ++it) {
    Vector gx = A.transpose() * (A * x);
    const double nrm = gx.norm();
    if (nrm == 0.0) return 0.0;
    gx /= nrm;
    lam = (A * gx).squaredNorm();
    x = std::move(gx);
  }
  return lam;
}

Vector tail_lasso_oracle(const TailProblem& p, double tol, Index max_iters) {
  if (!(tol > 0.0)) throw std::invalid_argument("tail_lasso_oracle: tol must be > 0");
  const Index n = p.n();
  const double L = 1.01 * spectral_norm_squared(p.A) + 1e-12;
  const double step = 1.0 / L;
  const double thr = p.lambda * step;

  Vector x = Vector::Zero(n);
  Vector v = x;
  double t = 1.0;
  double kkt = 0.0;
  for (Index it = 1; it <= max_iters; ++it) {
    const Vector grad = p.A.transpose() * (p.A * v - p.y);
    Vector x_new = v - step * grad;
    for (Index j = 0; j < n; ++j)
      if (p.tail[j] != 0.0) x_new[j] = soft_threshold(x_new[j], thr);

    // Adaptive restart keeps the momentum from overshooting.
    if ((v - x_new).dot(x_new - x) > 0.0) {
      t = 1.0;
      v = x_new;
    } else {
      const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      v = x_new + ((t - 1.0) / t_new) * (x_new - x);
      t = t_new;
    }
    x = std::move(x_new);

    if (it % 20 == 0 || it == max_iters) {
      kkt = kkt_report(p, x).overall;
      if (kkt <= tol) return x;
    }
  }
  std::ostringstream msg;
  msg << "tail_lasso_oracle: no convergence in " << max_iters
      << " iterations (final KKT residual " << kkt << ")";
  throw std::runtime_error(msg.str());
}

namespace {

Vector tail_l1_equality(const Matrix& A, const Vector& y, const SupportSet& T) {
  const Index m = A.rows();
  const Index n = A.cols();
  // z = zp - zm with zp, zm >= 0; only the T^c halves carry unit cost.
  Matrix B(m, 2 * n);
  B.leftCols(n) = A;
  B.rightCols(n) = -A;
  Vector c = Vector::Ones(2 * n);
  for (Index j : T) {
    c[j] = 0.0;
    c[n + j] = 0.0;
  }
  const LpResult lp = lp_solve_standard_form(B, y, c);
  if (lp.status == LpStatus::infeasible)
    throw std::runtime_error("tail_l1_constrained: system A z = y is infeasible");
  if (lp.status != LpStatus::optimal)
    throw std::runtime_error("tail_l1_constrained: LP did not reach an optimum");
  return lp.x.head(n) - lp.x.tail(n);
}

}  // namespace

Vector tail_l1_constrained(const Matrix& A, const Vector& y, const SupportSet& T,
                           double eps, double tol) {
  if (y.size() != A.rows()) throw std::invalid_argument("tail_l1_constrained: y length != m");
  if (eps < 0.0) throw std::invalid_argument("tail_l1_constrained: eps must be >= 0");
  if (eps == 0.0) return tail_l1_equality(A, y, T);

  if (y.norm() <= eps) return Vector::Zero(A.cols());

  // Continuation: shrink lambda until the residual constraint holds, then
  // tighten the bracket; the residual is nondecreasing in lambda.
  double lam_hi = (A.transpose() * y).cwiseAbs().maxCoeff();
  if (lam_hi <= 0.0) return Vector::Zero(A.cols());
  double lam = lam_hi;
  Vector z_best;
  bool found = false;
  double lam_lo = 0.0;
  for (int it = 0; it < 60; ++it) {
    const TailProblem p(A, y, lam, T);
    const Vector z = tail_lasso_oracle(p, tol);
    if ((A * z - y).norm() <= eps) {
      z_best = z;
      lam_lo = lam;
      found = true;
      break;
    }
    lam_hi = lam;
    lam *= 0.5;
  }
  if (!found)
    throw std::runtime_error("tail_l1_constrained: residual target unreachable");

  for (int it = 0; it < 40 && lam_hi / lam_lo > 1.02; ++it) {
    const double mid = std::sqrt(lam_lo * lam_hi);
    const TailProblem p(A, y, mid, T);
    const Vector z = tail_lasso_oracle(p, tol);
    if ((A * z - y).norm() <= eps) {
      z_best = z;
      lam_lo = mid;
    } else {
      lam_hi = mid;
    }
  }
  return z_best;
}

Vector omp(const Matrix& A, const Vector& y, const BaselineConfig& cfg) {
  check_greedy(A, y, cfg);
  const Index n = A.cols();
  SupportSet S;
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);
  Vector z = Vector::Zero(n);
  Vector r = y;
  for (Index t = 0; t < cfg.k; ++t) {
    const Vector corr = A.transpose() * r;
    Index best = -1;
    double best_val = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (chosen[static_cast<std::size_t>(j)]) continue;
      const double v = std::abs(corr[j]);
      if (v > best_val) {
        best_val = v;
        best = j;
      }
    }
    if (best < 0 || best_val == 0.0) break;
    chosen[static_cast<std::size_t>(best)] = true;
    S.insert(std::lower_bound(S.begin(), S.end(), best), best);
    z = least_squares_on(A, y, S);
    r = y - A * z;
    if (r.norm() <= cfg.residual_tol) break;
  }
  return z;
}

Vector cosamp(const Matrix& A, const Vector& y, const BaselineConfig& cfg) {
  check_greedy(A, y, cfg);
  const Index n = A.cols();
  Vector z = Vector::Zero(n);
  Vector r = y;
  double r_norm = r.norm();
  for (Index it = 0; it < cfg.max_iters; ++it) {
    if (r_norm <= cfg.residual_tol) break;
    const Vector proxy = A.transpose() * r;
    const SupportSet omega = hard_threshold_support(proxy, std::min<Index>(2 * cfg.k, n));
    std::set<Index> merged(omega.begin(), omega.end());
    for (Index j : support_of(z)) merged.insert(j);
    const SupportSet T_merge(merged.begin(), merged.end());
    const Vector b = least_squares_on(A, y, T_merge);
    const SupportSet keep = hard_threshold_support(b, std::min<Index>(cfg.k, n));
    Vector z_new = Vector::Zero(n);
    for (Index j : keep) z_new[j] = b[j];
    const double r_new = (y - A * z_new).norm();
    if (r_new >= r_norm * (1.0 - 1e-12)) {
      if (r_new < r_norm) z = z_new;
      break;
    }
    z = std::move(z_new);
    r = y - A * z;
    r_norm = r_new;
  }
  return z;
}

Vector sp(const Matrix& A, const Vector& y, const BaselineConfig& cfg) {
  check_greedy(A, y, cfg);
  const Index n = A.cols();
  SupportSet S = hard_threshold_support(A.transpose() * y, std::min<Index>(cfg.k, n));
  Vector z = least_squares_on(A, y, S);
  Vector r = y - A * z;
  double r_norm = r.norm();
  for (Index it = 0; it < cfg.max_iters; ++it) {
    if (r_norm <= cfg.residual_tol) break;
    const SupportSet cand = hard_threshold_support(A.transpose() * r, std::min<Index>(cfg.k, n));
    std::set<Index> merged(S.begin(), S.end());
    merged.insert(cand.begin(), cand.end());
    const SupportSet S_ext(merged.begin(), merged.end());
    const Vector b = least_squares_on(A, y, S_ext);
    const SupportSet S_new = hard_threshold_support(b, std::min<Index>(cfg.k, n));
    const Vector z_new = least_squares_on(A, y, S_new);
    const double r_new = (y - A * z_new).norm();
    if (r_new >= r_norm * (1.0 - 1e-12)) break;
    S = S_new;
    z = z_new;
    r_norm = r_new;
    r = y - A * z;
  }
  return z;
}

Vector htp(const Matrix& A, const Vector& y, const BaselineConfig& cfg, double step_size) {
  check_greedy(A, y, cfg);
  const Index n = A.cols();
  Vector z = Vector::Zero(n);
  SupportSet S_prev;
  for (Index it = 0; it < cfg.max_iters; ++it) {
    const Vector grad_step = z + step_size * (A.transpose() * (y - A * z));
    const SupportSet S = hard_threshold_support(grad_step, std::min<Index>(cfg.k, n));
    z = least_squares_on(A, y, S);
    if (S == S_prev || (y - A * z).norm() <= cfg.residual_tol) break;
    S_prev = S;
  }
  return z;
}

Vector hpp(const Matrix& A, const Vector& y, double lambda, const PhppConfig& cfg,
           const FactorPair& w0) {
  PhppConfig c = cfg;
  c.lambda = lambda;
  const TailProblem p(A, y, lambda, {});
  return solve_phpp(p, c, w0).first.product();
}

Vector tail_hpp(const Matrix& A, const Vector& y, double lambda, const SupportSet& T_fixed,
                const PhppConfig& cfg, const FactorPair& w0) {
  PhppConfig c = cfg;
  c.lambda = lambda;
  const TailProblem p(A, y, lambda, T_fixed);
  return solve_phpp(p, c, w0).first.product();
}

}  // namespace tailcs
