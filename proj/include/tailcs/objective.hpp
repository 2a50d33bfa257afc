#pragma once

#include "tailcs/types.hpp"

namespace tailcs {

// Tail-lasso data: minimize f(z) = 0.5*||A z - y||^2 + lambda*||z_{T^c}||_1,
// where T is the estimated support left unpenalized.
struct TailProblem {
  Matrix A;
  Vector y;
  double lambda = 0.0;
  SupportSet T;
  Eigen::ArrayXd tail;  // 1 on T^c, 0 on T (cached indicator)

  TailProblem(Matrix A_, Vector y_, double lambda_, SupportSet T_);

  Index m() const { return A.rows(); }
  Index n() const { return A.cols(); }
};

/// Over-parametrization state: z = u .* v.
struct FactorPair {
  Vector u;
  Vector v;

  FactorPair() = default;
  FactorPair(Vector u_, Vector v_) : u(std::move(u_)), v(std::move(v_)) {}
  static FactorPair zero(Index n) { return {Vector::Zero(n), Vector::Zero(n)}; }

  Vector product() const { return u.cwiseProduct(v); }
  double norm() const { return std::sqrt(u.squaredNorm() + v.squaredNorm()); }
  FactorPair operator-(const FactorPair& o) const { return {u - o.u, v - o.v}; }
};

// First-order optimality residuals for f. With gamma(z) = A^T(A z - y):
//   on_T:     |gamma_j|                 for j in T
//   active:   |gamma_j + sign(z_j)*lambda|  for j in T^c, z_j != 0
//   inactive: max(0, |gamma_j| - lambda)    for j in T^c, z_j == 0
// "z_j == 0" is tested against the dead-zone |z_j| <= zero_tol.
struct KktReport {
  double residual_on_T = 0.0;
  double residual_active = 0.0;
  double residual_inactive = 0.0;
  double overall = 0.0;
};

double f_value(const TailProblem& p, const Vector& z);
double g_value(const TailProblem& p, const FactorPair& w);

/// Gradient of g; returns (dg/du, dg/dv) packed as a FactorPair.
FactorPair g_gradient(const TailProblem& p, const FactorPair& w);

/// Dense 2n x 2n Hessian of g. Analysis-only; solvers never form it.
Matrix g_hessian(const TailProblem& p, const FactorPair& w);

Vector gamma_vec(const TailProblem& p, const Vector& z);

KktReport kkt_report(const TailProblem& p, const Vector& z, double zero_tol = 1e-10);

/// Balanced split with u .* v = z and u_j^2 + v_j^2 = 2|z_j| (sign(0) = 0).
FactorPair split_z(const Vector& z);

// Low-level evaluators shared with solvers that manage their own (A, y, T).
namespace detail {
double f_value(const Matrix& A, const Vector& y, double lambda,
               const Eigen::ArrayXd& tail, const Vector& z);
double g_value(const Matrix& A, const Vector& y, double lambda,
               const Eigen::ArrayXd& tail, const FactorPair& w);
KktReport kkt_from_gamma(const Vector& gamma, const Eigen::ArrayXd& tail,
                         double lambda, const Vector& z, double zero_tol);
}  // namespace detail

}  // namespace tailcs
