#include "tailcs/objective.hpp"

#include <cmath>
#include <stdexcept>

namespace tailcs {

namespace {

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void check_len(const TailProblem& p, const Vector& z, const char* who) {
  if (z.size() != p.n())
    throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

}  // namespace

TailProblem::TailProblem(Matrix A_, Vector y_, double lambda_, SupportSet T_)
    : A(std::move(A_)), y(std::move(y_)), lambda(lambda_), T(std::move(T_)) {
  if (y.size() != A.rows()) throw std::invalid_argument("TailProblem: y length != m");
  if (!(lambda > 0.0)) throw std::invalid_argument("TailProblem: lambda must be > 0");
  if (!is_sorted_unique(T)) std::sort(T.begin(), T.end());
  for (Index j : T)
    if (j < 0 || j >= A.cols())
      throw std::invalid_argument("TailProblem: T index out of range");
  tail = complement_indicator(T, A.cols());
}

namespace detail {

double f_value(const Matrix& A, const Vector& y, double lambda,
               const Eigen::ArrayXd& tail, const Vector& z) {
  const double fit = 0.5 * (A * z - y).squaredNorm();
  const double pen = (z.array().abs() * tail).sum();
  return fit + lambda * pen;
}

double g_value(const Matrix& A, const Vector& y, double lambda,
               const Eigen::ArrayXd& tail, const FactorPair& w) {
  const double fit = 0.5 * (A * w.product() - y).squaredNorm();
  const double pen = (w.u.array().square() * tail).sum() +
                     (w.v.array().square() * tail).sum();
  return fit + 0.5 * lambda * pen;
}

KktReport kkt_from_gamma(const Vector& gamma, const Eigen::ArrayXd& tail,
                         double lambda, const Vector& z, double zero_tol) {
  KktReport r;
  for (Index j = 0; j < z.size(); ++j) {
    if (tail[j] == 0.0) {
      r.residual_on_T = std::max(r.residual_on_T, std::abs(gamma[j]));
    } else if (std::abs(z[j]) > zero_tol) {
      r.residual_active =
          std::max(r.residual_active, std::abs(gamma[j] + sgn(z[j]) * lambda));
    } else {
      r.residual_inactive =
          std::max(r.residual_inactive, std::abs(gamma[j]) - lambda);
    }
  }
  r.residual_inactive = std::max(0.0, r.residual_inactive);
  r.overall = std::max({r.residual_on_T, r.residual_active, r.residual_inactive});
  return r;
}

}  // namespace detail

double f_value(const TailProblem& p, const Vector& z) {
  check_len(p, z, "f_value");
  return detail::f_value(p.A, p.y, p.lambda, p.tail, z);
}

double g_value(const TailProblem& p, const FactorPair& w) {
  check_len(p, w.u, "g_value");
  check_len(p, w.v, "g_value");
  return detail::g_value(p.A, p.y, p.lambda, p.tail, w);
}

Vector gamma_vec(const TailProblem& p, const Vector& z) {
  check_len(p, z, "gamma_vec");
  return p.A.transpose() * (p.A * z - p.y);
}

FactorPair g_gradient(const TailProblem& p, const FactorPair& w) {
  check_len(p, w.u, "g_gradient");
  check_len(p, w.v, "g_gradient");
  const Vector gamma = gamma_vec(p, w.product());
  Vector du = gamma.cwiseProduct(w.v) +
              p.lambda * (w.u.array() * p.tail).matrix();
  Vector dv = gamma.cwiseProduct(w.u) +
              p.lambda * (w.v.array() * p.tail).matrix();
  return {std::move(du), std::move(dv)};
}

Matrix g_hessian(const TailProblem& p, const FactorPair& w) {
  check_len(p, w.u, "g_hessian");
  check_len(p, w.v, "g_hessian");
  const Index n = p.n();
  const Matrix G = p.A.transpose() * p.A;
  const Vector gamma = gamma_vec(p, w.product());
  Matrix H(2 * n, 2 * n);
  H.topLeftCorner(n, n) = G.cwiseProduct(w.v * w.v.transpose());
  H.bottomRightCorner(n, n) = G.cwiseProduct(w.u * w.u.transpose());
  H.topRightCorner(n, n) = G.cwiseProduct(w.v * w.u.transpose());
  H.topRightCorner(n, n) += gamma.asDiagonal();
  H.bottomLeftCorner(n, n) = H.topRightCorner(n, n).transpose();
  for (Index j = 0; j < n; ++j) {
    H(j, j) += p.lambda * p.tail[j];
    H(n + j, n + j) += p.lambda * p.tail[j];
  }
  return H;
}

KktReport kkt_report(const TailProblem& p, const Vector& z, double zero_tol) {
  check_len(p, z, "kkt_report");
  return detail::kkt_from_gamma(gamma_vec(p, z), p.tail, p.lambda, z, zero_tol);
}

FactorPair split_z(const Vector& z) {
  const Index n = z.size();
  FactorPair w = FactorPair::zero(n);
  for (Index j = 0; j < n; ++j) {
    const double r = std::sqrt(std::abs(z[j]));
    w.u[j] = sgn(z[j]) * r;
    w.v[j] = r;
  }
  return w;
}

}  // namespace tailcs
