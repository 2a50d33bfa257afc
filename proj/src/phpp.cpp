#include "tailcs/phpp.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tailcs/rng.hpp"

namespace tailcs {

namespace {

void check_cfg(const PhppConfig& cfg) {
  if (!(cfg.lambda > 0.0)) throw std::invalid_argument("PhppConfig: lambda must be > 0");
  if (!(cfg.alpha > 0.0)) throw std::invalid_argument("PhppConfig: alpha must be > 0");
  if (cfg.max_iters < 1) throw std::invalid_argument("PhppConfig: max_iters must be >= 1");
}

// Solves [G .* (other other^T) + diag(lambda*tail + 1/alpha)] x = Aty .* other + self/alpha.
// The system matrix is SPD for any alpha > 0: the Hadamard factor is PSD and
// the diagonal shift is positive.
Vector factor_update(const Matrix& gram, const Vector& Aty, const Eigen::ArrayXd& tail,
                     double lambda, double alpha, const Vector& self, const Vector& other) {
  const Index n = gram.rows();
  Matrix M = gram.cwiseProduct(other * other.transpose());
  const double inv_alpha = 1.0 / alpha;
  for (Index j = 0; j < n; ++j) M(j, j) += lambda * tail[j] + inv_alpha;
  const Vector rhs = Aty.cwiseProduct(other) + inv_alpha * self;
  Eigen::LLT<Matrix> llt(M);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("phpp update: proximal system not SPD");
  return llt.solve(rhs);
}

struct TraceEval {
  double g = 0.0;
  double f = 0.0;
  double kkt = 0.0;
};

// One A*z and one A^T*r per evaluation; shared by both solver variants.
TraceEval evaluate(const Matrix& A, const Vector& y, double lambda,
                   const Eigen::ArrayXd& tail, const FactorPair& w, double zero_tol) {
  TraceEval e;
  const Vector z = w.product();
  const Vector r = A * z - y;
  const double fit = 0.5 * r.squaredNorm();
  e.f = fit + lambda * (z.array().abs() * tail).sum();
  e.g = fit + 0.5 * lambda *
                  ((w.u.array().square() * tail).sum() + (w.v.array().square() * tail).sum());
  const Vector gamma = A.transpose() * r;
  e.kkt = detail::kkt_from_gamma(gamma, tail, lambda, z, zero_tol).overall;
  return e;
}

constexpr double kKktZeroTol = 1e-10;

}  // namespace

Vector phpp_update_u(const TailProblem& p, const PhppConfig& cfg, const Vector& u_k,
                     const Vector& v_k) {
  check_cfg(cfg);
  if (u_k.size() != p.n() || v_k.size() != p.n())
    throw std::invalid_argument("phpp_update_u: dimension mismatch");
  const Matrix gram = p.A.transpose() * p.A;
  const Vector Aty = p.A.transpose() * p.y;
  return factor_update(gram, Aty, p.tail, cfg.lambda, cfg.alpha, u_k, v_k);
}

Vector phpp_update_v(const TailProblem& p, const PhppConfig& cfg, const Vector& u_next,
                     const Vector& v_k) {
  check_cfg(cfg);
  if (u_next.size() != p.n() || v_k.size() != p.n())
    throw std::invalid_argument("phpp_update_v: dimension mismatch");
  const Matrix gram = p.A.transpose() * p.A;
  const Vector Aty = p.A.transpose() * p.y;
  return factor_update(gram, Aty, p.tail, cfg.lambda, cfg.alpha, v_k, u_next);
}

std::pair<FactorPair, SolverTrace> solve_phpp(const TailProblem& p, const PhppConfig& cfg,
                                              const FactorPair& w0) {
  check_cfg(cfg);
  if (w0.u.size() != p.n() || w0.v.size() != p.n())
    throw std::invalid_argument("solve_phpp: initial point dimension mismatch");
  if (!w0.u.allFinite() || !w0.v.allFinite())
    throw std::invalid_argument("solve_phpp: initial point must be finite");

  const Index n = p.n();
  const Matrix gram = p.A.transpose() * p.A;
  const Vector Aty = p.A.transpose() * p.y;

  SolverTrace trace;
  FactorPair w = w0;
  {
    const TraceEval e0 = evaluate(p.A, p.y, p.lambda, p.tail, w, kKktZeroTol);
    trace.entries.push_back({0, e0.g, e0.f, 0.0, n, n, static_cast<Index>(p.T.size()), e0.kkt});
  }
  if (cfg.record_iterates) trace.iterates.push_back(w);

  trace.status = SolveStatus::max_iters;
  for (Index k = 1; k <= cfg.max_iters; ++k) {
    FactorPair next;
    next.u = factor_update(gram, Aty, p.tail, cfg.lambda, cfg.alpha, w.u, w.v);
    next.v = factor_update(gram, Aty, p.tail, cfg.lambda, cfg.alpha, w.v, next.u);
    const double step = (next - w).norm();
    w = std::move(next);

    const TraceEval e = evaluate(p.A, p.y, p.lambda, p.tail, w, kKktZeroTol);
    trace.entries.push_back({k, e.g, e.f, step, n, n, static_cast<Index>(p.T.size()), e.kkt});
    if (cfg.record_iterates) trace.iterates.push_back(w);

    if (step <= cfg.step_tol) {
      trace.status = SolveStatus::converged_step;
      break;
    }
    if (e.kkt <= cfg.kkt_tol) {
      trace.status = SolveStatus::converged_kkt;
      break;
    }
  }
  return {w, trace};
}

SupportSet hard_threshold_support(const Vector& z, Index s) {
  const Index n = z.size();
  if (s < 1 || s > n)
    throw std::invalid_argument("hard_threshold_support: need 1 <= s <= n");
  SupportSet idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::partial_sort(idx.begin(), idx.begin() + s, idx.end(), [&z](Index a, Index b) {
    const double za = std::abs(z[a]);
    const double zb = std::abs(z[b]);
    if (za != zb) return za > zb;
    return a < b;  // ties: lower index wins
  });
  idx.resize(static_cast<std::size_t>(s));
  std::sort(idx.begin(), idx.end());
  return idx;
}

namespace {

// Shared body of the restricted updates (3.9)-(3.12): `self` is the vector
// being updated, `other` the fixed one, S the active set of `other`.
Vector restricted_update(const Matrix& A, const Vector& y, const PhppConfig& cfg,
                         const Vector& self, const Vector& other, const SupportSet& S,
                         const SupportSet& T) {
  const Index n = A.cols();
  if (self.size() != n || other.size() != n)
    throw std::invalid_argument("restricted update: dimension mismatch");
  const std::vector<bool> in_T = membership_mask(T, n);
  const std::vector<bool> in_S = membership_mask(S, n);
  const double shrink = 1.0 / (cfg.lambda * cfg.alpha + 1.0);

  Vector next(n);
  for (Index j = 0; j < n; ++j)
    next[j] = in_S[static_cast<std::size_t>(j)] ? 0.0
              : in_T[static_cast<std::size_t>(j)] ? self[j]
                                                  : shrink * self[j];

  const Index s = static_cast<Index>(S.size());
  if (s == 0) return next;

  Matrix As(A.rows(), s);
  Vector self_S(s), other_S(s);
  for (Index i = 0; i < s; ++i) {
    As.col(i) = A.col(S[static_cast<std::size_t>(i)]);
    self_S[i] = self[S[static_cast<std::size_t>(i)]];
    other_S[i] = other[S[static_cast<std::size_t>(i)]];
  }
  Matrix M = (As.transpose() * As).cwiseProduct(other_S * other_S.transpose());
  const double inv_alpha = 1.0 / cfg.alpha;
  for (Index i = 0; i < s; ++i) {
    const bool penalized = !in_T[static_cast<std::size_t>(S[static_cast<std::size_t>(i)])];
    M(i, i) += (penalized ? cfg.lambda : 0.0) + inv_alpha;
  }
  const Vector rhs = (As.transpose() * y).cwiseProduct(other_S) + inv_alpha * self_S;
  Eigen::LLT<Matrix> llt(M);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("restricted update: proximal system not SPD");
  const Vector sol = llt.solve(rhs);
  for (Index i = 0; i < s; ++i) next[S[static_cast<std::size_t>(i)]] = sol[i];
  return next;
}

}  // namespace

Vector restricted_update_u(const Matrix& A, const Vector& y, const PhppConfig& cfg,
                           const Vector& u_k, const Vector& v_k, const SupportSet& S_k,
                           const SupportSet& T_k) {
  check_cfg(cfg);
  return restricted_update(A, y, cfg, u_k, v_k, S_k, T_k);
}

Vector restricted_update_v(const Matrix& A, const Vector& y, const PhppConfig& cfg,
                           const Vector& u_next, const Vector& v_k, const SupportSet& S_tilde,
                           const SupportSet& T_k) {
  check_cfg(cfg);
  return restricted_update(A, y, cfg, v_k, u_next, S_tilde, T_k);
}

std::pair<Vector, SolverTrace> solve_phpp_improved(const Matrix& A, const Vector& y,
                                                   const PhppConfig& cfg, const FactorPair& w0) {
  check_cfg(cfg);
  const Index n = A.cols();
  if (y.size() != A.rows()) throw std::invalid_argument("solve_phpp_improved: y length != m");
  if (w0.u.size() != n || w0.v.size() != n)
    throw std::invalid_argument("solve_phpp_improved: initial point dimension mismatch");
  if (!w0.u.allFinite() || !w0.v.allFinite())
    throw std::invalid_argument("solve_phpp_improved: initial point must be finite");
  if (!(cfg.tau > 0.0)) throw std::invalid_argument("solve_phpp_improved: tau must be > 0");
  if (cfg.k0 < 1 || cfg.kp < 0)
    throw std::invalid_argument("solve_phpp_improved: need k0 >= 1 and kp >= 0");

  const Index kT_cap = std::min(A.rows(), n);
  Index kT = std::min(cfg.k0, kT_cap);

  FactorPair w = w0;
  Vector z = w.product();
  SupportSet T_k = hard_threshold_support(z, kT);
  Eigen::ArrayXd tail = complement_indicator(T_k, n);

  SolverTrace trace;
  {
    const TraceEval e0 = evaluate(A, y, cfg.lambda, tail, w, kKktZeroTol);
    trace.entries.push_back({0, e0.g, e0.f, 0.0, 0, 0, kT, e0.kkt});
  }
  if (cfg.record_iterates) trace.iterates.push_back(w);

  const auto active_set = [&](const Vector& x) {
    SupportSet s;
    for (Index j = 0; j < n; ++j)
      if (std::abs(x[j]) >= cfg.tau) s.push_back(j);
    return s;
  };

  trace.status = SolveStatus::max_iters;
  for (Index k = 1; k <= cfg.max_iters; ++k) {
    const SupportSet S_k = active_set(w.v);
    FactorPair next;
    next.u = restricted_update(A, y, cfg, w.u, w.v, S_k, T_k);
    const SupportSet S_tilde = active_set(next.u);
    next.v = restricted_update(A, y, cfg, w.v, next.u, S_tilde, T_k);
    const double step = (next - w).norm();
    w = std::move(next);
    z = w.product();

    const TraceEval e = evaluate(A, y, cfg.lambda, tail, w, kKktZeroTol);
    trace.entries.push_back({k, e.g, e.f, step, static_cast<Index>(S_k.size()),
                             static_cast<Index>(S_tilde.size()), kT, e.kkt});
    if (cfg.record_iterates) trace.iterates.push_back(w);

    // Step 7: grow the estimated support and refresh it from the new iterate.
    kT = std::min(kT + cfg.kp, kT_cap);
    T_k = hard_threshold_support(z, kT);
    tail = complement_indicator(T_k, n);

    if (step <= cfg.step_tol) {
      trace.status = SolveStatus::converged_step;
      break;
    }
    if (e.kkt <= cfg.kkt_tol) {
      trace.status = SolveStatus::converged_kkt;
      break;
    }
  }
  return {z, trace};
}

FactorPair default_init(const Matrix& A, const Vector& y, std::uint64_t seed) {
  const Index n = A.cols();
  const double scale = std::sqrt((A.transpose() * y).cwiseAbs().maxCoeff());
  Rng rng = Rng::derive(seed, {stream::init});
  Vector u(n);
  for (Index j = 0; j < n; ++j) u[j] = scale * (0.5 + rng.uniform01());
  return {u, u};
}

}  // namespace tailcs
