#include "tailcs/analysis.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

#include "tailcs/rng.hpp"

namespace tailcs {

namespace {

constexpr double kEnumBudget = 1e7;

void eigen_range(const Matrix& gram, const SupportSet& S, double& lam_min, double& lam_max) {
  const Index k = static_cast<Index>(S.size());
  if (k == 1) {
    lam_min = lam_max = gram(S[0], S[0]);
    return;
  }
  if (k == 2) {
    Eigen::Matrix2d Gs;
    Gs << gram(S[0], S[0]), gram(S[0], S[1]), gram(S[1], S[0]), gram(S[1], S[1]);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es;
    es.computeDirect(Gs, Eigen::EigenvaluesOnly);
    lam_min = es.eigenvalues()(0);
    lam_max = es.eigenvalues()(1);
    return;
  }
  Matrix Gs(k, k);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j)
      Gs(i, j) = gram(S[static_cast<std::size_t>(i)], S[static_cast<std::size_t>(j)]);
  Eigen::SelfAdjointEigenSolver<Matrix> es(Gs, Eigen::EigenvaluesOnly);
  lam_min = es.eigenvalues()(0);
  lam_max = es.eigenvalues()(k - 1);
}

bool next_combination(SupportSet& S, Index n) {
  const Index k = static_cast<Index>(S.size());
  Index i = k - 1;
  while (i >= 0 && S[static_cast<std::size_t>(i)] == n - k + i) --i;
  if (i < 0) return false;
  ++S[static_cast<std::size_t>(i)];
  for (Index j = i + 1; j < k; ++j)
    S[static_cast<std::size_t>(j)] = S[static_cast<std::size_t>(i)] + (j - i);
  return true;
}

void check_rip_args(const Matrix& A, Index k) {
  if (k < 1 || k > A.cols())
    throw std::invalid_argument("rip estimate: need 1 <= k <= n");
}

}  // namespace

double binomial_capped(Index n, Index k, double cap) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (Index i = 1; i <= k; ++i) {
    c *= static_cast<double>(n - k + i) / static_cast<double>(i);
    if (c > cap) return cap + 1.0;
  }
  return c;
}

RipEstimate rip_exact(const Matrix& A, Index k) {
  check_rip_args(A, k);
  const Index n = A.cols();
  if (binomial_capped(n, k, kEnumBudget) > kEnumBudget)
    throw std::invalid_argument("rip_exact: enumeration budget C(n,k) <= 1e7 exceeded");

  const Matrix gram = A.transpose() * A;
  RipEstimate est;
  est.k = k;
  est.method = RipEstimate::Method::exact;

  SupportSet S(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) S[static_cast<std::size_t>(i)] = i;
  do {
    double lam_min = 0.0, lam_max = 0.0;
    eigen_range(gram, S, lam_min, lam_max);
    est.lower = std::max(est.lower, 1.0 - lam_min);
    est.upper = std::max(est.upper, lam_max - 1.0);
  } while (next_combination(S, n));
  return est;
}

RipEstimate rip_monte_carlo(const Matrix& A, Index k, std::uint64_t trials,
                            std::uint64_t seed) {
  check_rip_args(A, k);
  if (trials < 1) throw std::invalid_argument("rip_monte_carlo: trials must be >= 1");
  const Matrix gram = A.transpose() * A;
  RipEstimate est;
  est.k = k;
  est.method = RipEstimate::Method::monte_carlo;
  est.samples = trials;
  // Per-trial streams keep the max-reduction independent of evaluation order.
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng = Rng::derive(seed, {stream::rip_mc, t});
    const SupportSet S = rng.uniform_subset(A.cols(), k);
    double lam_min = 0.0, lam_max = 0.0;
    eigen_range(gram, S, lam_min, lam_max);
    est.lower = std::max(est.lower, 1.0 - lam_min);
    est.upper = std::max(est.upper, lam_max - 1.0);
  }
  return est;
}

Index rip_order_thm_2_2(double a, Index k, Index k_T) {
  const double K = std::max((a + 1.0) * static_cast<double>(k) + static_cast<double>(k_T),
                            2.0 * a * static_cast<double>(k));
  return static_cast<Index>(std::ceil(K - 1e-12));
}

Index rip_order_thm_2_4(double a, Index k, Index k_T) {
  const double K = std::max(a * static_cast<double>(k) + static_cast<double>(k_T),
                            2.0 * a * static_cast<double>(k));
  return static_cast<Index>(std::ceil(K - 1e-12));
}

namespace {

void check_bound_common(double a, Index k, Index k_T, double scalar, double tail_mass) {
  if (!(a > 0.0)) throw std::invalid_argument("bound: a must be > 0");
  if (k < 1) throw std::invalid_argument("bound: k must be >= 1");
  if (k_T < 0) throw std::invalid_argument("bound: k_T must be >= 0");
  if (scalar < 0.0) throw std::invalid_argument("bound: eps/lambda must be >= 0");
  if (tail_mass < 0.0) throw std::invalid_argument("bound: tail mass must be >= 0");
}

}  // namespace

BoundReport bound_thm_2_2(double delta_l, double delta_u, double a, Index k, Index k_T,
                          double eps, double tail_mass, bool rip_certified) {
  check_bound_common(a, k, k_T, eps, tail_mass);
  if (delta_l < 0.0 || delta_l >= 1.0)
    throw std::invalid_argument("bound_thm_2_2: need 0 <= delta_l < 1");
  if (delta_u < 0.0) throw std::invalid_argument("bound_thm_2_2: need delta_u >= 0");

  BoundReport r;
  r.theorem = BoundTheorem::thm_2_2;
  r.a = a;
  r.k = k;
  r.k_T = k_T;
  r.order = rip_order_thm_2_2(a, k, k_T);
  r.eps_or_lambda = eps;
  r.tail_mass = tail_mass;
  r.rip_certified = rip_certified;

  const double delta = std::max(delta_l, delta_u);
  r.feasible = a * (1.0 - delta_l) * (1.0 - delta_l) > 2.0 * delta * delta;
  if (!r.feasible) return r;

  const double sa = std::sqrt(a);
  const double denom = sa * (1.0 - delta_l) - std::sqrt(2.0) * delta;
  r.c1 = 2.0 * (sa + 1.0) * std::sqrt(1.0 + delta) / denom;
  r.c2 = 2.0 * std::sqrt(2.0) * (sa + 1.0) * delta / denom + 2.0;
  r.predicted_error = r.c1 * eps + r.c2 * tail_mass / std::sqrt(a * static_cast<double>(k));
  return r;
}

BoundReport bound_thm_2_4(double delta_l, double delta_u, double a, Index k, Index k_T,
                          double eps, double tail_mass, bool rip_certified) {
  check_bound_common(a, k, k_T, eps, tail_mass);
  if (delta_l < 0.0 || delta_l >= 1.0)
    throw std::invalid_argument("bound_thm_2_4: need 0 <= delta_l < 1");
  if (delta_u < 0.0) throw std::invalid_argument("bound_thm_2_4: need delta_u >= 0");

  BoundReport r;
  r.theorem = BoundTheorem::thm_2_4;
  r.a = a;
  r.k = k;
  r.k_T = k_T;
  r.order = rip_order_thm_2_4(a, k, k_T);
  r.eps_or_lambda = eps;
  r.tail_mass = tail_mass;
  r.rip_certified = rip_certified;
  r.feasible = true;

  const double delta = std::max(delta_l, delta_u);
  r.c1 = 2.0 * std::sqrt(1.0 + delta) / (1.0 - delta_l);
  r.c2 = 2.0 * std::sqrt(2.0) * delta / (1.0 - delta_l) + 2.0;
  r.predicted_error = r.c1 * eps + r.c2 * tail_mass / std::sqrt(a * static_cast<double>(k));
  return r;
}

BoundReport bound_thm_2_8(double delta, double a, Index k, Index k_T, double lambda,
                          double tail_mass, bool rip_certified) {
  check_bound_common(a, k, k_T, lambda, tail_mass);
  if (delta < 0.0) throw std::invalid_argument("bound_thm_2_8: need delta >= 0");
  if (!(lambda > 0.0)) throw std::invalid_argument("bound_thm_2_8: lambda must be > 0");

  BoundReport r;
  r.theorem = BoundTheorem::thm_2_8;
  r.a = a;
  r.k = k;
  r.k_T = k_T;
  r.order = rip_order_thm_2_2(a, k, k_T);
  r.eps_or_lambda = lambda;
  r.tail_mass = tail_mass;
  r.rip_certified = rip_certified;

  const double gamma =
      std::sqrt((1.0 + static_cast<double>(k_T) / static_cast<double>(k)) / a);
  const double beta = delta + 3.0 * std::sqrt(2.0) * gamma * delta;
  r.feasible = beta < 1.0;
  if (!r.feasible) return r;

  const double factor = 3.0 * gamma + 1.0;
  r.c1 = 6.0 * (1.0 + delta) * factor / ((1.0 - beta) * (1.0 - beta));
  r.c2 = 2.0 * std::sqrt(2.0) * factor / (1.0 - beta);
  r.c3 = 8.0 * delta * factor / (1.0 - beta) + 4.0;
  r.predicted_error =
      r.c1 * lambda * std::sqrt(static_cast<double>(k + k_T)) +
      r.c2 * std::sqrt(lambda * tail_mass) +
      r.c3 * tail_mass / std::sqrt(a * static_cast<double>(k));
  return r;
}

RateEstimate rate_from_sequence(std::vector<double> r, Index max_window) {
  while (!r.empty() && r.back() <= 1e-13) r.pop_back();
  if (static_cast<Index>(r.size()) < 11)
    throw std::invalid_argument(
        "rate estimate: need at least 10 pre-terminal iterations with r > 1e-13");
  const Index ratios = static_cast<Index>(r.size()) - 1;
  const Index window = std::min(max_window, ratios);
  RateEstimate est;
  est.window = window;
  est.tau_rate = 0.0;
  for (Index i = ratios - window; i < ratios; ++i) {
    est.tau_rate = std::max(est.tau_rate, r[static_cast<std::size_t>(i + 1)] /
                                              r[static_cast<std::size_t>(i)]);
  }
  return est;
}

RateEstimate rate_estimate(const SolverTrace& trace, const FactorPair& w_star,
                           Index max_window) {
  if (trace.iterates.empty())
    throw std::invalid_argument("rate_estimate: trace has no recorded iterates");
  std::vector<double> r;
  r.reserve(trace.iterates.size());
  for (const FactorPair& w : trace.iterates) r.push_back((w - w_star).norm());
  return rate_from_sequence(std::move(r), max_window);
}

}  // namespace tailcs
