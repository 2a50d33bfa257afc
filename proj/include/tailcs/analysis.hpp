#pragma once

#include <cstdint>
#include <vector>

#include "tailcs/phpp.hpp"
#include "tailcs/types.hpp"

namespace tailcs {

struct RipEstimate {
  enum class Method { exact, monte_carlo };
  Index k = 0;
  double lower = 0.0;  // delta_{k,l}
  double upper = 0.0;  // delta_{k,u}
  Method method = Method::exact;
  std::uint64_t samples = 0;  // Monte Carlo only

  double delta() const { return std::max(lower, upper); }
};

/// Exact RIP constants of order k by enumerating every k-column Gram matrix.
/// Guarded by an enumeration budget of C(n,k) <= 10^7.
RipEstimate rip_exact(const Matrix& A, Index k);

/// Monte-Carlo lower bounds on the order-k RIP constants from random supports.
RipEstimate rip_monte_carlo(const Matrix& A, Index k, std::uint64_t trials,
                            std::uint64_t seed);

double binomial_capped(Index n, Index k, double cap = 1e18);

enum class BoundTheorem { thm_2_2, thm_2_4, thm_2_8 };

struct BoundReport {
  BoundTheorem theorem = BoundTheorem::thm_2_2;
  bool feasible = false;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;  // thm_2_8 only
  double predicted_error = 0.0;
  // inputs echoed for the record
  double a = 0.0;
  Index k = 0;
  Index k_T = 0;
  Index order = 0;          // ceil(K) or ceil(K')
  double eps_or_lambda = 0.0;
  double tail_mass = 0.0;
  bool rip_certified = true;  // false when the deltas are MC lower bounds
};

/// RIP order K = ceil(max{(a+1)k + k_T, 2ak}).
Index rip_order_thm_2_2(double a, Index k, Index k_T);
/// RIP order K' = ceil(max{ak + k_T, 2ak}).
Index rip_order_thm_2_4(double a, Index k, Index k_T);

/// Constrained recovery bound with feasibility gate a > 2*delta^2/(1-delta_l)^2:
///   error <= C1*eps + C2*tail_mass/sqrt(a k).
BoundReport bound_thm_2_2(double delta_l, double delta_u, double a, Index k, Index k_T,
                          double eps, double tail_mass, bool rip_certified = true);

/// Relaxed constrained bound, feasible for any delta_l < 1:
///   error <= C1*eps + C2*tail_mass/sqrt(a k).
BoundReport bound_thm_2_4(double delta_l, double delta_u, double a, Index k, Index k_T,
                          double eps, double tail_mass, bool rip_certified = true);

/// Tail-lasso bound, feasible when delta*(1 + 3*sqrt(2)*gamma) < 1:
///   error <= C1*lambda*sqrt(k+k_T) + C2*sqrt(lambda*tail_mass) + C3*tail_mass/sqrt(a k).
BoundReport bound_thm_2_8(double delta, double a, Index k, Index k_T, double lambda,
                          double tail_mass, bool rip_certified = true);

struct RateEstimate {
  double tau_rate = 0.0;
  Index window = 0;  // number of consecutive ratios examined
};

/// Max ratio r_{k+1}/r_k over the trailing window of a distance sequence,
/// after stripping the terminal plateau (r <= 1e-13). Needs >= 10 ratios.
RateEstimate rate_from_sequence(std::vector<double> r, Index max_window = 20);

/// Distance-to-limit rate of a recorded solver run; the trace must have been
/// produced with record_iterates enabled.
RateEstimate rate_estimate(const SolverTrace& trace, const FactorPair& w_star,
                           Index max_window = 20);

}  // namespace tailcs
