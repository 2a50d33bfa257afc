#pragma once

#include "tailcs/objective.hpp"
#include "tailcs/phpp.hpp"
#include "tailcs/types.hpp"

namespace tailcs {

struct BaselineConfig {
  Index k = 1;                 // target sparsity (greedy methods)
  Index max_iters = 100;
  double residual_tol = 1e-12;
};

/// Convex reference for the tail-lasso: accelerated proximal gradient run
/// until the KKT overall residual drops below `tol`. Throws on non-convergence
/// within `max_iters`, reporting the final residual.
Vector tail_lasso_oracle(const TailProblem& p, double tol, Index max_iters = 500000);

/// Constrained tail-l1 program: min ||z_{T^c}||_1 s.t. ||A z - y|| <= eps.
/// eps = 0 goes through an equality-constrained LP; eps > 0 uses lambda
/// continuation on the tail-lasso oracle with bisection refinement.
Vector tail_l1_constrained(const Matrix& A, const Vector& y, const SupportSet& T,
                           double eps, double tol);

Vector omp(const Matrix& A, const Vector& y, const BaselineConfig& cfg);
Vector cosamp(const Matrix& A, const Vector& y, const BaselineConfig& cfg);
Vector sp(const Matrix& A, const Vector& y, const BaselineConfig& cfg);
Vector htp(const Matrix& A, const Vector& y, const BaselineConfig& cfg,
           double step_size = 1.0);

/// Classical Hadamard product parametrization: Algorithm 1 with T empty.
Vector hpp(const Matrix& A, const Vector& y, double lambda, const PhppConfig& cfg,
           const FactorPair& w0);

/// Algorithm 1 with a fixed user-supplied estimated support.
Vector tail_hpp(const Matrix& A, const Vector& y, double lambda, const SupportSet& T_fixed,
                const PhppConfig& cfg, const FactorPair& w0);

/// Largest eigenvalue of A^T A (squared spectral norm) by power iteration.
double spectral_norm_squared(const Matrix& A, Index iters = 300);

}  // namespace tailcs
