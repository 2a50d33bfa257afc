#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tailcs/objective.hpp"
#include "tailcs/types.hpp"

namespace tailcs {

struct PhppConfig {
  double lambda = 1e-3;
  double alpha = 1e4;       // proximal parameter; 10/lambda in the experiments
  double tau = 1e-5;        // activity threshold (improved variant)
  Index k0 = 1;             // initial estimated-support size
  Index kp = 1;             // estimated-support growth per iteration
  Index max_iters = 500;
  double step_tol = 1e-10;  // stop when ||w_{k+1} - w_k|| <= step_tol
  double kkt_tol = 1e-8;    // stop when the KKT overall residual <= kkt_tol
  bool record_iterates = false;  // keep (u_k, v_k) for convergence analysis
};

enum class SolveStatus { converged_step, converged_kkt, max_iters };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged_step: return "converged_step";
    case SolveStatus::converged_kkt: return "converged_kkt";
    default: return "max_iters";
  }
}

struct TraceEntry {
  Index iter = 0;
  double g_value = 0.0;
  double f_value = 0.0;
  double step_norm = 0.0;    // ||w_k - w_{k-1}|| (0 for the initial entry)
  Index s_size = 0;          // |S_k| used by the u-update
  Index s_tilde_size = 0;    // |~S_k| used by the v-update
  Index t_size = 0;          // |T_k|
  double kkt_overall = 0.0;
};

struct SolverTrace {
  std::vector<TraceEntry> entries;  // entry 0 is the initial point
  SolveStatus status = SolveStatus::max_iters;
  std::vector<FactorPair> iterates;  // filled only when record_iterates is set

  Index iterations() const { return static_cast<Index>(entries.size()) - 1; }
};

/// Closed-form proximal u-update:
/// u+ = [(A^T A) .* (v v^T) + lambda*I_{T^c} + (1/alpha)*I]^{-1} [(A^T y) .* v + u/alpha].
Vector phpp_update_u(const TailProblem& p, const PhppConfig& cfg, const Vector& u_k,
                     const Vector& v_k);

/// Mirror image of phpp_update_u with the roles of u and v swapped.
Vector phpp_update_v(const TailProblem& p, const PhppConfig& cfg, const Vector& u_next,
                     const Vector& v_k);

/// Proximal alternating minimization with full closed-form updates (fixed T).
std::pair<FactorPair, SolverTrace> solve_phpp(const TailProblem& p, const PhppConfig& cfg,
                                              const FactorPair& w0);

/// Indices of the s largest-magnitude entries of z (ties: lower index wins).
SupportSet hard_threshold_support(const Vector& z, Index s);

/// Support-restricted u-update: the dense system is solved only on S_k; off
/// S_k the entry is kept (j in T_k) or shrunk by 1/(lambda*alpha + 1).
Vector restricted_update_u(const Matrix& A, const Vector& y, const PhppConfig& cfg,
                           const Vector& u_k, const Vector& v_k, const SupportSet& S_k,
                           const SupportSet& T_k);

Vector restricted_update_v(const Matrix& A, const Vector& y, const PhppConfig& cfg,
                           const Vector& u_next, const Vector& v_k, const SupportSet& S_tilde,
                           const SupportSet& T_k);

/// Improved variant: support-restricted updates plus the adaptive estimated
/// support T_k = supp(H_{k_T}(z_k)) with k_T growing by kp up to min(m, n).
std::pair<Vector, SolverTrace> solve_phpp_improved(const Matrix& A, const Vector& y,
                                                   const PhppConfig& cfg, const FactorPair& w0);

/// Default random initialization: u0 = v0 with entries uniform on [0.5, 1.5]
/// scaled by ||A^T y||_inf^{1/2}.
FactorPair default_init(const Matrix& A, const Vector& y, std::uint64_t seed);

}  // namespace tailcs
