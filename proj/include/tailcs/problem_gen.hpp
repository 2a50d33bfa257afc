#pragma once

#include <cstdint>

#include "tailcs/types.hpp"

namespace tailcs {

struct SparseSignal {
  Index n = 0;
  SupportSet support;  // strictly increasing indices in [0, n)
  Vector values;       // nonzero values, aligned with support

  Vector dense() const;
  Index sparsity() const { return static_cast<Index>(support.size()); }
};

struct NoiseModel {
  enum class Kind { none, gaussian, student_t };
  Kind kind = Kind::none;
  double sigma = 0.0;
  double dof = 5.0;  // student_t only

  static NoiseModel noiseless() { return {}; }
  static NoiseModel gaussian(double sigma) { return {Kind::gaussian, sigma, 0.0}; }
  static NoiseModel student(double sigma, double dof) { return {Kind::student_t, sigma, dof}; }
};

struct ProblemInstance {
  Matrix A;
  SparseSignal truth;
  Vector noise;  // length m
  Vector y;      // A * truth.dense() + noise
  std::uint64_t seed = 0;
  Ensemble ensemble = Ensemble::gaussian;
};

/// m x n matrix with i.i.d. standard normal entries, columns scaled to unit norm.
Matrix gen_gaussian_matrix(Index m, Index n, std::uint64_t seed);

/// Random partial DCT rows: raw entry cos(2*pi*j*psi_i) for column j (0-based)
/// with psi_i uniform on [0,1); columns scaled to unit norm afterwards.
Matrix gen_partial_dct(Index m, Index n, std::uint64_t seed);

/// Raw partial-DCT entry for frequency psi and 0-based column j.
double partial_dct_raw_entry(double psi, Index j);

/// k-sparse signal: uniformly random support, standard normal values.
SparseSignal gen_sparse_signal(Index n, Index k, std::uint64_t seed);

/// Noise vector of length m; gaussian/student entries are scaled by sigma/sqrt(m).
Vector gen_noise(const NoiseModel& model, Index m, std::uint64_t seed);

/// Builds y = A x + w and bundles the pieces. Seed/ensemble tags are metadata.
ProblemInstance assemble_instance(const Matrix& A, const SparseSignal& truth,
                                  const Vector& noise, std::uint64_t seed = 0,
                                  Ensemble ensemble = Ensemble::gaussian);

/// One-call generator used by the benchmark: matrix, signal and noise come from
/// disjoint sub-streams of `seed`, so e.g. the noise model never perturbs A.
ProblemInstance make_instance(Ensemble ensemble, Index m, Index n, Index k,
                              const NoiseModel& noise, std::uint64_t seed);

}  // namespace tailcs
