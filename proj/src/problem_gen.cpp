#include "tailcs/problem_gen.hpp"

#include <cmath>
#include <stdexcept>

#include "tailcs/rng.hpp"

namespace tailcs {

Vector SparseSignal::dense() const {
  Vector x = Vector::Zero(n);
  for (std::size_t i = 0; i < support.size(); ++i)
    x[support[i]] = values[static_cast<Index>(i)];
  return x;
}

namespace {

void check_dims(Index m, Index n) {
  if (m < 1 || n < 1)
    throw std::invalid_argument("matrix generation requires m >= 1 and n >= 1");
}

void normalize_columns(Matrix& A) {
  for (Index j = 0; j < A.cols(); ++j) {
    const double nrm = A.col(j).norm();
    if (nrm == 0.0) throw std::runtime_error("zero column cannot be normalized");
    A.col(j) /= nrm;
  }
}

bool has_zero_column(const Matrix& A) {
  for (Index j = 0; j < A.cols(); ++j)
    if (A.col(j).norm() < 1e-300) return true;
  return false;
}

}  // namespace

Matrix gen_gaussian_matrix(Index m, Index n, std::uint64_t seed) {
  check_dims(m, n);
  Rng rng = Rng::derive(seed, {stream::matrix, 1});
  Matrix A(m, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i) A(i, j) = rng.normal();
  normalize_columns(A);
  return A;
}

double partial_dct_raw_entry(double psi, Index j) {
  return std::cos(2.0 * M_PI * static_cast<double>(j) * psi);
}

Matrix gen_partial_dct(Index m, Index n, std::uint64_t seed) {
  check_dims(m, n);
  Rng rng = Rng::derive(seed, {stream::matrix, 2});
  Matrix A(m, n);
  // A zero column is a probability-zero event; redraw the frequencies if it
  // ever happens since normalization would divide by zero.
  for (int attempt = 0; attempt < 64; ++attempt) {
    for (Index i = 0; i < m; ++i) {
      const double psi = rng.uniform01();
      for (Index j = 0; j < n; ++j) A(i, j) = partial_dct_raw_entry(psi, j);
    }
    if (!has_zero_column(A)) {
      normalize_columns(A);
      return A;
    }
  }
  throw std::runtime_error("gen_partial_dct: persistent zero column");
}

SparseSignal gen_sparse_signal(Index n, Index k, std::uint64_t seed) {
  if (k < 1 || k > n)
    throw std::invalid_argument("gen_sparse_signal requires 1 <= k <= n");
  Rng support_rng = Rng::derive(seed, {stream::support});
  Rng value_rng = Rng::derive(seed, {stream::values});
  SparseSignal x;
  x.n = n;
  x.support = support_rng.uniform_subset(n, k);
  x.values = Vector(k);
  for (Index i = 0; i < k; ++i) x.values[i] = value_rng.normal();
  return x;
}

Vector gen_noise(const NoiseModel& model, Index m, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("gen_noise requires m >= 1");
  if (model.sigma < 0.0) throw std::invalid_argument("noise sigma must be >= 0");
  Vector w = Vector::Zero(m);
  if (model.kind == NoiseModel::Kind::none || model.sigma == 0.0) return w;
  Rng rng = Rng::derive(seed, {stream::noise});
  const double scale = model.sigma / std::sqrt(static_cast<double>(m));
  switch (model.kind) {
    case NoiseModel::Kind::gaussian:
      for (Index i = 0; i < m; ++i) w[i] = scale * rng.normal();
      break;
    case NoiseModel::Kind::student_t:
      if (!(model.dof > 0.0))
        throw std::invalid_argument("student_t noise requires dof > 0");
      for (Index i = 0; i < m; ++i) w[i] = scale * rng.student_t(model.dof);
      break;
    case NoiseModel::Kind::none:
      break;
  }
  return w;
}

ProblemInstance assemble_instance(const Matrix& A, const SparseSignal& truth,
                                  const Vector& noise, std::uint64_t seed,
                                  Ensemble ensemble) {
  if (truth.n != A.cols())
    throw std::invalid_argument("assemble_instance: signal dimension mismatch");
  if (noise.size() != A.rows())
    throw std::invalid_argument("assemble_instance: noise dimension mismatch");
  ProblemInstance inst;
  inst.A = A;
  inst.truth = truth;
  inst.noise = noise;
  const Vector Ax = A * truth.dense();
  inst.y = Ax + noise;
  inst.seed = seed;
  inst.ensemble = ensemble;
  return inst;
}

ProblemInstance make_instance(Ensemble ensemble, Index m, Index n, Index k,
                              const NoiseModel& noise, std::uint64_t seed) {
  const Matrix A = ensemble == Ensemble::gaussian ? gen_gaussian_matrix(m, n, seed)
                                                  : gen_partial_dct(m, n, seed);
  const SparseSignal x = gen_sparse_signal(n, k, seed);
  const Vector w = gen_noise(noise, m, seed);
  return assemble_instance(A, x, w, seed, ensemble);
}

}  // namespace tailcs
