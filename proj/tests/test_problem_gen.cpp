#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "tailcs/problem_gen.hpp"
#include "tailcs/rng.hpp"

using namespace tailcs;

TEST_CASE("gaussian matrix columns have unit norm") {
  const Matrix A = gen_gaussian_matrix(64, 256, 42);
  for (Index j = 0; j < A.cols(); ++j) CHECK(A.col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("1x1 gaussian matrix is +-1") {
  for (std::uint64_t s = 0; s < 8; ++s) {
    const Matrix A = gen_gaussian_matrix(1, 1, s);
    CHECK(std::abs(std::abs(A(0, 0)) - 1.0) < 1e-15);
  }
}

TEST_CASE("matrix generation is deterministic") {
  const Matrix A1 = gen_gaussian_matrix(4, 8, 7);
  const Matrix A2 = gen_gaussian_matrix(4, 8, 7);
  CHECK(A1 == A2);
  const Matrix B1 = gen_partial_dct(4, 8, 7);
  const Matrix B2 = gen_partial_dct(4, 8, 7);
  CHECK(B1 == B2);
  CHECK(gen_gaussian_matrix(4, 8, 8) != A1);
}

TEST_CASE("matrix generators reject empty shapes") {
  CHECK_THROWS_AS(gen_gaussian_matrix(0, 4, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_gaussian_matrix(4, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_partial_dct(0, 4, 1), std::invalid_argument);
}

TEST_CASE("partial dct raw entries follow the cosine rule") {
  // Column index 1 (second column) at psi = 0.25 hits cos(pi/2).
  CHECK(std::abs(partial_dct_raw_entry(0.25, 1)) < 1e-15);
  CHECK(partial_dct_raw_entry(0.77, 0) == 1.0);  // first column is all ones
}

TEST_CASE("partial dct first column normalizes to 1/sqrt(m)") {
  const Index m = 36;
  const Matrix A = gen_partial_dct(m, 10, 3);
  const double expect = 1.0 / std::sqrt(static_cast<double>(m));
  for (Index i = 0; i < m; ++i) CHECK(A(i, 0) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("partial dct columns have unit norm") {
  const Matrix A = gen_partial_dct(64, 256, 11);
  for (Index j = 0; j < A.cols(); ++j) CHECK(A.col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sparse signal basics") {
  const SparseSignal x = gen_sparse_signal(256, 12, 5);
  CHECK(x.sparsity() == 12);
  CHECK(is_sorted_unique(x.support));
  const Vector d = x.dense();
  Index nnz = 0;
  for (Index j = 0; j < d.size(); ++j)
    if (d[j] != 0.0) ++nnz;
  CHECK(nnz == 12);

  const SparseSignal full = gen_sparse_signal(5, 5, 1);
  CHECK(full.support == SupportSet{0, 1, 2, 3, 4});

  CHECK_THROWS_AS(gen_sparse_signal(4, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_sparse_signal(4, 0, 1), std::invalid_argument);
}

TEST_CASE("support sampling is uniform across indices") {
  const Index n = 8, k = 2;
  std::vector<int> counts(n, 0);
  const int draws = 10000;
  for (int t = 0; t < draws; ++t) {
    const SparseSignal x = gen_sparse_signal(n, k, 1000 + static_cast<std::uint64_t>(t));
    for (Index j : x.support) ++counts[static_cast<std::size_t>(j)];
  }
  for (Index j = 0; j < n; ++j) {
    const double freq = static_cast<double>(counts[static_cast<std::size_t>(j)]) / draws;
    CHECK(freq == doctest::Approx(0.25).epsilon(0.08));  // 0.25 +- 0.02
  }
}

TEST_CASE("noise kinds") {
  CHECK(gen_noise(NoiseModel::noiseless(), 16, 1).isZero());
  CHECK(gen_noise(NoiseModel::gaussian(0.0), 16, 1).isZero());

  // ||w|| concentrates near sigma for w = sigma * g / sqrt(m).
  const double sigma = 0.01;
  double mean_norm = 0.0;
  const int draws = 1000;
  for (int t = 0; t < draws; ++t)
    mean_norm += gen_noise(NoiseModel::gaussian(sigma), 64, static_cast<std::uint64_t>(t)).norm();
  mean_norm /= draws;
  CHECK(mean_norm > 0.009);
  CHECK(mean_norm < 0.011);

  const Vector t5 = gen_noise(NoiseModel::student(0.05, 5.0), 32, 9);
  CHECK(t5.allFinite());
  CHECK(t5.norm() > 0.0);
  CHECK_THROWS_AS(gen_noise(NoiseModel::student(0.05, -1.0), 32, 9), std::invalid_argument);
}

TEST_CASE("assemble_instance forms y = Ax + w") {
  SUBCASE("zero signal and noise") {
    const Matrix A = gen_gaussian_matrix(6, 8, 2);
    SparseSignal x;
    x.n = 8;
    x.support = {3};
    x.values = Vector::Zero(1);
    const ProblemInstance inst = assemble_instance(A, x, Vector::Zero(6));
    CHECK(inst.y.isZero());
  }
  SUBCASE("identity matrix returns the signal") {
    const Matrix A = Matrix::Identity(5, 5);
    SparseSignal x;
    x.n = 5;
    x.support = {1, 4};
    x.values = Vector(2);
    x.values << 2.0, -3.0;
    const ProblemInstance inst = assemble_instance(A, x, Vector::Zero(5));
    CHECK(inst.y == x.dense());
  }
  SUBCASE("definitional identity on a random instance") {
    const ProblemInstance inst =
        make_instance(Ensemble::gaussian, 6, 8, 2, NoiseModel::gaussian(0.1), 77);
    const Vector Ax = inst.A * inst.truth.dense();
    const Vector recomputed = Ax + inst.noise;
    CHECK((inst.y - recomputed).norm() == 0.0);
  }
  SUBCASE("dimension mismatch rejected") {
    const Matrix A = gen_gaussian_matrix(6, 8, 2);
    SparseSignal x;
    x.n = 7;
    x.support = {0};
    x.values = Vector::Ones(1);
    CHECK_THROWS_AS(assemble_instance(A, x, Vector::Zero(6)), std::invalid_argument);
  }
}

TEST_CASE("noise model never changes the matrix or signal") {
  const ProblemInstance a =
      make_instance(Ensemble::gaussian, 8, 16, 3, NoiseModel::noiseless(), 123);
  const ProblemInstance b =
      make_instance(Ensemble::gaussian, 8, 16, 3, NoiseModel::gaussian(0.5), 123);
  CHECK(a.A == b.A);
  CHECK(a.truth.support == b.truth.support);
  CHECK(a.truth.values == b.truth.values);
  CHECK(a.noise != b.noise);
}

TEST_CASE("student t sampler has heavier tails than gaussian at matched scale") {
  Rng rng(99);
  int extreme_t = 0, extreme_g = 0;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    if (std::abs(rng.student_t(3.0)) > 4.0) ++extreme_t;
    if (std::abs(rng.normal()) > 4.0) ++extreme_g;
  }
  CHECK(extreme_t > extreme_g);
  CHECK(extreme_t > draws / 1000);  // t_3 exceeds 4 with probability ~1.4%
}
