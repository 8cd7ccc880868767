#include <doctest.h>

#include <cmath>
#include <numeric>

#include "../oracles.hpp"
#include "kelm/error.hpp"
#include "kelm/kernel.hpp"

using kelm::KernelSpec;
using kelm::Matrix;

TEST_CASE("rbf of identical points is one") {
  const std::vector<double> x{1.5, -2.0, 3.0};
  CHECK(kelm::rbf(x, x, 0.7) == 1.0);
}

TEST_CASE("rbf at squared distance 2 sigma^2 is 1/e") {
  const double sigma = 1.3;
  const std::vector<double> x{0.0, 0.0};
  const std::vector<double> y{sigma, sigma};
  CHECK(kelm::rbf(x, y, sigma) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(kelm::rbf(x, y, sigma) == doctest::Approx(0.367879).epsilon(1e-6));
}

TEST_CASE("rbf is symmetric") {
  kelm::Rng rng(21);
  for (int t = 0; t < 50; ++t) {
    const Matrix p = oracle::random_matrix(rng, 2, 4);
    CHECK(kelm::rbf(p.row(0), p.row(1), 0.9) == kelm::rbf(p.row(1), p.row(0), 0.9));
  }
}

TEST_CASE("rbf argument errors") {
  const std::vector<double> a{1, 2}, b{1};
  CHECK_THROWS_AS(kelm::rbf(a, b, 1.0), kelm::DimensionError);
  CHECK_THROWS_AS(kelm::rbf(a, a, 0.0), kelm::ConfigError);
  CHECK_THROWS_AS(kelm::rbf(a, a, -1.0), kelm::ConfigError);
}

TEST_CASE("estimate_sigma examples") {
  CHECK(kelm::estimate_sigma(Matrix{{0, 0}, {3, 0}}) == doctest::Approx(3.0));
  CHECK(kelm::estimate_sigma(Matrix{{0}, {1}, {2}}) == doctest::Approx(4.0 / 3.0));
  kelm::Rng rng(22);
  const Matrix x = oracle::random_matrix(rng, 10, 3);
  CHECK(kelm::estimate_sigma(x) ==
        doctest::Approx(oracle::pair_mean_distance(oracle::to_rows(x))).epsilon(1e-13));
}

TEST_CASE("estimate_sigma errors") {
  CHECK_THROWS_AS(kelm::estimate_sigma(Matrix{{1, 2}}), kelm::DataError);
  CHECK_THROWS_AS(kelm::estimate_sigma(Matrix{{1, 2}, {1, 2}, {1, 2}}), kelm::DataError);
}

TEST_CASE("estimate_sigma is permutation and translation invariant") {
  kelm::Rng rng(23);
  const Matrix x = oracle::random_matrix(rng, 12, 3);
  std::vector<std::size_t> perm(12);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  Matrix moved = x;
  for (std::size_t i = 0; i < moved.rows(); ++i) moved(i, 1) += 7.5;
  const double s = kelm::estimate_sigma(x);
  CHECK(kelm::estimate_sigma(x.select_rows(perm)) == doctest::Approx(s).epsilon(1e-13));
  CHECK(kelm::estimate_sigma(moved) == doctest::Approx(s).epsilon(1e-12));
}

TEST_CASE("gram of identical rows is all ones") {
  const Matrix x(4, 2, 3.0);
  const Matrix g = kelm::gram(x, KernelSpec{kelm::KernelKind::Rbf, 1.0});
  CHECK(g == Matrix(4, 4, 1.0));
}

TEST_CASE("gram is symmetric with unit diagonal and PSD") {
  kelm::Rng rng(24);
  const Matrix x = oracle::random_matrix(rng, 15, 3);
  const Matrix g = kelm::gram(x, {kelm::KernelKind::Rbf, 1.1});
  for (std::size_t i = 0; i < 15; ++i) {
    CHECK(g(i, i) == 1.0);
    for (std::size_t j = 0; j < 15; ++j) CHECK(std::abs(g(i, j) - g(j, i)) <= 1e-12);
  }
  for (int t = 0; t < 20; ++t) {
    const Matrix v = oracle::random_matrix(rng, 15, 1);
    const Matrix q = kelm::matmul(kelm::transpose(v), kelm::matmul(g, v));
    CHECK(q(0, 0) >= -1e-10);
  }
}

TEST_CASE("gram matches the double-loop oracle") {
  kelm::Rng rng(25);
  const Matrix x = oracle::random_matrix(rng, 6, 2);
  const auto rows = oracle::to_rows(x);
  CHECK(oracle::max_diff(kelm::gram(x, {kelm::KernelKind::Rbf, 0.8}),
                         oracle::kernel_matrix(rows, rows, 0.8)) <= 1e-12);
}

TEST_CASE("cross_gram consistency and oracle") {
  kelm::Rng rng(26);
  const Matrix train = oracle::random_matrix(rng, 7, 3);
  const KernelSpec spec{kelm::KernelKind::Rbf, 1.4};
  CHECK(kelm::cross_gram(train, train, spec) == kelm::gram(train, spec));

  const std::vector<std::size_t> pick{4};
  const Matrix one = kelm::cross_gram(train, train.select_rows(pick), spec);
  const Matrix g = kelm::gram(train, spec);
  for (std::size_t i = 0; i < 7; ++i) CHECK(one(0, i) == g(i, 4));

  const Matrix query = oracle::random_matrix(rng, 5, 3);
  const Matrix k = kelm::cross_gram(train, query, spec);
  CHECK(k.rows() == 5);
  CHECK(k.cols() == 7);
  CHECK(oracle::max_diff(k, oracle::kernel_matrix(oracle::to_rows(query), oracle::to_rows(train),
                                                  1.4)) <= 1e-12);
  CHECK_THROWS_AS(kelm::cross_gram(train, Matrix(2, 2), spec), kelm::DimensionError);
}
