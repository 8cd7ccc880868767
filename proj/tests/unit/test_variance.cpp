#include <doctest.h>

#include "../oracles.hpp"
#include "kelm/error.hpp"
#include "kelm/variance.hpp"

using kelm::Matrix;

namespace {

void check_laplacian_properties(const Matrix& m, kelm::Rng& rng) {
  const std::size_t n = m.rows();
  for (std::size_t i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      CHECK(m(i, j) == m(j, i));
      row_sum += m(i, j);
    }
    CHECK(std::abs(row_sum) <= 1e-12);
  }
  for (int t = 0; t < 10; ++t) {
    const Matrix v = oracle::random_matrix(rng, n, 1);
    CHECK(kelm::matmul(kelm::transpose(v), kelm::matmul(m, v))(0, 0) >= -1e-10);
  }
}

kelm::ClusterAssignment assignment_from(std::vector<std::size_t> labels, std::size_t k) {
  kelm::ClusterAssignment a;
  a.counts.assign(k, 0);
  for (std::size_t l : labels) ++a.counts[l];
  a.labels = std::move(labels);
  return a;
}

}  // namespace

TEST_CASE("class_variance_laplacian examples") {
  CHECK(kelm::class_variance_laplacian(1) == Matrix{{0.0}});
  CHECK(kelm::class_variance_laplacian(2) == Matrix{{0.25, -0.25}, {-0.25, 0.25}});
  CHECK_THROWS_AS(kelm::class_variance_laplacian(0), kelm::ConfigError);
  for (std::size_t n = 1; n <= 12; ++n) {
    const Matrix m = kelm::class_variance_laplacian(n);
    CHECK(oracle::max_diff(m, oracle::class_variance(n)) <= 1e-15);
    const Matrix ones(n, 1, 1.0);
    CHECK(kelm::max_abs(kelm::matmul(m, ones)) <= 1e-15);
  }
}

TEST_CASE("class_variance_laplacian is symmetric PSD") {
  kelm::Rng rng(31);
  for (std::size_t n : {2, 5, 9, 20}) check_laplacian_properties(kelm::class_variance_laplacian(n), rng);
}

TEST_CASE("kmeans with k = 1 gives the column means") {
  kelm::Rng rng(32);
  const Matrix x = oracle::random_matrix(rng, 9, 3);
  const auto a = kelm::kmeans(x, 1, 0);
  CHECK(a.counts == std::vector<std::size_t>{9});
  for (std::size_t j = 0; j < 3; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < 9; ++i) mean += x(i, j) / 9.0;
    CHECK(a.centroids(0, j) == doctest::Approx(mean).epsilon(1e-13));
  }
}

TEST_CASE("kmeans with k = N puts every sample in its own cluster") {
  kelm::Rng rng(33);
  const Matrix x = oracle::random_matrix(rng, 6, 2);
  const auto a = kelm::kmeans(x, 6, 4);
  for (std::size_t c : a.counts) CHECK(c == 1);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(a.centroids(a.labels[i], j) == x(i, j));
  CHECK(a.objective == 0.0);
}

TEST_CASE("kmeans separates two blobs like the brute-force optimum") {
  kelm::Rng rng(34);
  Matrix x(10, 2);
  for (std::size_t i = 0; i < 10; ++i) {
    const double base = i < 5 ? 0.0 : 10.0;
    x(i, 0) = base + 0.3 * rng.normal();
    x(i, 1) = base + 0.3 * rng.normal();
  }
  const auto best = oracle::best_two_partition(oracle::to_rows(x));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto a = kelm::kmeans(x, 2, seed);
    CHECK(oracle::same_partition(a.labels, best));
    CHECK(a.labels[0] != a.labels[9]);
  }
}

TEST_CASE("kmeans objective never increases and no cluster is empty") {
  kelm::Rng rng(35);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix x = oracle::random_matrix(rng, 40, 3);
    const auto a = kelm::kmeans(x, 6, seed);
    for (std::size_t t = 1; t < a.objective_trace.size(); ++t)
      CHECK(a.objective_trace[t] <= a.objective_trace[t - 1] + 1e-12);
    std::size_t total = 0;
    for (std::size_t c : a.counts) {
      CHECK(c > 0);
      total += c;
    }
    CHECK(total == 40);
  }
}

TEST_CASE("kmeans is deterministic under its seed") {
  kelm::Rng rng(36);
  const Matrix x = oracle::random_matrix(rng, 30, 2);
  const auto a = kelm::kmeans(x, 4, 9);
  const auto b = kelm::kmeans(x, 4, 9);
  CHECK(a.labels == b.labels);
  CHECK(a.centroids == b.centroids);
}

TEST_CASE("kmeans handles duplicate rows without empty clusters") {
  Matrix x(8, 1, 2.0);
  x(7, 0) = 5.0;
  const auto a = kelm::kmeans(x, 3, 1);
  for (std::size_t c : a.counts) CHECK(c > 0);
}

TEST_CASE("kmeans argument errors") {
  const Matrix x(4, 2, 1.0);
  CHECK_THROWS_AS(kelm::kmeans(x, 0, 0), kelm::ConfigError);
  CHECK_THROWS_AS(kelm::kmeans(x, 5, 0), kelm::ConfigError);
}

TEST_CASE("intra_class_laplacian with one cluster is n times the class variance") {
  for (std::size_t n = 1; n <= 30; ++n) {
    const auto a = assignment_from(std::vector<std::size_t>(n, 0), 1);
    const Matrix ms = kelm::intra_class_laplacian(a, n);
    const Matrix mc = kelm::scale(kelm::class_variance_laplacian(n), static_cast<double>(n));
    CHECK(ms == mc);
  }
}

TEST_CASE("intra_class_laplacian two singletons") {
  const auto a = assignment_from({0, 1}, 2);
  CHECK(kelm::intra_class_laplacian(a, 2) == Matrix{{0.25, -0.25}, {-0.25, 0.25}});
}

TEST_CASE("intra_class_laplacian quadratic form matches the direct scatter sum") {
  kelm::Rng rng(37);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 6;
    std::vector<std::size_t> labels(n);
    for (auto& l : labels) l = rng.index(3);
    std::vector<std::size_t> used(3, 0);
    for (auto l : labels) used[l] = 1;
    if (used[0] + used[1] + used[2] < 3) continue;
    const auto a = assignment_from(labels, 3);
    const Matrix h = oracle::random_matrix(rng, n, 4);
    const Matrix q = kelm::matmul(kelm::transpose(h), kelm::matmul(kelm::intra_class_laplacian(a, n), h));
    CHECK(oracle::max_diff(q, oracle::intra_class_scatter(oracle::to_rows(h), labels, 3)) <= 1e-10);
  }
}

TEST_CASE("intra_class_laplacian is symmetric PSD and annihilates constants") {
  kelm::Rng rng(38);
  for (std::size_t k : {1, 2, 4}) {
    const Matrix x = oracle::random_matrix(rng, 16, 2);
    check_laplacian_properties(kelm::intra_class_laplacian(kelm::kmeans(x, k, 3), 16), rng);
  }
}

TEST_CASE("build_laplacian dispatch and labels") {
  kelm::Rng rng(39);
  const Matrix x = oracle::random_matrix(rng, 5, 2);
  CHECK(kelm::build_laplacian(kelm::LaplacianKind::none(), x, 0) == Matrix(5, 5, 0.0));
  CHECK(kelm::build_laplacian(kelm::LaplacianKind::class_variance(), x, 0) ==
        kelm::class_variance_laplacian(5));
  CHECK_THROWS_AS(kelm::build_laplacian(kelm::LaplacianKind::intra_class(6), x, 0), kelm::ConfigError);
  using Mode = kelm::LaplacianKind::Mode;
  for (Mode m : {Mode::None, Mode::ClassVariance, Mode::IntraClass})
    CHECK(kelm::parse_laplacian_mode(kelm::to_string(m)) == m);
  CHECK_THROWS_AS(kelm::parse_laplacian_mode("bogus"), kelm::ConfigError);
}
