#include "kelm/kernel.hpp"

#include <cmath>
#include <string>

#include "kelm/error.hpp"

namespace kelm {

namespace {

double squared_distance(std::span<const double> x, std::span<const double> y) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = x[i] - y[i];
    sum += diff * diff;
  }
  return sum;
}

// Shared by gram and cross_gram so identical rows give identical bits.
double rbf_unchecked(std::span<const double> x, std::span<const double> y, double sigma) {
  return std::exp(-squared_distance(x, y) / (2.0 * sigma * sigma));
}

}  // namespace

void KernelSpec::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("kernel sigma must be positive and finite, got " + std::to_string(sigma));
  }
}

double rbf(std::span<const double> x, std::span<const double> y, double sigma) {
  if (x.size() != y.size()) {
    throw DimensionError("rbf: vectors of length " + std::to_string(x.size()) + " and " +
                         std::to_string(y.size()));
  }
  KernelSpec{KernelKind::Rbf, sigma}.validate();
  return rbf_unchecked(x, y, sigma);
}

double estimate_sigma(const Matrix& x) {
  const std::size_t n = x.rows();
  if (n < 2) {
    throw DataError("estimate_sigma: need at least 2 samples, got " + std::to_string(n));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      total += std::sqrt(squared_distance(x.row(i), x.row(j)));
    }
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  const double sigma = total / pairs;
  if (!(sigma > 0.0)) {
    throw DataError("estimate_sigma: all samples are identical, sigma would be 0");
  }
  return sigma;
}

Matrix gram(const Matrix& x, const KernelSpec& spec) {
  spec.validate();
  const std::size_t n = x.rows();
  Matrix omega(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    omega(i, i) = rbf_unchecked(x.row(i), x.row(i), spec.sigma);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = rbf_unchecked(x.row(i), x.row(j), spec.sigma);
      omega(i, j) = v;
      omega(j, i) = v;
    }
  }
  return omega;
}

Matrix cross_gram(const Matrix& train, const Matrix& query, const KernelSpec& spec) {
  spec.validate();
  if (train.cols() != query.cols()) {
    throw DimensionError("cross_gram: training data has " + std::to_string(train.cols()) +
                         " features, query has " + std::to_string(query.cols()));
  }
  Matrix k(query.rows(), train.rows());
  for (std::size_t t = 0; t < query.rows(); ++t) {
    for (std::size_t i = 0; i < train.rows(); ++i) {
      k(t, i) = rbf_unchecked(query.row(t), train.row(i), spec.sigma);
    }
  }
  return k;
}

}  // namespace kelm
