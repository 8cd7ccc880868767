#pragma once

#include <span>

#include "kelm/matrix.hpp"

namespace kelm {

enum class KernelKind { Rbf };

struct KernelSpec {
  KernelKind kind = KernelKind::Rbf;
  double sigma = 1.0;

  /// Throws ConfigError unless sigma is positive and finite.
  void validate() const;
};

/// exp(-||x - y||^2 / (2 sigma^2)).
double rbf(std::span<const double> x, std::span<const double> y, double sigma);

/// Mean Euclidean distance over all unordered pairs of distinct rows.
double estimate_sigma(const Matrix& x);

/// N×N kernel matrix of the rows of x.
Matrix gram(const Matrix& x, const KernelSpec& spec);

/// T×N matrix whose (t, i) entry is K(query_t, train_i).
Matrix cross_gram(const Matrix& train, const Matrix& query, const KernelSpec& spec);

}  // namespace kelm
