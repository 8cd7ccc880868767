#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "kelm/matrix.hpp"

namespace kelm {

/// Which variance term a minimum-variance classifier embeds.
struct LaplacianKind {
  enum class Mode { None, ClassVariance, IntraClass };

  Mode mode = Mode::None;
  std::size_t k = 0;  // cluster count, IntraClass only

  static LaplacianKind none() { return {Mode::None, 0}; }
  static LaplacianKind class_variance() { return {Mode::ClassVariance, 0}; }
  static LaplacianKind intra_class(std::size_t k) { return {Mode::IntraClass, k}; }

  bool operator==(const LaplacianKind&) const = default;
};

/// "none", "class" or "intra".
std::string to_string(LaplacianKind::Mode mode);
LaplacianKind::Mode parse_laplacian_mode(const std::string& text);

struct ClusterAssignment {
  std::vector<std::size_t> labels;   // per sample, in [0, k)
  Matrix centroids;                  // k×d
  std::vector<std::size_t> counts;   // members per cluster
  double objective = 0.0;            // within-cluster sum of squares
  std::vector<double> objective_trace;  // objective after each Lloyd update, best restart
};

/// (1/n)(I - (1/n) 1 1^T).
Matrix class_variance_laplacian(std::size_t n);

/// Lloyd's k-means with seeded random-row initialisation.
///
/// Five restarts, the lowest objective wins (earliest restart on ties). Each
/// restart runs at most 100 iterations. Nearest-centroid ties go to the lower
/// cluster index. A cluster left empty takes the sample farthest from its own
/// centroid among clusters with more than one member.
ClusterAssignment kmeans(const Matrix& x, std::size_t k, std::uint64_t seed);

/// C diag(w) C with C = I - (1/n) 1 1^T and w_i = N_{p(i)} / n.
Matrix intra_class_laplacian(const ClusterAssignment& assignment, std::size_t n);

/// Laplacian for `kind` over the rows of x. None yields the n×n zero matrix.
Matrix build_laplacian(const LaplacianKind& kind, const Matrix& x, std::uint64_t seed);

}  // namespace kelm
