#include "kelm/variance.hpp"

#include <limits>

#include "kelm/error.hpp"
#include "kelm/random.hpp"

namespace kelm {

namespace {

constexpr int kRestarts = 5;
constexpr int kMaxIterations = 100;

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

std::size_t nearest(const Matrix& centroids, std::span<const double> sample) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.rows(); ++c) {
    const double d = squared_distance(centroids.row(c), sample);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

std::vector<std::size_t> cluster_counts(const std::vector<std::size_t>& labels, std::size_t k) {
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t l : labels) ++counts[l];
  return counts;
}

void repair_empty(const Matrix& x, const Matrix& centroids, std::vector<std::size_t>& labels,
                  std::size_t k) {
  auto counts = cluster_counts(labels, k);
  for (std::size_t empty = 0; empty < k; ++empty) {
    if (counts[empty] != 0) continue;
    std::size_t donor = labels.size();
    double far = -1.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (counts[labels[i]] < 2) continue;
      const double d = squared_distance(x.row(i), centroids.row(labels[i]));
      if (d > far) {
        far = d;
        donor = i;
      }
    }
    // k <= n guarantees some cluster has a spare member
    --counts[labels[donor]];
    labels[donor] = empty;
    counts[empty] = 1;
  }
}

Matrix centroid_means(const Matrix& x, const std::vector<std::size_t>& labels, std::size_t k) {
  Matrix centroids(k, x.cols());
  const auto counts = cluster_counts(labels, k);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto c = centroids.row(labels[i]);
    const auto s = x.row(i);
    for (std::size_t j = 0; j < x.cols(); ++j) c[j] += s[j];
  }
  for (std::size_t c = 0; c < k; ++c) {
    for (double& v : centroids.row(c)) v /= static_cast<double>(counts[c]);
  }
  return centroids;
}

double objective(const Matrix& x, const Matrix& centroids, const std::vector<std::size_t>& labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    total += squared_distance(x.row(i), centroids.row(labels[i]));
  }
  return total;
}

ClusterAssignment lloyd(const Matrix& x, std::size_t k, Rng& rng) {
  const std::size_t n = x.rows();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  // partial Fisher-Yates: the first k entries are a uniform k-subset
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(order[i], order[i + rng.index(n - i)]);
  }
  order.resize(k);

  ClusterAssignment result;
  result.centroids = x.select_rows(order);
  std::vector<std::size_t> labels(n, k);

  for (int iter = 0; iter < kMaxIterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t l = nearest(result.centroids, x.row(i));
      if (l != labels[i]) {
        labels[i] = l;
        changed = true;
      }
    }
    if (!changed) break;
    repair_empty(x, result.centroids, labels, k);
    result.centroids = centroid_means(x, labels, k);
    result.objective_trace.push_back(objective(x, result.centroids, labels));
  }

  result.labels = std::move(labels);
  result.counts = cluster_counts(result.labels, k);
  result.objective = objective(x, result.centroids, result.labels);
  return result;
}

}  // namespace

std::string to_string(LaplacianKind::Mode mode) {
  switch (mode) {
    case LaplacianKind::Mode::None:
      return "none";
    case LaplacianKind::Mode::ClassVariance:
      return "class";
    case LaplacianKind::Mode::IntraClass:
      return "intra";
  }
  return "none";
}

LaplacianKind::Mode parse_laplacian_mode(const std::string& text) {
  if (text == "none") return LaplacianKind::Mode::None;
  if (text == "class") return LaplacianKind::Mode::ClassVariance;
  if (text == "intra") return LaplacianKind::Mode::IntraClass;
  throw ConfigError("unknown Laplacian kind '" + text + "' (expected none, class or intra)");
}

Matrix class_variance_laplacian(std::size_t n) {
  if (n == 0) throw ConfigError("class_variance_laplacian: n must be positive");
  const double inv = 1.0 / static_cast<double>(n);
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double centred = (i == j ? 1.0 : 0.0) - inv;
      m(i, j) = centred / static_cast<double>(n);
    }
  }
  return m;
}

ClusterAssignment kmeans(const Matrix& x, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw ConfigError("kmeans: k must be positive");
  if (k > x.rows()) {
    throw ConfigError("kmeans: k = " + std::to_string(k) + " exceeds sample count " +
                      std::to_string(x.rows()));
  }
  ClusterAssignment best;
  bool have_best = false;
  for (int restart = 0; restart < kRestarts; ++restart) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(restart)));
    ClusterAssignment candidate = lloyd(x, k, rng);
    if (!have_best || candidate.objective < best.objective) {
      best = std::move(candidate);
      have_best = true;
    }
  }
  return best;
}

Matrix intra_class_laplacian(const ClusterAssignment& assignment, std::size_t n) {
  if (assignment.labels.size() != n) {
    throw DimensionError("intra_class_laplacian: assignment covers " +
                         std::to_string(assignment.labels.size()) + " samples, expected " +
                         std::to_string(n));
  }
  const double dn = static_cast<double>(n);
  std::vector<double> w(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = static_cast<double>(assignment.counts.at(assignment.labels[i])) / dn;
    total += w[i];
  }
  // (C diag(w) C)_ij = w_i [i==j] - (w_i + w_j - sum(w)/n) / n, formed as
  // n * (entry / n) so that k = 1 is exactly n times class_variance_laplacian
  const double mean_w = total / dn;
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double diag = i == j ? w[i] : 0.0;
      const double entry = diag - (w[i] + w[j] - mean_w) / dn;
      m(i, j) = dn * (entry / dn);
    }
  }
  return m;
}

Matrix build_laplacian(const LaplacianKind& kind, const Matrix& x, std::uint64_t seed) {
  switch (kind.mode) {
    case LaplacianKind::Mode::None:
      return Matrix(x.rows(), x.rows());
    case LaplacianKind::Mode::ClassVariance:
      return class_variance_laplacian(x.rows());
    case LaplacianKind::Mode::IntraClass:
      return intra_class_laplacian(kmeans(x, kind.k, seed), x.rows());
  }
  return Matrix(x.rows(), x.rows());
}

}  // namespace kelm
