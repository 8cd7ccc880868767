#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kelm/classifier.hpp"
#include "kelm/dataset.hpp"

namespace kelm {

struct GridSpec {
  std::vector<double> c_values;
  std::vector<double> delta_values;
  std::vector<std::size_t> k_values;
  double lambda = 1.0;
  double target_value = 1.0;
  /// Laplacian modes swept for variance-embedding classifiers.
  std::vector<LaplacianKind::Mode> laplacians = {LaplacianKind::Mode::ClassVariance,
                                                 LaplacianKind::Mode::IntraClass};

  /// C in {2^-5..2^5}, delta in {1%, 5%, 10%}, k in {1..10}, lambda 1.
  static GridSpec defaults();

  void validate() const;

  /// Every grid point for `kind`, in trace order: Laplacian (and k), then C, then delta.
  std::vector<HyperParams> points(ClassifierKind kind) const;
};

struct GridPoint {
  HyperParams hyper;
  std::vector<double> fold_f1;
  double cv_f1 = 0.0;  // mean validation F1 over the folds
  std::string error;   // non-empty when some fold failed

  bool ok() const { return error.empty(); }
};

struct GridResult {
  HyperParams best;
  double best_cv_f1 = 0.0;
  std::vector<GridPoint> trace;
  FoldPlan folds;
};

/// Strict ordering used for selection: higher CV F1 wins; ties go to smaller
/// C, then smaller delta, then fewer clusters (None and class count as 0).
bool preferred(const GridPoint& a, const GridPoint& b);

/// Best successful point, optionally restricted to one delta. nullptr if none.
const GridPoint* select_best(std::span<const GridPoint> trace,
                             std::optional<double> delta = std::nullopt);

/// Five-fold CV over `pool`: each fold fits on its target training samples
/// (normalized with their own statistics) and scores F1 on its validation
/// samples. `seed` drives the fold plan; `model_seed` the k-means restarts.
GridResult grid_search(const LabeledDataset& ds, std::span<const std::size_t> pool,
                       ClassifierKind kind, const GridSpec& grid, std::uint64_t seed,
                       std::uint64_t model_seed);

/// Uses every sample of ds as the CV pool, with model_seed = seed.
GridResult grid_search(const LabeledDataset& ds, ClassifierKind kind, const GridSpec& grid,
                       std::uint64_t seed);

}  // namespace kelm
