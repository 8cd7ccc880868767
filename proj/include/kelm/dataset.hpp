#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kelm/matrix.hpp"

namespace kelm {

enum class Label : int { Target = 1, Outlier = -1 };

struct LabeledDataset {
  Matrix x;  // N×d raw features
  std::vector<Label> labels;
  std::vector<std::string> feature_names;
  std::string name;

  std::size_t target_count() const;
  std::vector<std::size_t> indices_of(Label label) const;
};

struct CsvOptions {
  /// Column name (matched against the header) or zero-based index; negative
  /// indices count from the end. Unset: every column is a feature and every
  /// row is a target.
  std::optional<std::string> label_column;
  std::string target_label;
  bool has_header = true;
};

/// Parses comma-separated samples. Errors name 1-based file line and column.
LabeledDataset parse_csv(std::istream& in, const CsvOptions& options, std::string name);
LabeledDataset load_csv(const std::filesystem::path& path, const CsvOptions& options);

/// Writes features followed by a `label` column of `target_label`/`outlier_label`.
void write_csv(std::ostream& out, const LabeledDataset& ds, const std::string& target_label,
               const std::string& outlier_label);

/// Per-feature z-score parameters.
struct NormStats {
  std::vector<double> mean;
  std::vector<double> stddev;  // > 0

  static NormStats identity(std::size_t dims);
  std::size_t dims() const { return mean.size(); }
  bool operator==(const NormStats&) const = default;
};

/// Mean and population standard deviation per column; a constant column gets std 1.
NormStats zscore_fit(const Matrix& x);
Matrix zscore_apply(const Matrix& x, const NormStats& stats);

struct SplitPlan {
  std::vector<std::size_t> cv_pool;  // ~80%, ascending
  std::vector<std::size_t> test;     // ~20%, ascending
  std::uint64_t seed = 0;

  bool operator==(const SplitPlan&) const = default;
};

/// Stratified 80/20 split; each class sends floor(0.2 n_class) shuffled samples to test.
SplitPlan split_80_20(const LabeledDataset& ds, std::uint64_t seed);

struct Fold {
  std::vector<std::size_t> train_targets;
  std::vector<std::size_t> validation;  // targets of this fold, then outliers

  bool operator==(const Fold&) const = default;
};

struct FoldPlan {
  std::vector<Fold> folds;

  bool operator==(const FoldPlan&) const = default;
};

inline constexpr std::size_t kFoldCount = 5;

/// Five-fold plan over `pool`. Targets and outliers are shuffled and cut into
/// five near-equal parts independently; fold f validates on part f of both
/// and trains on the other four target parts.
FoldPlan make_folds(const LabeledDataset& ds, std::span<const std::size_t> pool,
                    std::uint64_t seed);

}  // namespace kelm
