#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kelm/dataset.hpp"
#include "kelm/kernel.hpp"
#include "kelm/matrix.hpp"
#include "kelm/variance.hpp"

namespace kelm {

enum class ClassifierKind { Ockelm, Aakelm, Vockelm, Vaakelm };

inline constexpr std::array<ClassifierKind, 4> kAllClassifiers = {
    ClassifierKind::Ockelm, ClassifierKind::Aakelm, ClassifierKind::Vockelm,
    ClassifierKind::Vaakelm};

/// Lower-case name: "ockelm", "aakelm", "vockelm", "vaakelm".
std::string to_string(ClassifierKind kind);
ClassifierKind parse_classifier(const std::string& text);

/// AAKELM and VAAKELM reconstruct their input; the other two regress onto r.
bool is_reconstruction(ClassifierKind kind);
/// VOCKELM and VAAKELM carry a Laplacian variance term.
bool embeds_variance(ClassifierKind kind);

struct HyperParams {
  double c = 1.0;
  double lambda = 1.0;
  double delta = 0.05;  // fraction of dismissal
  LaplacianKind laplacian = LaplacianKind::none();
  double target_value = 1.0;  // r

  /// Throws ConfigError on out-of-range values or a Laplacian on a kind without one.
  void validate(ClassifierKind kind) const;

  bool operator==(const HyperParams&) const = default;
};

struct TrainedModel {
  ClassifierKind kind = ClassifierKind::Vaakelm;
  Matrix train_x;  // normalized, N×d
  Matrix beta;     // N×d for reconstruction kinds, N×1 otherwise
  double theta = 0.0;
  KernelSpec kernel;
  NormStats norm;
  HyperParams hyper;

  std::size_t feature_count() const { return train_x.cols(); }
};

struct Prediction {
  double score = 0.0;
  Label label = Label::Target;
};

// Building blocks shared by fit, predict and the grid search.

/// N×d copy of x for reconstruction kinds, the N×1 column r·1 otherwise.
Matrix regression_targets(ClassifierKind kind, const Matrix& x, double target_value);

/// Ω + (MΩ)/C + (λ/C)I. Pass nullptr for MΩ when there is no variance term.
Matrix system_matrix(const Matrix& gram, const Matrix* laplacian_times_gram, double c,
                     double lambda);

/// Per-sample deviation of network outputs.
///
/// OCKELM |O - r|, VOCKELM (O - r)^2, reconstruction kinds sum_j (O_j - x_j)^2.
std::vector<double> deviation_scores(ClassifierKind kind, const Matrix& outputs, const Matrix& x,
                                     double target_value);

/// Sorts losses descending and returns the max(1, floor(delta N))-th (1-based).
double percentile_threshold(std::span<const double> losses, double delta);

/// θ from training scores; VOCKELM uses delta × mean network output instead.
double fit_threshold(ClassifierKind kind, std::span<const double> scores, const Matrix& outputs,
                     double delta);

/// A score at or below θ is a target.
inline Label decide(double score, double theta) {
  return score <= theta ? Label::Target : Label::Outlier;
}

/// Fits on already-normalized samples x. `norm` is stored for prediction and
/// defaults to the identity transform. `seed` drives the k-means restarts.
TrainedModel fit(ClassifierKind kind, const Matrix& x, const HyperParams& hyper,
                 const KernelSpec& kernel, std::uint64_t seed,
                 std::optional<NormStats> norm = std::nullopt);

/// z-scores raw target samples, estimates σ on the result, then fits.
TrainedModel train(ClassifierKind kind, const Matrix& raw_targets, const HyperParams& hyper,
                   std::uint64_t seed);

/// Network outputs for already-normalized queries.
Matrix network_outputs(const TrainedModel& model, const Matrix& normalized_query);

std::vector<Prediction> predict(const TrainedModel& model, const Matrix& query_raw);

/// Deviation scores of the training samples under the fitted model.
std::vector<double> training_scores(const TrainedModel& model);

/// Training samples scoring strictly above θ. Not defined for VOCKELM.
std::size_t training_rejection_count(const TrainedModel& model);

}  // namespace kelm
