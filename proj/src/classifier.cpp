#include "kelm/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "kelm/error.hpp"

namespace kelm {

std::string to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::Ockelm:
      return "ockelm";
    case ClassifierKind::Aakelm:
      return "aakelm";
    case ClassifierKind::Vockelm:
      return "vockelm";
    case ClassifierKind::Vaakelm:
      return "vaakelm";
  }
  return "unknown";
}

ClassifierKind parse_classifier(const std::string& text) {
  for (ClassifierKind kind : kAllClassifiers) {
    if (to_string(kind) == text) return kind;
  }
  throw ConfigError("unknown classifier '" + text +
                    "' (expected ockelm, aakelm, vockelm or vaakelm)");
}

bool is_reconstruction(ClassifierKind kind) {
  return kind == ClassifierKind::Aakelm || kind == ClassifierKind::Vaakelm;
}

bool embeds_variance(ClassifierKind kind) {
  return kind == ClassifierKind::Vockelm || kind == ClassifierKind::Vaakelm;
}

void HyperParams::validate(ClassifierKind kind) const {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw ConfigError("C must be positive, got " + std::to_string(c));
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("lambda must be positive, got " + std::to_string(lambda));
  }
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw ConfigError("delta must lie in (0, 1], got " + std::to_string(delta));
  }
  if (!std::isfinite(target_value)) throw ConfigError("target value must be finite");
  if (!embeds_variance(kind) && laplacian.mode != LaplacianKind::Mode::None) {
    throw ConfigError(to_string(kind) + " has no variance term; Laplacian must be none");
  }
  if (laplacian.mode == LaplacianKind::Mode::IntraClass && laplacian.k == 0) {
    throw ConfigError("intra-class Laplacian needs k >= 1");
  }
}

Matrix regression_targets(ClassifierKind kind, const Matrix& x, double target_value) {
  if (is_reconstruction(kind)) return x;
  return Matrix(x.rows(), 1, target_value);
}

Matrix system_matrix(const Matrix& gram, const Matrix* laplacian_times_gram, double c,
                     double lambda) {
  Matrix a = gram;
  if (laplacian_times_gram != nullptr) {
    if (laplacian_times_gram->rows() != gram.rows() ||
        laplacian_times_gram->cols() != gram.cols()) {
      throw DimensionError("system_matrix: MΩ shape differs from Ω");
    }
    const auto m = laplacian_times_gram->values();
    auto out = a.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += m[i] / c;
  }
  const double ridge = lambda / c;
  for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) += ridge;
  return a;
}

std::vector<double> deviation_scores(ClassifierKind kind, const Matrix& outputs, const Matrix& x,
                                     double target_value) {
  std::vector<double> s(outputs.rows());
  switch (kind) {
    case ClassifierKind::Ockelm:
      for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::abs(outputs(i, 0) - target_value);
      break;
    case ClassifierKind::Vockelm:
      for (std::size_t i = 0; i < s.size(); ++i) {
        const double d = outputs(i, 0) - target_value;
        s[i] = d * d;
      }
      break;
    case ClassifierKind::Aakelm:
    case ClassifierKind::Vaakelm:
      if (x.rows() != outputs.rows() || x.cols() != outputs.cols()) {
        throw DimensionError("deviation_scores: reconstruction shape differs from input");
      }
      for (std::size_t i = 0; i < s.size(); ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < x.cols(); ++j) {
          const double d = outputs(i, j) - x(i, j);
          sum += d * d;
        }
        s[i] = sum;
      }
      break;
  }
  return s;
}

double percentile_threshold(std::span<const double> losses, double delta) {
  if (losses.empty()) throw DataError("percentile_threshold: no losses");
  std::vector<double> sorted(losses.begin(), losses.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const auto n = static_cast<double>(sorted.size());
  auto index = static_cast<std::size_t>(std::floor(delta * n));
  // floor(delta N) = 0 is clamped to the first (largest) loss
  index = std::clamp<std::size_t>(index, 1, sorted.size());
  return sorted[index - 1];
}

double fit_threshold(ClassifierKind kind, std::span<const double> scores, const Matrix& outputs,
                     double delta) {
  if (kind != ClassifierKind::Vockelm) return percentile_threshold(scores, delta);
  double mean = 0.0;
  for (std::size_t i = 0; i < outputs.rows(); ++i) mean += outputs(i, 0);
  mean /= static_cast<double>(outputs.rows());
  return delta * mean;
}

TrainedModel fit(ClassifierKind kind, const Matrix& x, const HyperParams& hyper,
                 const KernelSpec& kernel, std::uint64_t seed, std::optional<NormStats> norm) {
  hyper.validate(kind);
  kernel.validate();
  if (x.rows() < 2) {
    throw DataError(to_string(kind) + " fit: need at least 2 training samples, got " +
                    std::to_string(x.rows()));
  }
  require_finite(x, to_string(kind) + " training data");
  if (norm && norm->dims() != x.cols()) {
    throw DimensionError("fit: normalization statistics do not match feature count");
  }

  TrainedModel model;
  model.kind = kind;
  model.train_x = x;
  model.kernel = kernel;
  model.norm = norm ? *norm : NormStats::identity(x.cols());
  model.hyper = hyper;

  const Matrix omega = gram(x, kernel);
  std::optional<Matrix> m_omega;
  if (embeds_variance(kind) && hyper.laplacian.mode != LaplacianKind::Mode::None) {
    m_omega = matmul(build_laplacian(hyper.laplacian, x, seed), omega);
  }
  const Matrix a = system_matrix(omega, m_omega ? &*m_omega : nullptr, hyper.c,
                                 embeds_variance(kind) ? hyper.lambda : 1.0);
  try {
    model.beta = solve_linear(a, regression_targets(kind, x, hyper.target_value));
  } catch (const SingularMatrixError& e) {
    throw SingularMatrixError(to_string(kind) + " fit: " + e.what(), e.column());
  }

  const Matrix outputs = matmul(omega, model.beta);
  const auto scores = deviation_scores(kind, outputs, x, hyper.target_value);
  model.theta = fit_threshold(kind, scores, outputs, hyper.delta);
  return model;
}

TrainedModel train(ClassifierKind kind, const Matrix& raw_targets, const HyperParams& hyper,
                   std::uint64_t seed) {
  NormStats norm = zscore_fit(raw_targets);
  Matrix x = zscore_apply(raw_targets, norm);
  const KernelSpec kernel{KernelKind::Rbf, estimate_sigma(x)};
  return fit(kind, x, hyper, kernel, seed, std::move(norm));
}

Matrix network_outputs(const TrainedModel& model, const Matrix& normalized_query) {
  return matmul(cross_gram(model.train_x, normalized_query, model.kernel), model.beta);
}

std::vector<Prediction> predict(const TrainedModel& model, const Matrix& query_raw) {
  if (query_raw.cols() != model.feature_count()) {
    throw DimensionError("predict: model expects " + std::to_string(model.feature_count()) +
                         " features, query has " + std::to_string(query_raw.cols()));
  }
  const Matrix q = zscore_apply(query_raw, model.norm);
  const auto scores =
      deviation_scores(model.kind, network_outputs(model, q), q, model.hyper.target_value);
  std::vector<Prediction> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = {scores[i], decide(scores[i], model.theta)};
  }
  return out;
}

std::vector<double> training_scores(const TrainedModel& model) {
  const Matrix outputs = matmul(gram(model.train_x, model.kernel), model.beta);
  return deviation_scores(model.kind, outputs, model.train_x, model.hyper.target_value);
}

std::size_t training_rejection_count(const TrainedModel& model) {
  if (model.kind == ClassifierKind::Vockelm) {
    throw ConfigError("training_rejection_count: VOCKELM has no percentile threshold");
  }
  const auto scores = training_scores(model);
  return static_cast<std::size_t>(std::count_if(
      scores.begin(), scores.end(), [&](double s) { return s > model.theta; }));
}

}  // namespace kelm
