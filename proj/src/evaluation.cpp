#include "kelm/evaluation.hpp"

#include <cmath>
#include <string>

#include "kelm/error.hpp"

namespace kelm {

Confusion confusion(std::span<const Label> truth, std::span<const Label> predicted) {
  if (truth.size() != predicted.size()) {
    throw DimensionError("confusion: " + std::to_string(truth.size()) + " labels vs " +
                         std::to_string(predicted.size()) + " predictions");
  }
  Confusion c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool actual = truth[i] == Label::Target;
    const bool said = predicted[i] == Label::Target;
    if (actual && said) ++c.tp;
    else if (!actual && said) ++c.fp;
    else if (!actual) ++c.tn;
    else ++c.fn;
  }
  return c;
}

EvalReport metrics(const Confusion& c) {
  if (c.total() == 0) throw DataError("metrics: empty confusion table");
  const auto tp = static_cast<double>(c.tp);
  const auto fp = static_cast<double>(c.fp);
  const auto tn = static_cast<double>(c.tn);
  const auto fn = static_cast<double>(c.fn);

  EvalReport r;
  r.confusion = c;
  r.accuracy = (tp + tn) / static_cast<double>(c.total());
  r.precision = c.tp + c.fp == 0 ? 0.0 : tp / (tp + fp);
  r.recall = c.tp + c.fn == 0 ? 0.0 : tp / (tp + fn);
  if (c.tp == 0) {
    r.f1 = 0.0;
    r.gmean = 0.0;
  } else {
    // 2PR/(P+R) and sqrt(PR) with P and R expanded over the counts
    r.f1 = 2.0 * tp / (2.0 * tp + fp + fn);
    r.gmean = tp / std::sqrt((tp + fp) * (tp + fn));
  }
  return r;
}

double mean_f1(std::span<const double> f1_values) {
  if (f1_values.empty()) throw DataError("mean_f1: no values");
  double sum = 0.0;
  for (double v : f1_values) sum += v;
  return sum / static_cast<double>(f1_values.size());
}

double mean_f1(std::span<const EvalReport> reports) {
  if (reports.empty()) throw DataError("mean_f1: no reports");
  double sum = 0.0;
  for (const auto& r : reports) sum += r.f1;
  return sum / static_cast<double>(reports.size());
}

}  // namespace kelm
