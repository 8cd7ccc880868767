#pragma once

#include <cstddef>
#include <span>

#include "kelm/dataset.hpp"

namespace kelm {

/// Target is the positive class.
struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  bool operator==(const Confusion&) const = default;
};

Confusion confusion(std::span<const Label> truth, std::span<const Label> predicted);

struct EvalReport {
  Confusion confusion;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double gmean = 0.0;
};

/// Accuracy, precision, recall, F1 and G-mean from counts.
///
/// A zero precision or recall denominator yields 0 for that metric, and F1
/// and G-mean then follow as 0. Each value is one division of integer-valued
/// quantities (G-mean adds one square root).
EvalReport metrics(const Confusion& c);

double mean_f1(std::span<const EvalReport> reports);
double mean_f1(std::span<const double> f1_values);

}  // namespace kelm
