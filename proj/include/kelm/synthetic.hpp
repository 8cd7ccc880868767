#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "kelm/dataset.hpp"

namespace kelm {

struct SynthSpec {
  std::size_t n_target = 100;
  std::size_t n_outlier = 50;
  std::size_t dims = 2;
  double separation = 10.0;  // shell inner radius, in target standard deviations
  std::uint64_t seed = 0;
};

/// Standard-normal target cloud plus outliers on a shell around it.
///
/// Outlier directions are uniform on the sphere; radii are uniform in
/// [separation, 1.5 separation]. Targets come first, then outliers.
LabeledDataset make_synthetic(const SynthSpec& spec);

/// The five fixed datasets used for cross-classifier comparisons.
std::vector<SynthSpec> synthetic_suite_specs();
std::vector<LabeledDataset> synthetic_suite();

}  // namespace kelm
