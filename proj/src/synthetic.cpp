#include "kelm/synthetic.hpp"

#include <cmath>
#include <string>

#include "kelm/error.hpp"
#include "kelm/random.hpp"

namespace kelm {

LabeledDataset make_synthetic(const SynthSpec& spec) {
  if (spec.n_target == 0 || spec.dims == 0) {
    throw ConfigError("make_synthetic: target count and dims must be positive");
  }
  if (!(spec.separation >= 0.0) || !std::isfinite(spec.separation)) {
    throw ConfigError("make_synthetic: separation must be finite and non-negative");
  }
  Rng rng(spec.seed);
  const std::size_t n = spec.n_target + spec.n_outlier;
  LabeledDataset ds;
  ds.x = Matrix(n, spec.dims);
  ds.labels.assign(spec.n_target, Label::Target);
  ds.labels.resize(n, Label::Outlier);
  for (std::size_t c = 0; c < spec.dims; ++c) ds.feature_names.push_back("f" + std::to_string(c));

  for (std::size_t r = 0; r < spec.n_target; ++r) {
    for (double& v : ds.x.row(r)) v = rng.normal();
  }
  for (std::size_t r = spec.n_target; r < n; ++r) {
    auto row = ds.x.row(r);
    double norm = 0.0;
    do {
      norm = 0.0;
      for (double& v : row) {
        v = rng.normal();
        norm += v * v;
      }
      norm = std::sqrt(norm);
    } while (norm == 0.0);
    const double radius = spec.separation * (1.0 + 0.5 * rng.uniform01());
    for (double& v : row) v = v / norm * radius;
  }
  ds.name = "synth_d" + std::to_string(spec.dims) + "_s" +
            std::to_string(static_cast<long long>(std::llround(spec.separation * 10))) + "_" +
            std::to_string(spec.seed);
  return ds;
}

std::vector<SynthSpec> synthetic_suite_specs() {
  // inner shell radius at roughly 1.4 to 1.8 times the target radius sqrt(d)
  return {
      {200, 100, 2, 2.5, 101},
      {150, 75, 3, 3.0, 102},
      {150, 100, 5, 3.5, 103},
      {120, 80, 8, 4.0, 104},
      {200, 100, 10, 4.5, 105},
  };
}

std::vector<LabeledDataset> synthetic_suite() {
  std::vector<LabeledDataset> out;
  for (const auto& spec : synthetic_suite_specs()) out.push_back(make_synthetic(spec));
  return out;
}

}  // namespace kelm
