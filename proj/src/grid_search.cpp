#include "kelm/grid_search.hpp"

#include <cmath>
#include <numeric>
#include <tuple>

#include "kelm/error.hpp"
#include "kelm/evaluation.hpp"

namespace kelm {

namespace {

std::size_t cluster_rank(const LaplacianKind& l) {
  return l.mode == LaplacianKind::Mode::IntraClass ? l.k : 0;
}

std::vector<LaplacianKind> laplacian_configs(ClassifierKind kind, const GridSpec& grid) {
  if (!embeds_variance(kind)) return {LaplacianKind::none()};
  std::vector<LaplacianKind> out;
  for (auto mode : grid.laplacians) {
    if (mode == LaplacianKind::Mode::IntraClass) {
      for (std::size_t k : grid.k_values) out.push_back(LaplacianKind::intra_class(k));
    } else {
      out.push_back({mode, 0});
    }
  }
  return out;
}

// One fold's training state, shared by every grid point.
struct FoldState {
  Matrix x_train;
  Matrix omega;
  Matrix k_val;
  Matrix x_val;
  std::vector<Label> truth;
};

FoldState prepare_fold(const LabeledDataset& ds, const Fold& fold) {
  FoldState s;
  const Matrix raw_train = ds.x.select_rows(fold.train_targets);
  const NormStats norm = zscore_fit(raw_train);
  s.x_train = zscore_apply(raw_train, norm);
  const KernelSpec kernel{KernelKind::Rbf, estimate_sigma(s.x_train)};
  s.omega = gram(s.x_train, kernel);
  s.x_val = zscore_apply(ds.x.select_rows(fold.validation), norm);
  s.k_val = cross_gram(s.x_train, s.x_val, kernel);
  for (std::size_t i : fold.validation) s.truth.push_back(ds.labels[i]);
  return s;
}

}  // namespace

GridSpec GridSpec::defaults() {
  GridSpec g;
  for (int e = -5; e <= 5; ++e) g.c_values.push_back(std::ldexp(1.0, e));
  g.delta_values = {0.01, 0.05, 0.10};
  for (std::size_t k = 1; k <= 10; ++k) g.k_values.push_back(k);
  return g;
}

void GridSpec::validate() const {
  if (c_values.empty() || delta_values.empty()) {
    throw ConfigError("grid: C and delta value lists must be non-empty");
  }
  for (auto mode : laplacians) {
    if (mode == LaplacianKind::Mode::IntraClass && k_values.empty()) {
      throw ConfigError("grid: intra-class sweep needs a non-empty k list");
    }
  }
}

std::vector<HyperParams> GridSpec::points(ClassifierKind kind) const {
  std::vector<HyperParams> out;
  for (const auto& lap : laplacian_configs(kind, *this)) {
    for (double c : c_values) {
      for (double delta : delta_values) {
        HyperParams h;
        h.c = c;
        h.lambda = lambda;
        h.delta = delta;
        h.laplacian = lap;
        h.target_value = target_value;
        out.push_back(h);
      }
    }
  }
  return out;
}

bool preferred(const GridPoint& a, const GridPoint& b) {
  if (a.cv_f1 != b.cv_f1) return a.cv_f1 > b.cv_f1;
  const auto key = [](const GridPoint& p) {
    return std::make_tuple(p.hyper.c, p.hyper.delta, cluster_rank(p.hyper.laplacian),
                           static_cast<int>(p.hyper.laplacian.mode));
  };
  return key(a) < key(b);
}

const GridPoint* select_best(std::span<const GridPoint> trace, std::optional<double> delta) {
  const GridPoint* best = nullptr;
  for (const auto& p : trace) {
    if (!p.ok()) continue;
    if (delta && p.hyper.delta != *delta) continue;
    if (best == nullptr || preferred(p, *best)) best = &p;
  }
  return best;
}

GridResult grid_search(const LabeledDataset& ds, std::span<const std::size_t> pool,
                       ClassifierKind kind, const GridSpec& grid, std::uint64_t seed,
                       std::uint64_t model_seed) {
  grid.validate();
  GridResult result;
  result.folds = make_folds(ds, pool, seed);

  const auto laps = laplacian_configs(kind, grid);
  const auto hypers = grid.points(kind);
  for (const auto& h : hypers) h.validate(kind);
  result.trace.resize(hypers.size());
  for (std::size_t i = 0; i < hypers.size(); ++i) result.trace[i].hyper = hypers[i];

  const std::size_t n_c = grid.c_values.size();
  const std::size_t n_delta = grid.delta_values.size();
  const double lambda = embeds_variance(kind) ? grid.lambda : 1.0;

  auto fail = [&](std::size_t first, std::size_t count, std::size_t fold, const std::string& why) {
    for (std::size_t i = first; i < first + count; ++i) {
      if (result.trace[i].error.empty()) {
        result.trace[i].error = "fold " + std::to_string(fold + 1) + ": " + why;
      }
    }
  };

  for (std::size_t f = 0; f < result.folds.folds.size(); ++f) {
    FoldState state;
    try {
      state = prepare_fold(ds, result.folds.folds[f]);
    } catch (const Error& e) {
      fail(0, hypers.size(), f, e.what());
      continue;
    }

    for (std::size_t li = 0; li < laps.size(); ++li) {
      const std::size_t lap_base = li * n_c * n_delta;
      std::optional<Matrix> m_omega;
      try {
        if (laps[li].mode != LaplacianKind::Mode::None) {
          m_omega = matmul(build_laplacian(laps[li], state.x_train, model_seed), state.omega);
        }
      } catch (const Error& e) {
        fail(lap_base, n_c * n_delta, f, e.what());
        continue;
      }

      for (std::size_t ci = 0; ci < n_c; ++ci) {
        const std::size_t c_base = lap_base + ci * n_delta;
        Matrix beta;
        try {
          const Matrix a = system_matrix(state.omega, m_omega ? &*m_omega : nullptr,
                                         grid.c_values[ci], lambda);
          beta = solve_linear(a, regression_targets(kind, state.x_train, grid.target_value));
        } catch (const Error& e) {
          fail(c_base, n_delta, f, e.what());
          continue;
        }
        const Matrix train_out = matmul(state.omega, beta);
        const auto train_scores =
            deviation_scores(kind, train_out, state.x_train, grid.target_value);
        const auto val_scores =
            deviation_scores(kind, matmul(state.k_val, beta), state.x_val, grid.target_value);

        for (std::size_t di = 0; di < n_delta; ++di) {
          const double theta =
              fit_threshold(kind, train_scores, train_out, grid.delta_values[di]);
          std::vector<Label> predicted(val_scores.size());
          for (std::size_t i = 0; i < val_scores.size(); ++i) {
            predicted[i] = decide(val_scores[i], theta);
          }
          result.trace[c_base + di].fold_f1.push_back(
              metrics(confusion(state.truth, predicted)).f1);
        }
      }
    }
  }

  std::string failures;
  for (auto& p : result.trace) {
    if (!p.ok()) {
      p.fold_f1.clear();
      if (failures.size() < 4000) failures += "\n  " + p.error;
      continue;
    }
    p.cv_f1 = std::accumulate(p.fold_f1.begin(), p.fold_f1.end(), 0.0) /
              static_cast<double>(p.fold_f1.size());
  }
  const GridPoint* best = select_best(result.trace);
  if (best == nullptr) {
    throw Error("grid_search: every grid point failed for " + to_string(kind) + ":" + failures);
  }
  result.best = best->hyper;
  result.best_cv_f1 = best->cv_f1;
  return result;
}

GridResult grid_search(const LabeledDataset& ds, ClassifierKind kind, const GridSpec& grid,
                       std::uint64_t seed) {
  std::vector<std::size_t> pool(ds.x.rows());
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  return grid_search(ds, pool, kind, grid, seed, seed);
}

}  // namespace kelm
