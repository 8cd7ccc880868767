#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "kelm/classifier.hpp"
#include "kelm/dataset.hpp"
#include "kelm/evaluation.hpp"
#include "kelm/grid_search.hpp"

namespace kelm {

struct ManifestEntry {
  std::string name;
  std::filesystem::path path;
  CsvOptions csv;
};

/// JSON manifest: {"datasets": [{"name", "path", "label_column", "target_label",
/// "header"?}]}. Relative paths resolve against the manifest's directory.
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);
std::vector<LabeledDataset> load_datasets(std::span<const ManifestEntry> entries);

struct BenchmarkConfig {
  std::vector<ClassifierKind> kinds{kAllClassifiers.begin(), kAllClassifiers.end()};
  GridSpec grid = GridSpec::defaults();
  std::vector<std::uint64_t> seeds{0};
  unsigned threads = 1;
};

/// Test result with delta pinned to one grid value, other parameters re-selected.
struct DeltaSweepRow {
  double delta = 0.0;
  double cv_f1 = 0.0;
  double test_f1 = 0.0;
  std::string error;
};

struct BenchmarkCell {
  std::string dataset;
  ClassifierKind kind = ClassifierKind::Vaakelm;
  std::uint64_t seed = 0;
  std::string error;  // empty on success

  HyperParams best;
  double cv_f1 = 0.0;
  double sigma = 0.0;
  double theta = 0.0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  EvalReport test;
  double fit_seconds = 0.0;
  std::vector<DeltaSweepRow> sweep;

  bool ok() const { return error.empty(); }
};

struct BenchmarkTable {
  std::vector<std::string> datasets;
  std::vector<ClassifierKind> kinds;
  std::vector<std::uint64_t> seeds;
  std::vector<BenchmarkCell> cells;  // dataset-major, then classifier, then seed
};

/// Per (dataset, classifier, seed): stratified 80/20 split, grid search on the
/// pool, refit on all pool targets with the selected parameters, score the
/// test part. A failing cell records its error and the run continues. Output
/// does not depend on `threads`.
BenchmarkTable run_benchmark(std::span<const LabeledDataset> datasets,
                             const BenchmarkConfig& config);

struct ClassifierSummary {
  ClassifierKind kind = ClassifierKind::Vaakelm;
  double eta_f1 = 0.0;     // mean test F1 over successful cells
  double median_f1 = 0.0;
  double mean_fit_seconds = 0.0;
  std::size_t ok_cells = 0;
  std::size_t failed_cells = 0;
};

std::vector<ClassifierSummary> summarize(const BenchmarkTable& table);

/// Mean and median test F1 of one classifier on one dataset over seeds.
struct DatasetScore {
  double mean_f1 = 0.0;
  double median_f1 = 0.0;
  std::size_t ok_cells = 0;
};
DatasetScore dataset_score(const BenchmarkTable& table, const std::string& dataset,
                           ClassifierKind kind);

// Deterministic outputs: identical inputs give identical bytes.
void write_results_csv(std::ostream& out, const BenchmarkTable& table);
void write_delta_sweep_csv(std::ostream& out, const BenchmarkTable& table);

// Wall-clock, so these vary between runs.
void write_timings(std::ostream& out, const BenchmarkTable& table);
void write_summary(std::ostream& out, const BenchmarkTable& table);

}  // namespace kelm
