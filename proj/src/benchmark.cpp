#include "kelm/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "kelm/error.hpp"
#include "kelm/random.hpp"

namespace kelm {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string csv_text(std::string s) {
  for (char& ch : s) {
    if (ch == '\n' || ch == '\r') ch = ' ';
    if (ch == '"') ch = '\'';
  }
  return '"' + s + '"';
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

EvalReport evaluate_on(const TrainedModel& model, const LabeledDataset& ds,
                       std::span<const std::size_t> rows) {
  const auto preds = predict(model, ds.x.select_rows(rows));
  std::vector<Label> truth;
  std::vector<Label> said;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    truth.push_back(ds.labels[rows[i]]);
    said.push_back(preds[i].label);
  }
  return metrics(confusion(truth, said));
}

BenchmarkCell run_cell(const LabeledDataset& ds, std::size_t dataset_index, ClassifierKind kind,
                       std::uint64_t seed, const GridSpec& grid) {
  BenchmarkCell cell;
  cell.dataset = ds.name;
  cell.kind = kind;
  cell.seed = seed;
  try {
    // streams depend on (seed, dataset) only: every classifier sees the same split and folds
    const std::uint64_t base = mix_seed(seed, dataset_index);
    const SplitPlan split = split_80_20(ds, base);
    const std::uint64_t model_seed = mix_seed(base, 2);
    const GridResult gs = grid_search(ds, split.cv_pool, kind, grid, mix_seed(base, 1), model_seed);

    std::vector<std::size_t> pool_targets;
    for (std::size_t i : split.cv_pool) {
      if (ds.labels[i] == Label::Target) pool_targets.push_back(i);
    }
    const Matrix raw_targets = ds.x.select_rows(pool_targets);

    const auto t0 = std::chrono::steady_clock::now();
    const TrainedModel model = train(kind, raw_targets, gs.best, model_seed);
    const auto t1 = std::chrono::steady_clock::now();

    cell.best = gs.best;
    cell.cv_f1 = gs.best_cv_f1;
    cell.sigma = model.kernel.sigma;
    cell.theta = model.theta;
    cell.n_train = pool_targets.size();
    cell.n_test = split.test.size();
    cell.fit_seconds = std::chrono::duration<double>(t1 - t0).count();
    cell.test = evaluate_on(model, ds, split.test);

    for (double delta : grid.delta_values) {
      DeltaSweepRow row;
      row.delta = delta;
      const GridPoint* p = select_best(gs.trace, delta);
      if (p == nullptr) {
        row.error = "no successful grid point";
      } else {
        try {
          row.cv_f1 = p->cv_f1;
          if (p->hyper == gs.best) {
            row.test_f1 = cell.test.f1;
          } else {
            row.test_f1 =
                evaluate_on(train(kind, raw_targets, p->hyper, model_seed), ds, split.test).f1;
          }
        } catch (const Error& e) {
          row.error = e.what();
        }
      }
      cell.sweep.push_back(row);
    }
  } catch (const std::exception& e) {
    cell.error = e.what();
  }
  return cell;
}

}  // namespace

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest " + path.string());
  std::vector<ManifestEntry> out;
  try {
    const auto doc = nlohmann::json::parse(in);
    for (const auto& item : doc.at("datasets")) {
      ManifestEntry e;
      e.path = item.at("path").get<std::string>();
      if (e.path.is_relative()) e.path = path.parent_path() / e.path;
      e.name = item.value("name", e.path.stem().string());
      const auto& col = item.at("label_column");
      e.csv.label_column = col.is_number() ? std::to_string(col.get<long long>())
                                           : col.get<std::string>();
      const auto& target = item.at("target_label");
      e.csv.target_label = target.is_string() ? target.get<std::string>() : target.dump();
      e.csv.has_header = item.value("header", true);
      out.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("manifest " + path.string() + ": " + e.what());
  }
  if (out.empty()) throw DataError("manifest " + path.string() + " lists no datasets");
  return out;
}

std::vector<LabeledDataset> load_datasets(std::span<const ManifestEntry> entries) {
  std::vector<LabeledDataset> out;
  for (const auto& e : entries) {
    auto ds = load_csv(e.path, e.csv);
    ds.name = e.name;
    out.push_back(std::move(ds));
  }
  return out;
}

BenchmarkTable run_benchmark(std::span<const LabeledDataset> datasets,
                             const BenchmarkConfig& config) {
  config.grid.validate();
  if (datasets.empty() || config.kinds.empty() || config.seeds.empty()) {
    throw ConfigError("benchmark needs at least one dataset, classifier and seed");
  }
  BenchmarkTable table;
  for (const auto& ds : datasets) table.datasets.push_back(ds.name);
  table.kinds = config.kinds;
  table.seeds = config.seeds;

  struct Job {
    std::size_t dataset;
    ClassifierKind kind;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t d = 0; d < datasets.size(); ++d)
    for (ClassifierKind kind : config.kinds)
      for (std::uint64_t seed : config.seeds) jobs.push_back({d, kind, seed});
  table.cells.resize(jobs.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& j = jobs[i];
      table.cells[i] = run_cell(datasets[j.dataset], j.dataset, j.kind, j.seed, config.grid);
    }
  };
  const unsigned threads =
      std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(jobs.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return table;
}

std::vector<ClassifierSummary> summarize(const BenchmarkTable& table) {
  std::vector<ClassifierSummary> out;
  for (ClassifierKind kind : table.kinds) {
    ClassifierSummary s;
    s.kind = kind;
    std::vector<double> f1;
    double time = 0.0;
    for (const auto& c : table.cells) {
      if (c.kind != kind) continue;
      if (!c.ok()) {
        ++s.failed_cells;
        continue;
      }
      f1.push_back(c.test.f1);
      time += c.fit_seconds;
    }
    s.ok_cells = f1.size();
    if (!f1.empty()) {
      s.eta_f1 = mean_f1(f1);
      s.median_f1 = median(f1);
      s.mean_fit_seconds = time / static_cast<double>(f1.size());
    }
    out.push_back(s);
  }
  return out;
}

DatasetScore dataset_score(const BenchmarkTable& table, const std::string& dataset,
                           ClassifierKind kind) {
  std::vector<double> f1;
  for (const auto& c : table.cells) {
    if (c.dataset == dataset && c.kind == kind && c.ok()) f1.push_back(c.test.f1);
  }
  DatasetScore s;
  s.ok_cells = f1.size();
  if (!f1.empty()) {
    s.mean_f1 = mean_f1(f1);
    s.median_f1 = median(f1);
  }
  return s;
}

void write_results_csv(std::ostream& out, const BenchmarkTable& table) {
  out << "dataset,classifier,seed,status,c,lambda,delta,laplacian,k,cv_f1,sigma,theta,"
         "n_train,n_test,tp,fp,tn,fn,accuracy,precision,recall,f1,gmean\n";
  for (const auto& c : table.cells) {
    out << c.dataset << ',' << to_string(c.kind) << ',' << c.seed << ',';
    if (!c.ok()) {
      out << csv_text("error: " + c.error) << ",,,,,,,,,,,,,,,,,,,\n";
      continue;
    }
    out << "ok," << fmt("%.6g", c.best.c) << ',' << fmt("%.6g", c.best.lambda) << ','
        << fmt("%.6g", c.best.delta) << ',' << to_string(c.best.laplacian.mode) << ','
        << c.best.laplacian.k << ',' << fmt("%.6f", c.cv_f1) << ',' << fmt("%.9g", c.sigma)
        << ',' << fmt("%.9g", c.theta) << ',' << c.n_train << ',' << c.n_test << ','
        << c.test.confusion.tp << ',' << c.test.confusion.fp << ',' << c.test.confusion.tn << ','
        << c.test.confusion.fn << ',' << fmt("%.6f", c.test.accuracy) << ','
        << fmt("%.6f", c.test.precision) << ',' << fmt("%.6f", c.test.recall) << ','
        << fmt("%.6f", c.test.f1) << ',' << fmt("%.6f", c.test.gmean) << '\n';
  }
}

void write_delta_sweep_csv(std::ostream& out, const BenchmarkTable& table) {
  out << "classifier,dataset,seed,delta,cv_f1,f1,status\n";
  for (const auto& c : table.cells) {
    if (!c.ok()) continue;
    for (const auto& r : c.sweep) {
      out << to_string(c.kind) << ',' << c.dataset << ',' << c.seed << ','
          << fmt("%.6g", r.delta) << ',';
      if (r.error.empty()) {
        out << fmt("%.6f", r.cv_f1) << ',' << fmt("%.6f", r.test_f1) << ",ok\n";
      } else {
        out << ",," << csv_text("error: " + r.error) << '\n';
      }
    }
  }
}

void write_timings(std::ostream& out, const BenchmarkTable& table) {
  std::size_t width = 9;
  for (const auto& d : table.datasets) width = std::max(width, d.size() + 2);
  out << std::left << std::setw(width) << "dataset" << std::setw(10) << "classifier" << std::right
      << std::setw(8) << "seed" << std::setw(9) << "n_train" << std::setw(14) << "fit_seconds"
      << '\n';
  for (const auto& c : table.cells) {
    if (!c.ok()) continue;
    out << std::left << std::setw(width) << c.dataset << std::setw(10) << to_string(c.kind)
        << std::right << std::setw(8) << c.seed << std::setw(9) << c.n_train << std::setw(14)
        << fmt("%.6f", c.fit_seconds) << '\n';
  }
}

void write_summary(std::ostream& out, const BenchmarkTable& table) {
  const auto summary = summarize(table);
  out << "Benchmark: " << table.datasets.size() << " dataset(s), " << table.kinds.size()
      << " classifier(s), " << table.seeds.size() << " seed(s)\n\n";
  out << std::left << std::setw(10) << "classifier" << std::right << std::setw(7) << "cells"
      << std::setw(8) << "failed" << std::setw(10) << "eta_F1" << std::setw(11) << "median_F1"
      << std::setw(13) << "mean_fit_s" << '\n';
  for (const auto& s : summary) {
    out << std::left << std::setw(10) << to_string(s.kind) << std::right << std::setw(7)
        << s.ok_cells + s.failed_cells << std::setw(8) << s.failed_cells << std::setw(10)
        << fmt("%.4f", s.eta_f1) << std::setw(11) << fmt("%.4f", s.median_f1) << std::setw(13)
        << fmt("%.5f", s.mean_fit_seconds) << '\n';
  }

  std::size_t width = 8;
  for (const auto& d : table.datasets) width = std::max(width, d.size() + 2);
  out << "\nMean test F1 per dataset (over seeds)\n" << std::left << std::setw(width) << "dataset";
  for (ClassifierKind kind : table.kinds) out << std::right << std::setw(10) << to_string(kind);
  out << '\n';
  for (const auto& d : table.datasets) {
    out << std::left << std::setw(width) << d;
    for (ClassifierKind kind : table.kinds) {
      const auto score = dataset_score(table, d, kind);
      out << std::right << std::setw(10) << (score.ok_cells ? fmt("%.4f", score.mean_f1) : "n/a");
    }
    out << '\n';
  }

  if (std::find(table.kinds.begin(), table.kinds.end(), ClassifierKind::Vockelm) !=
      table.kinds.end()) {
    double recall = 0.0, theta = 0.0;
    std::size_t n = 0;
    for (const auto& c : table.cells) {
      if (c.kind != ClassifierKind::Vockelm || !c.ok()) continue;
      recall += c.test.recall;
      theta += c.theta;
      ++n;
    }
    out << "\nnote: vockelm accepts (O - r)^2 <= delta * mean(O) rather than a percentile of "
           "training scores";
    if (n != 0) {
      out << "; mean test recall " << fmt("%.4f", recall / static_cast<double>(n))
          << ", mean theta " << fmt("%.4g", theta / static_cast<double>(n));
    }
    out << ".\n";
  }
  std::size_t failed = 0;
  for (const auto& c : table.cells) failed += c.ok() ? 0 : 1;
  if (failed != 0) {
    out << '\n' << failed << " cell(s) failed:\n";
    for (const auto& c : table.cells) {
      if (!c.ok()) {
        out << "  " << c.dataset << ' ' << to_string(c.kind) << " seed " << c.seed << ": "
            << c.error << '\n';
      }
    }
  }
}

}  // namespace kelm
