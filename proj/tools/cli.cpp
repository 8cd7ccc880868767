#include "cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "kelm/benchmark.hpp"
#include "kelm/classifier.hpp"
#include "kelm/dataset.hpp"
#include "kelm/error.hpp"
#include "kelm/evaluation.hpp"
#include "kelm/grid_search.hpp"
#include "kelm/model_io.hpp"
#include "kelm/synthetic.hpp"

namespace kelm::cli {

namespace {

constexpr int kExitData = 1;
constexpr int kExitNumeric = 2;

struct DataFlags {
  std::string path;
  std::optional<std::string> label_col;
  std::string target_label = "target";
  bool no_header = false;

  CsvOptions csv() const { return {label_col, target_label, !no_header}; }
};

struct HyperFlags {
  std::string classifier = "vaakelm";
  double c = 1.0;
  double lambda = 1.0;
  double delta = 0.05;
  std::size_t k = 1;
  std::optional<std::string> laplacian;
  double target_value = 1.0;
};

struct GridFlags {
  std::optional<std::string> c_values;
  std::optional<std::string> delta_values;
  std::optional<std::string> k_values;
};

void add_data_flags(CLI::App* app, DataFlags& f, bool label_required) {
  app->add_option("--data", f.path, "CSV dataset")->required();
  auto* col = app->add_option("--label-col", f.label_col,
                              "label column: header name or 0-based index (negative from end)");
  if (label_required) col->required();
  app->add_option("--target-label", f.target_label, "label value of the target class")
      ->capture_default_str();
  app->add_flag("--no-header", f.no_header, "first row is data, not a header");
}

void add_hyper_flags(CLI::App* app, HyperFlags& f) {
  app->add_option("--classifier", f.classifier, "ockelm|aakelm|vockelm|vaakelm")
      ->check(CLI::IsMember({"ockelm", "aakelm", "vockelm", "vaakelm"}))
      ->capture_default_str();
  app->add_option("--c", f.c, "regularization C")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--lambda", f.lambda, "graph regularization")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--delta", f.delta, "fraction of dismissal in (0, 1]")
      ->check(CLI::Range(0.0, 1.0) & CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--k", f.k, "cluster count for the intra-class Laplacian")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--laplacian", f.laplacian,
                  "none|class|intra (default: class for vockelm/vaakelm, none otherwise)")
      ->check(CLI::IsMember({"none", "class", "intra"}));
  app->add_option("--target-value", f.target_value, "regression target r")->capture_default_str();
}

void add_grid_flags(CLI::App* app, GridFlags& f) {
  app->add_option("--grid-c", f.c_values, "C values, e.g. 2^-5..2^5 or 0.5,1,2");
  app->add_option("--grid-delta", f.delta_values, "delta values, e.g. 0.01,0.05,0.1");
  app->add_option("--grid-k", f.k_values, "cluster counts, e.g. 1..10 or 2,4");
}

double parse_number(const std::string& token) {
  const auto caret = token.find('^');
  if (caret != std::string::npos) {
    const double base = parse_number(token.substr(0, caret));
    const double exponent = parse_number(token.substr(caret + 1));
    return std::pow(base, exponent);
  }
  double v = 0.0;
  const char* first = token.data();
  const char* last = first + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ConfigError("cannot parse number '" + token + "'");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// "a,b,c"; "2^lo..2^hi" steps the exponent by one, "lo..hi" steps by one.
std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& token : split(text, ',')) {
    const auto dots = token.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_number(token));
      continue;
    }
    const std::string lo = token.substr(0, dots);
    const std::string hi = token.substr(dots + 2);
    if (lo.rfind("2^", 0) == 0 && hi.rfind("2^", 0) == 0) {
      const double a = parse_number(lo.substr(2));
      const double b = parse_number(hi.substr(2));
      for (double e = a; e <= b + 1e-9; e += 1.0) out.push_back(std::ldexp(1.0, static_cast<int>(e)));
    } else {
      const double a = parse_number(lo);
      const double b = parse_number(hi);
      for (double v = a; v <= b + 1e-9; v += 1.0) out.push_back(v);
    }
  }
  if (out.empty()) throw ConfigError("empty value list '" + text + "'");
  return out;
}

GridSpec make_grid(const GridFlags& g, const HyperFlags& h, ClassifierKind kind) {
  GridSpec grid = GridSpec::defaults();
  if (g.c_values) grid.c_values = parse_list(*g.c_values);
  if (g.delta_values) grid.delta_values = parse_list(*g.delta_values);
  if (g.k_values) {
    grid.k_values.clear();
    for (double v : parse_list(*g.k_values)) {
      if (v < 1 || v != std::floor(v)) throw ConfigError("cluster counts must be positive integers");
      grid.k_values.push_back(static_cast<std::size_t>(v));
    }
  }
  for (double c : grid.c_values) {
    if (!(c > 0.0)) throw ConfigError("grid C values must be positive");
  }
  for (double d : grid.delta_values) {
    if (!(d > 0.0 && d <= 1.0)) throw ConfigError("grid delta values must lie in (0, 1]");
  }
  grid.lambda = h.lambda;
  grid.target_value = h.target_value;
  if (h.laplacian) {
    if (!embeds_variance(kind) && *h.laplacian != "none") {
      throw ConfigError(to_string(kind) + " has no variance term; --laplacian must be none");
    }
    grid.laplacians = {parse_laplacian_mode(*h.laplacian)};
  }
  grid.validate();
  return grid;
}

HyperParams make_hyper(const HyperFlags& f, ClassifierKind kind) {
  HyperParams h;
  h.c = f.c;
  h.lambda = f.lambda;
  h.delta = f.delta;
  h.target_value = f.target_value;
  const std::string lap = f.laplacian.value_or(embeds_variance(kind) ? "class" : "none");
  h.laplacian = {parse_laplacian_mode(lap), lap == "intra" ? f.k : 0};
  h.validate(kind);
  return h;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (double v : parse_list(text)) {
    if (v < 0 || v != std::floor(v)) throw ConfigError("seeds must be non-negative integers");
    out.push_back(static_cast<std::uint64_t>(v));
  }
  return out;
}

Matrix target_rows(const LabeledDataset& ds) {
  const auto idx = ds.indices_of(Label::Target);
  return ds.x.select_rows(idx);
}

std::string hyper_text(const HyperParams& h) {
  std::ostringstream s;
  s << "C=" << h.c << " lambda=" << h.lambda << " delta=" << h.delta
    << " laplacian=" << to_string(h.laplacian.mode);
  if (h.laplacian.mode == LaplacianKind::Mode::IntraClass) s << " k=" << h.laplacian.k;
  return s.str();
}

void print_report(std::ostream& out, const EvalReport& r) {
  out << "tp,fp,tn,fn,accuracy,precision,recall,f1,gmean\n"
      << r.confusion.tp << ',' << r.confusion.fp << ',' << r.confusion.tn << ','
      << r.confusion.fn << std::setprecision(17) << ',' << r.accuracy << ',' << r.precision << ','
      << r.recall << ',' << r.f1 << ',' << r.gmean << '\n';
}

template <class Fn>
void with_output(const std::optional<std::string>& path, std::ostream& fallback, Fn&& fn) {
  if (!path || *path == "-") {
    fn(fallback);
    return;
  }
  std::ofstream file(*path, std::ios::binary);
  if (!file) throw DataError("cannot write " + *path);
  fn(file);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"One-class kernel ELM classifiers: train, predict, evaluate, grid search, benchmark"};
  app.name("kelm");
  app.require_subcommand(1);

  DataFlags data;
  HyperFlags hyper;
  GridFlags grid_flags;
  std::uint64_t seed = 0;
  std::string seeds_text = "0";
  std::optional<std::string> out_path;
  std::string model_path;
  std::optional<std::string> manifest;
  bool use_suite = false;
  std::optional<std::string> classifiers_text;
  unsigned threads = 1;
  SynthSpec synth;

  auto* train_cmd = app.add_subcommand("train", "fit a classifier on the target rows of a CSV");
  add_data_flags(train_cmd, data, false);
  add_hyper_flags(train_cmd, hyper);
  train_cmd->add_option("--seed", seed, "k-means seed")->capture_default_str();
  train_cmd->add_option("--model-out", model_path, "model file to write")->required();

  auto* predict_cmd = app.add_subcommand("predict", "score samples with a saved model");
  predict_cmd->add_option("--model", model_path, "model file")->required();
  add_data_flags(predict_cmd, data, false);
  predict_cmd->add_option("--out", out_path, "prediction CSV (default stdout)");

  auto* eval_cmd = app.add_subcommand("evaluate", "confusion metrics of a saved model on labeled data");
  eval_cmd->add_option("--model", model_path, "model file")->required();
  add_data_flags(eval_cmd, data, true);
  eval_cmd->add_option("--out", out_path, "metrics CSV (default stdout)");

  auto* grid_cmd = app.add_subcommand("gridsearch", "5-fold cross-validated hyperparameter search");
  add_data_flags(grid_cmd, data, true);
  add_hyper_flags(grid_cmd, hyper);
  add_grid_flags(grid_cmd, grid_flags);
  grid_cmd->add_option("--seed", seed, "fold and k-means seed")->capture_default_str();
  grid_cmd->add_option("--out", out_path, "trace CSV");

  auto* bench_cmd = app.add_subcommand("benchmark", "split / grid search / refit / test over datasets and seeds");
  auto* manifest_opt = bench_cmd->add_option("--manifest", manifest, "JSON dataset manifest");
  auto* data_opt = bench_cmd->add_option("--data", data.path, "single CSV dataset");
  auto* suite_opt = bench_cmd->add_flag("--suite", use_suite, "use the built-in synthetic suite");
  manifest_opt->excludes(data_opt)->excludes(suite_opt);
  data_opt->excludes(suite_opt);
  bench_cmd->add_option("--label-col", data.label_col, "label column for --data");
  bench_cmd->add_option("--target-label", data.target_label, "target label for --data")
      ->capture_default_str();
  bench_cmd->add_flag("--no-header", data.no_header, "--data has no header row");
  bench_cmd->add_option("--classifier", classifiers_text, "comma-separated classifiers (default all)");
  bench_cmd->add_option("--lambda", hyper.lambda, "graph regularization")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_cmd->add_option("--target-value", hyper.target_value, "regression target r")
      ->capture_default_str();
  bench_cmd->add_option("--laplacian", hyper.laplacian, "restrict the Laplacian sweep")
      ->check(CLI::IsMember({"none", "class", "intra"}));
  add_grid_flags(bench_cmd, grid_flags);
  bench_cmd->add_option("--seeds", seeds_text, "comma-separated seeds or lo..hi")->capture_default_str();
  bench_cmd->add_option("--out", out_path, "output directory (default benchmark_out)");
  bench_cmd->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();

  auto* synth_cmd = app.add_subcommand("synth", "write a Gaussian target / shell outlier CSV");
  synth_cmd->add_option("--n-target", synth.n_target)->check(CLI::PositiveNumber)->capture_default_str();
  synth_cmd->add_option("--n-outlier", synth.n_outlier)->check(CLI::NonNegativeNumber)->capture_default_str();
  synth_cmd->add_option("--dims", synth.dims)->check(CLI::PositiveNumber)->capture_default_str();
  synth_cmd->add_option("--separation", synth.separation, "shell radius in target std units")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
  synth_cmd->add_option("--out", out_path, "CSV path or - for stdout")->required();

  std::vector<const char*> argv{"kelm"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "kelm: " << e.what() << "\n";
    return kExitData;
  }

  try {
    if (*train_cmd) {
      const ClassifierKind kind = parse_classifier(hyper.classifier);
      const HyperParams h = make_hyper(hyper, kind);
      const LabeledDataset ds = load_csv(data.path, data.csv());
      const Matrix raw = target_rows(ds);
      const auto t0 = std::chrono::steady_clock::now();
      const TrainedModel model = train(kind, raw, h, seed);
      const auto t1 = std::chrono::steady_clock::now();
      save_model(model_path, model);
      out << "classifier " << to_string(kind) << '\n'
          << "N " << model.train_x.rows() << '\n'
          << "d " << model.feature_count() << '\n'
          << std::setprecision(10) << "sigma " << model.kernel.sigma << '\n'
          << "theta " << model.theta << '\n';
      if (kind == ClassifierKind::Vockelm) {
        out << "training_rejections n/a\n";
      } else {
        out << "training_rejections " << training_rejection_count(model) << '\n';
      }
      out << "fit_seconds " << std::chrono::duration<double>(t1 - t0).count() << '\n';
      return 0;
    }

    if (*predict_cmd) {
      const TrainedModel model = load_model(model_path);
      const LabeledDataset ds = load_csv(data.path, data.csv());
      if (ds.x.cols() != model.feature_count()) {
        throw DimensionError("feature count mismatch: model expects " +
                             std::to_string(model.feature_count()) + ", data has " +
                             std::to_string(ds.x.cols()));
      }
      const auto preds = predict(model, ds.x);
      with_output(out_path, out, [&](std::ostream& o) {
        o << "index,score,label\n" << std::setprecision(17);
        for (std::size_t i = 0; i < preds.size(); ++i) {
          o << i << ',' << preds[i].score << ',' << static_cast<int>(preds[i].label) << '\n';
        }
      });
      return 0;
    }

    if (*eval_cmd) {
      const TrainedModel model = load_model(model_path);
      const LabeledDataset ds = load_csv(data.path, data.csv());
      if (ds.x.cols() != model.feature_count()) {
        throw DimensionError("feature count mismatch: model expects " +
                             std::to_string(model.feature_count()) + ", data has " +
                             std::to_string(ds.x.cols()));
      }
      const auto preds = predict(model, ds.x);
      std::vector<Label> said;
      for (const auto& p : preds) said.push_back(p.label);
      const EvalReport report = metrics(confusion(ds.labels, said));
      with_output(out_path, out, [&](std::ostream& o) { print_report(o, report); });
      return 0;
    }

    if (*grid_cmd) {
      const ClassifierKind kind = parse_classifier(hyper.classifier);
      const GridSpec grid = make_grid(grid_flags, hyper, kind);
      const LabeledDataset ds = load_csv(data.path, data.csv());
      const GridResult result = grid_search(ds, kind, grid, seed);
      out << "classifier " << to_string(kind) << '\n'
          << "points " << result.trace.size() << '\n'
          << "best " << hyper_text(result.best) << '\n'
          << std::setprecision(10) << "cv_f1 " << result.best_cv_f1 << '\n';
      if (out_path) {
        with_output(out_path, out, [&](std::ostream& o) {
          o << "c,lambda,delta,laplacian,k,cv_f1,status\n" << std::setprecision(10);
          for (const auto& p : result.trace) {
            o << p.hyper.c << ',' << p.hyper.lambda << ',' << p.hyper.delta << ','
              << to_string(p.hyper.laplacian.mode) << ',' << p.hyper.laplacian.k << ',';
            if (p.ok()) {
              o << p.cv_f1 << ",ok\n";
            } else {
              o << ",\"error: " << p.error << "\"\n";
            }
          }
        });
      }
      return 0;
    }

    if (*bench_cmd) {
      std::vector<ClassifierKind> kinds;
      if (classifiers_text) {
        for (const auto& name : split(*classifiers_text, ',')) kinds.push_back(parse_classifier(name));
      } else {
        kinds.assign(kAllClassifiers.begin(), kAllClassifiers.end());
      }
      BenchmarkConfig config;
      config.kinds = kinds;
      // the Laplacian restriction applies only to the variance kinds
      HyperFlags grid_hyper = hyper;
      grid_hyper.laplacian.reset();
      config.grid = make_grid(grid_flags, grid_hyper, ClassifierKind::Vaakelm);
      if (hyper.laplacian) config.grid.laplacians = {parse_laplacian_mode(*hyper.laplacian)};
      config.seeds = parse_seeds(seeds_text);
      config.threads = threads;

      std::vector<LabeledDataset> datasets;
      if (manifest) {
        datasets = load_datasets(load_manifest(*manifest));
      } else if (use_suite) {
        datasets = synthetic_suite();
      } else if (!data.path.empty()) {
        if (!data.label_col) throw ConfigError("--data needs --label-col");
        datasets.push_back(load_csv(data.path, data.csv()));
      } else {
        throw ConfigError("benchmark needs --manifest, --data or --suite");
      }

      const BenchmarkTable table = run_benchmark(datasets, config);
      const std::filesystem::path dir = out_path.value_or("benchmark_out");
      std::filesystem::create_directories(dir);
      auto write = [&](const char* name, auto&& fn) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw DataError("cannot write " + (dir / name).string());
        fn(f, table);
      };
      write("results.csv", write_results_csv);
      write("delta_sweep.csv", write_delta_sweep_csv);
      write("timings.txt", write_timings);
      write("summary.txt", write_summary);
      write_summary(out, table);

      const bool any_ok =
          std::any_of(table.cells.begin(), table.cells.end(), [](const auto& c) { return c.ok(); });
      return any_ok ? 0 : kExitNumeric;
    }

    if (*synth_cmd) {
      const LabeledDataset ds = make_synthetic(synth);
      with_output(out_path, out,
                  [&](std::ostream& o) { write_csv(o, ds, "target", "outlier"); });
      return 0;
    }
  } catch (const SingularMatrixError& e) {
    err << "kelm: numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const DataError& e) {
    err << "kelm: " << e.what() << '\n';
    return kExitData;
  } catch (const ConfigError& e) {
    err << "kelm: " << e.what() << '\n';
    return kExitData;
  } catch (const DimensionError& e) {
    err << "kelm: " << e.what() << '\n';
    return kExitData;
  } catch (const Error& e) {
    err << "kelm: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "kelm: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}

}  // namespace kelm::cli
