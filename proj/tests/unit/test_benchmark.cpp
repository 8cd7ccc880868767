#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "kelm/benchmark.hpp"
#include "kelm/error.hpp"
#include "kelm/random.hpp"
#include "kelm/synthetic.hpp"

using kelm::ClassifierKind;

namespace {

kelm::BenchmarkConfig quick(std::vector<ClassifierKind> kinds, std::vector<std::uint64_t> seeds) {
  kelm::BenchmarkConfig cfg;
  cfg.kinds = std::move(kinds);
  cfg.seeds = std::move(seeds);
  cfg.grid.c_values = {0.5, 2.0};
  cfg.grid.k_values = {2};
  return cfg;
}

kelm::LabeledDataset data(std::uint64_t seed) {
  kelm::SynthSpec s;
  s.n_target = 60;
  s.n_outlier = 30;
  s.dims = 3;
  s.separation = 6.0;
  s.seed = seed;
  return kelm::make_synthetic(s);
}

template <class Fn>
std::string render(Fn fn, const kelm::BenchmarkTable& t) {
  std::ostringstream out;
  fn(out, t);
  return out.str();
}

}  // namespace

TEST_CASE("one dataset one classifier one seed") {
  const std::vector<kelm::LabeledDataset> ds{data(1)};
  const auto table = kelm::run_benchmark(ds, quick({ClassifierKind::Aakelm}, {0}));
  REQUIRE(table.cells.size() == 1);
  const auto& cell = table.cells[0];
  CHECK(cell.ok());
  CHECK(cell.n_test == 18);
  CHECK(cell.test.confusion.total() == 18);
  CHECK(cell.n_train == 48);
  CHECK(cell.sweep.size() == 3);
}

TEST_CASE("eta F1 is the mean of the cell F1 values") {
  const std::vector<kelm::LabeledDataset> ds{data(2), data(3)};
  const auto table = kelm::run_benchmark(ds, quick({ClassifierKind::Ockelm, ClassifierKind::Vaakelm}, {1, 2, 3}));
  CHECK(table.cells.size() == 12);
  for (const auto& s : kelm::summarize(table)) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& c : table.cells)
      if (c.kind == s.kind && c.ok()) {
        sum += c.test.f1;
        ++n;
      }
    CHECK(s.ok_cells == n);
    CHECK(s.eta_f1 == doctest::Approx(sum / static_cast<double>(n)).epsilon(1e-15));
  }
}

TEST_CASE("benchmark output is deterministic and independent of threads") {
  const std::vector<kelm::LabeledDataset> ds{data(4), data(5)};
  auto cfg = quick({ClassifierKind::Aakelm, ClassifierKind::Vockelm}, {0, 1});
  const auto a = kelm::run_benchmark(ds, cfg);
  cfg.threads = 3;
  const auto b = kelm::run_benchmark(ds, cfg);
  CHECK(render(kelm::write_results_csv, a) == render(kelm::write_results_csv, b));
  CHECK(render(kelm::write_delta_sweep_csv, a) == render(kelm::write_delta_sweep_csv, b));
}

TEST_CASE("test samples never influence model selection") {
  const auto base = data(6);
  const auto split = kelm::split_80_20(base, kelm::mix_seed(0, 0));
  auto altered = base;
  for (std::size_t i : split.test)
    for (auto& v : altered.x.row(i)) v = v * 3.0 + 11.0;
  const auto cfg = quick({ClassifierKind::Vaakelm, ClassifierKind::Ockelm}, {0});
  const std::vector<kelm::LabeledDataset> a{base}, b{altered};
  const auto ta = kelm::run_benchmark(a, cfg);
  const auto tb = kelm::run_benchmark(b, cfg);
  for (std::size_t i = 0; i < ta.cells.size(); ++i) {
    CHECK(ta.cells[i].best == tb.cells[i].best);
    CHECK(ta.cells[i].cv_f1 == tb.cells[i].cv_f1);
    CHECK(ta.cells[i].sigma == tb.cells[i].sigma);
    CHECK(ta.cells[i].theta == tb.cells[i].theta);
  }
}

TEST_CASE("failed cells are recorded without aborting the run") {
  kelm::LabeledDataset tiny;
  tiny.name = "tiny";
  tiny.x = kelm::Matrix{{0.0}, {1.0}, {2.0}, {3.0}, {4.0}, {5.0}};
  tiny.labels.assign(6, kelm::Label::Outlier);
  tiny.labels[0] = kelm::Label::Target;
  const std::vector<kelm::LabeledDataset> ds{tiny, data(7)};
  const auto table = kelm::run_benchmark(ds, quick({ClassifierKind::Aakelm}, {0}));
  REQUIRE(table.cells.size() == 2);
  CHECK_FALSE(table.cells[0].ok());
  CHECK(table.cells[1].ok());
  const std::string summary = render(kelm::write_summary, table);
  CHECK(summary.find("tiny") != std::string::npos);
  CHECK(render(kelm::write_results_csv, table).find("error") != std::string::npos);
}

TEST_CASE("manifest entries resolve relative to the manifest") {
  const auto dir = std::filesystem::temp_directory_path() / "kelm_manifest_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / "d.csv");
    csv << "a,b,cls\n";
    for (int i = 0; i < 10; ++i) csv << i << ',' << i * i << ',' << (i < 6 ? "yes" : "no") << '\n';
    std::ofstream m(dir / "m.json");
    m << R"({"datasets": [{"name": "d", "path": "d.csv", "label_column": "cls", "target_label": "yes"}]})";
  }
  const auto entries = kelm::load_manifest(dir / "m.json");
  REQUIRE(entries.size() == 1);
  const auto sets = kelm::load_datasets(entries);
  CHECK(sets[0].name == "d");
  CHECK(sets[0].target_count() == 6);
  {
    std::ofstream m(dir / "bad.json");
    m << R"({"datasets": [{"name": "d"}]})";
  }
  CHECK_THROWS_AS(kelm::load_manifest(dir / "bad.json"), kelm::DataError);
  std::filesystem::remove_all(dir);
}
