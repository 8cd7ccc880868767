#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "../oracles.hpp"
#include "kelm/dataset.hpp"
#include "kelm/error.hpp"
#include "kelm/synthetic.hpp"

using kelm::CsvOptions;
using kelm::Label;
using kelm::LabeledDataset;
using kelm::Matrix;

namespace {

LabeledDataset parse(const std::string& text, CsvOptions opts) {
  std::istringstream in(text);
  return kelm::parse_csv(in, opts, "mem");
}

LabeledDataset blobs(std::size_t targets, std::size_t outliers) {
  kelm::SynthSpec s;
  s.n_target = targets;
  s.n_outlier = outliers;
  return kelm::make_synthetic(s);
}

std::size_t count_targets(const LabeledDataset& ds, const std::vector<std::size_t>& idx) {
  return static_cast<std::size_t>(
      std::count_if(idx.begin(), idx.end(), [&](std::size_t i) { return ds.labels[i] == Label::Target; }));
}

}  // namespace

TEST_CASE("csv labels by target value") {
  const auto ds = parse("x,y,cls\n1,2,a\n3,4,a\n5,6,b\n", {"cls", "a", true});
  CHECK(ds.x == Matrix{{1, 2}, {3, 4}, {5, 6}});
  CHECK(ds.labels == std::vector<Label>{Label::Target, Label::Target, Label::Outlier});
  CHECK(ds.feature_names == std::vector<std::string>{"x", "y"});
  CHECK(ds.target_count() == 2);
}

TEST_CASE("csv label column by index, negative index and without header") {
  const auto a = parse("a,1,2\nb,3,4\n", {"0", "a", false});
  CHECK(a.x == Matrix{{1, 2}, {3, 4}});
  CHECK(a.labels == std::vector<Label>{Label::Target, Label::Outlier});
  const auto b = parse("1,2,t\n3,4,o\n", {"-1", "t", false});
  CHECK(b.x == Matrix{{1, 2}, {3, 4}});
  const auto c = parse("1,2\n3,4\n", {std::nullopt, "", false});
  CHECK(c.target_count() == 2);
}

TEST_CASE("csv parse error names row and column") {
  try {
    parse("f1,f2,f3,label\n1,2,oops,a\n", {"label", "a", true});
    FAIL("expected DataError");
  } catch (const kelm::DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 2") != std::string::npos);
    CHECK(msg.find("column 3") != std::string::npos);
  }
}

TEST_CASE("csv structural errors") {
  CHECK_THROWS_AS(parse("a,b\n1,x\n", {"missing", "x", true}), kelm::DataError);
  CHECK_THROWS_AS(parse("a,b\n1,x\n", {"5", "x", true}), kelm::DataError);
  CHECK_THROWS_AS(parse("a,b\n1,y\n2,y\n", {"b", "x", true}), kelm::DataError);
  CHECK_THROWS_AS(parse("a,b\n1,x\n2\n", {"b", "x", true}), kelm::DataError);
  CHECK_THROWS_AS(parse("a,b\n", {"b", "x", true}), kelm::DataError);
  CHECK_THROWS_AS(kelm::load_csv("/nonexistent/file.csv", {"b", "x", true}), kelm::DataError);
}

TEST_CASE("csv loader counts a 699-row file with 241 targets") {
  std::ostringstream text;
  text << "f1,f2,f3,f4,f5,f6,f7,f8,f9,class\n";
  for (int i = 0; i < 699; ++i) {
    for (int j = 0; j < 9; ++j) text << (i + j) % 10 + 1 << ',';
    text << (i < 241 ? "Malignant" : "Benign") << '\n';
  }
  const auto ds = parse(text.str(), {"class", "Malignant", true});
  CHECK(ds.x.rows() == 699);
  CHECK(ds.x.cols() == 9);
  CHECK(ds.target_count() == 241);
}

TEST_CASE("write_csv round trips exactly") {
  const auto ds = blobs(12, 5);
  std::ostringstream out;
  kelm::write_csv(out, ds, "target", "outlier");
  const auto back = parse(out.str(), {"label", "target", true});
  CHECK(back.x == ds.x);
  CHECK(back.labels == ds.labels);
}

TEST_CASE("zscore examples") {
  const Matrix x{{1.0, 5.0}, {3.0, 5.0}};
  const auto stats = kelm::zscore_fit(x);
  CHECK(stats.mean == std::vector<double>{2.0, 5.0});
  CHECK(stats.stddev == std::vector<double>{1.0, 1.0});
  CHECK(kelm::zscore_apply(x, stats) == Matrix{{-1.0, 0.0}, {1.0, 0.0}});
  const auto c = kelm::zscore_fit(Matrix{{5}, {5}, {5}});
  CHECK(c.stddev[0] == 1.0);
  CHECK(kelm::zscore_apply(Matrix{{5}, {5}, {5}}, c) == Matrix{{0}, {0}, {0}});
  CHECK_THROWS(kelm::zscore_fit(Matrix{{1, 2}}));
  CHECK_THROWS_AS(kelm::zscore_apply(Matrix(2, 3), stats), kelm::DimensionError);
}

TEST_CASE("zscore output has zero mean and unit population std") {
  kelm::Rng rng(61);
  const Matrix x = oracle::random_matrix(rng, 40, 4, 7.0);
  const Matrix z = kelm::zscore_apply(x, kelm::zscore_fit(x));
  for (std::size_t j = 0; j < 4; ++j) {
    double m = 0.0, v = 0.0;
    for (std::size_t i = 0; i < 40; ++i) m += z(i, j) / 40.0;
    for (std::size_t i = 0; i < 40; ++i) v += (z(i, j) - m) * (z(i, j) - m) / 40.0;
    CHECK(std::abs(m) <= 1e-12);
    CHECK(std::abs(std::sqrt(v) - 1.0) <= 1e-12);
  }
}

TEST_CASE("split_80_20 proportions and partition") {
  const auto ds = blobs(100, 50);
  const auto plan = kelm::split_80_20(ds, 3);
  CHECK(plan.test.size() == 30);
  CHECK(count_targets(ds, plan.test) == 20);
  CHECK(count_targets(ds, plan.cv_pool) == 80);
  CHECK(plan.cv_pool.size() == 120);
  std::set<std::size_t> all(plan.cv_pool.begin(), plan.cv_pool.end());
  all.insert(plan.test.begin(), plan.test.end());
  CHECK(all.size() == 150);
  CHECK(std::is_sorted(plan.test.begin(), plan.test.end()));
}

TEST_CASE("split_80_20 determinism and seed sensitivity") {
  const auto ds = blobs(100, 50);
  CHECK(kelm::split_80_20(ds, 7) == kelm::split_80_20(ds, 7));
  CHECK(kelm::split_80_20(ds, 7).test != kelm::split_80_20(ds, 8).test);
  CHECK_THROWS_AS(kelm::split_80_20(blobs(3, 1), 0), kelm::DataError);
}

TEST_CASE("split_80_20 stratification bound") {
  for (std::size_t t : {17, 33, 64}) {
    for (std::size_t o : {5, 11, 29}) {
      const auto ds = blobs(t, o);
      const auto plan = kelm::split_80_20(ds, t * o);
      const double full = static_cast<double>(t) / static_cast<double>(t + o);
      const double test = static_cast<double>(count_targets(ds, plan.test)) /
                          static_cast<double>(plan.test.size());
      CHECK(std::abs(test - full) <= 1.0 / static_cast<double>(plan.test.size()));
    }
  }
}

TEST_CASE("make_folds arithmetic example") {
  const auto ds = blobs(10, 5);
  std::vector<std::size_t> pool(15);
  std::iota(pool.begin(), pool.end(), 0);
  const auto plan = kelm::make_folds(ds, pool, 1);
  REQUIRE(plan.folds.size() == 5);
  for (const auto& f : plan.folds) {
    CHECK(f.train_targets.size() == 8);
    CHECK(f.validation.size() == 3);
    CHECK(count_targets(ds, f.validation) == 2);
  }
}

TEST_CASE("make_folds partitions targets and outliers and trains on targets only") {
  const auto ds = blobs(47, 23);
  const auto split = kelm::split_80_20(ds, 2);
  const auto plan = kelm::make_folds(ds, split.cv_pool, 2);
  std::multiset<std::size_t> validation;
  for (const auto& f : plan.folds) {
    validation.insert(f.validation.begin(), f.validation.end());
    for (std::size_t i : f.train_targets) CHECK(ds.labels[i] == Label::Target);
    std::set<std::size_t> train(f.train_targets.begin(), f.train_targets.end());
    for (std::size_t v : f.validation) CHECK(train.count(v) == 0);
  }
  CHECK(validation == std::multiset<std::size_t>(split.cv_pool.begin(), split.cv_pool.end()));
  CHECK_THROWS_AS(kelm::make_folds(blobs(4, 3), std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6}, 0),
                  kelm::DataError);
}

TEST_CASE("synthetic generator") {
  kelm::SynthSpec s;
  s.n_target = 100;
  s.n_outlier = 50;
  s.seed = 4;
  const auto a = kelm::make_synthetic(s);
  CHECK(a.x.rows() == 150);
  CHECK(a.target_count() == 100);
  CHECK(kelm::make_synthetic(s).x == a.x);
  for (std::size_t i = 100; i < 150; ++i) {
    double r2 = 0.0;
    for (double v : a.x.row(i)) r2 += v * v;
    CHECK(std::sqrt(r2) >= s.separation - 1e-9);
    CHECK(std::sqrt(r2) <= 1.5 * s.separation + 1e-9);
  }
  CHECK(kelm::synthetic_suite().size() == 5);
}
