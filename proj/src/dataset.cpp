#include "kelm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "kelm/error.hpp"
#include "kelm/random.hpp"

namespace kelm {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  std::string out(s.substr(b, e - b));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') {
    out = out.substr(1, out.size() - 2);
  }
  return out;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(trim(std::string_view(line).substr(start)));
      break;
    }
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

bool parse_double(const std::string& cell, double& out) {
  const char* first = cell.data();
  const char* last = first + cell.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::size_t resolve_label_column(const std::string& spec, const std::vector<std::string>& header,
                                 std::size_t width) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == spec) return i;
  }
  long long index = 0;
  const auto [ptr, ec] = std::from_chars(spec.data(), spec.data() + spec.size(), index);
  if (ec != std::errc() || ptr != spec.data() + spec.size()) {
    throw DataError("label column '" + spec + "' not found in header");
  }
  if (index < 0) index += static_cast<long long>(width);
  if (index < 0 || index >= static_cast<long long>(width)) {
    throw DataError("label column index " + spec + " out of range for " + std::to_string(width) +
                    " columns");
  }
  return static_cast<std::size_t>(index);
}

}  // namespace

std::size_t LabeledDataset::target_count() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label::Target));
}

std::vector<std::size_t> LabeledDataset::indices_of(Label label) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) out.push_back(i);
  }
  return out;
}

LabeledDataset parse_csv(std::istream& in, const CsvOptions& options, std::string name) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  std::optional<std::size_t> label_col;
  std::size_t width = 0;
  std::vector<double> values;
  std::vector<Label> labels;
  std::size_t rows = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_line(line);
    if (width == 0) {
      width = cells.size();
      if (options.has_header) header = cells;
      if (options.label_column) {
        label_col = resolve_label_column(*options.label_column, header, width);
      }
      if (options.has_header) continue;
    }
    if (cells.size() != width) {
      throw DataError(name + ": line " + std::to_string(line_no) + " has " +
                      std::to_string(cells.size()) + " columns, expected " +
                      std::to_string(width));
    }
    for (std::size_t c = 0; c < width; ++c) {
      if (label_col && c == *label_col) continue;
      double v = 0.0;
      if (!parse_double(cells[c], v)) {
        throw DataError(name + ": cannot parse '" + cells[c] + "' as a number at row " +
                        std::to_string(line_no) + ", column " + std::to_string(c + 1));
      }
      values.push_back(v);
    }
    if (label_col) {
      labels.push_back(cells[*label_col] == options.target_label ? Label::Target
                                                                  : Label::Outlier);
    } else {
      labels.push_back(Label::Target);
    }
    ++rows;
  }

  if (rows == 0) throw DataError(name + ": no data rows");
  const std::size_t features = width - (label_col ? 1 : 0);
  if (features == 0) throw DataError(name + ": no feature columns");

  LabeledDataset ds;
  ds.x = Matrix(rows, features, std::move(values));
  ds.labels = std::move(labels);
  ds.name = std::move(name);
  for (std::size_t c = 0; c < width; ++c) {
    if (label_col && c == *label_col) continue;
    ds.feature_names.push_back(options.has_header ? header[c] : "f" + std::to_string(c));
  }
  if (ds.target_count() == 0) {
    throw DataError(ds.name + ": no rows carry target label '" + options.target_label + "'");
  }
  return ds;
}

LabeledDataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_csv(in, options, path.stem().string());
}

void write_csv(std::ostream& out, const LabeledDataset& ds, const std::string& target_label,
               const std::string& outlier_label) {
  for (std::size_t c = 0; c < ds.x.cols(); ++c) {
    out << (c < ds.feature_names.size() ? ds.feature_names[c] : "f" + std::to_string(c)) << ',';
  }
  out << "label\n";
  for (std::size_t r = 0; r < ds.x.rows(); ++r) {
    for (double v : ds.x.row(r)) out << format_double(v) << ',';
    out << (ds.labels[r] == Label::Target ? target_label : outlier_label) << '\n';
  }
}

NormStats NormStats::identity(std::size_t dims) {
  return {std::vector<double>(dims, 0.0), std::vector<double>(dims, 1.0)};
}

NormStats zscore_fit(const Matrix& x) {
  if (x.rows() < 2) {
    throw DataError("zscore_fit: need at least 2 samples, got " + std::to_string(x.rows()));
  }
  const std::size_t d = x.cols();
  const double n = static_cast<double>(x.rows());
  NormStats stats{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < d; ++c) stats.mean[c] += x(r, c);
  for (double& m : stats.mean) m /= n;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      const double diff = x(r, c) - stats.mean[c];
      stats.stddev[c] += diff * diff;
    }
  }
  for (std::size_t c = 0; c < d; ++c) {
    const double s = std::sqrt(stats.stddev[c] / n);
    // constant column, up to rounding in the mean
    const double floor = 1e-12 * std::max(1.0, std::abs(stats.mean[c]));
    stats.stddev[c] = s > floor ? s : 1.0;
  }
  return stats;
}

Matrix zscore_apply(const Matrix& x, const NormStats& stats) {
  if (x.cols() != stats.dims()) {
    throw DimensionError("zscore_apply: data has " + std::to_string(x.cols()) +
                         " features, statistics have " + std::to_string(stats.dims()));
  }
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c)
      out(r, c) = (x(r, c) - stats.mean[c]) / stats.stddev[c];
  return out;
}

SplitPlan split_80_20(const LabeledDataset& ds, std::uint64_t seed) {
  if (ds.x.rows() < 5) {
    throw DataError("split_80_20: need at least 5 samples, got " + std::to_string(ds.x.rows()));
  }
  SplitPlan plan;
  plan.seed = seed;
  Rng rng(seed);
  for (Label label : {Label::Target, Label::Outlier}) {
    auto members = ds.indices_of(label);
    rng.shuffle(members);
    const std::size_t n_test = members.size() / 5;
    if (members.size() >= 5 && (n_test == 0 || n_test == members.size())) {
      throw Error("split_80_20: stratification left a class empty in one part");
    }
    plan.test.insert(plan.test.end(), members.begin(), members.begin() + n_test);
    plan.cv_pool.insert(plan.cv_pool.end(), members.begin() + n_test, members.end());
  }
  std::sort(plan.cv_pool.begin(), plan.cv_pool.end());
  std::sort(plan.test.begin(), plan.test.end());
  return plan;
}

FoldPlan make_folds(const LabeledDataset& ds, std::span<const std::size_t> pool,
                    std::uint64_t seed) {
  std::vector<std::size_t> targets;
  std::vector<std::size_t> outliers;
  for (std::size_t i : pool) {
    if (i >= ds.labels.size()) {
      throw DimensionError("make_folds: pool index " + std::to_string(i) + " out of range");
    }
    (ds.labels[i] == Label::Target ? targets : outliers).push_back(i);
  }
  if (targets.size() < kFoldCount) {
    throw DataError("make_folds: need at least 5 target samples, got " +
                    std::to_string(targets.size()));
  }
  Rng rng(seed);
  rng.shuffle(targets);
  rng.shuffle(outliers);

  auto part = [](const std::vector<std::size_t>& v, std::size_t f) {
    const std::size_t n = v.size();
    const std::size_t begin = f * n / kFoldCount;
    const std::size_t end = (f + 1) * n / kFoldCount;
    return std::vector<std::size_t>(v.begin() + begin, v.begin() + end);
  };

  FoldPlan plan;
  for (std::size_t f = 0; f < kFoldCount; ++f) {
    Fold fold;
    for (std::size_t g = 0; g < kFoldCount; ++g) {
      if (g == f) continue;
      auto t = part(targets, g);
      fold.train_targets.insert(fold.train_targets.end(), t.begin(), t.end());
    }
    std::sort(fold.train_targets.begin(), fold.train_targets.end());
    auto vt = part(targets, f);
    auto vo = part(outliers, f);
    std::sort(vt.begin(), vt.end());
    std::sort(vo.begin(), vo.end());
    fold.validation = std::move(vt);
    fold.validation.insert(fold.validation.end(), vo.begin(), vo.end());
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

}  // namespace kelm
