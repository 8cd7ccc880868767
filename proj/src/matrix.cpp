#include "kelm/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "kelm/error.hpp"

namespace kelm {

namespace {

constexpr double kSingularTolerance = 1e-12;

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape(a) + " vs " + shape(b));
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw DimensionError("Matrix: " + std::to_string(values_.size()) + " values for shape " +
                         std::to_string(rows_) + "x" + std::to_string(cols_));
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  values_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      throw DimensionError("Matrix: ragged initializer");
    }
    values_.insert(values_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::column(std::span<const double> values) {
  return Matrix(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
  Matrix out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= rows_) {
      throw DimensionError("select_rows: index " + std::to_string(indices[i]) +
                           " out of range for " + std::to_string(rows_) + " rows");
    }
    const auto src = row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: " + shape(a) + " times " + shape(b));
  }
  Matrix c(a.rows(), b.cols());
  // i-k-j order: each c(i, j) accumulates over k in increasing order, so the
  // result of a row does not depend on how many rows a has.
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      const auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) {
        out[j] += aik * brow[j];
      }
    }
  }
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Matrix add(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "add");
  Matrix c = a;
  auto out = c.values();
  const auto rhs = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += rhs[i];
  return c;
}

Matrix subtract(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "subtract");
  Matrix c = a;
  auto out = c.values();
  const auto rhs = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= rhs[i];
  return c;
}

Matrix scale(const Matrix& a, double factor) {
  Matrix c = a;
  for (double& v : c.values()) v *= factor;
  return c;
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.values()) m = std::max(m, std::abs(v));
  return m;
}

Matrix solve_linear(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.rows();
  if (a.cols() != n) {
    throw DimensionError("solve_linear: coefficient matrix is " + shape(a) + ", not square");
  }
  if (b.rows() != n) {
    throw DimensionError("solve_linear: right-hand side is " + shape(b) + ", expected " +
                         std::to_string(n) + " rows");
  }
  const std::size_t m = b.cols();
  Matrix lu = a;
  Matrix x = b;
  const double tolerance = kSingularTolerance * max_abs(a);

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::abs(lu(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      const double v = std::abs(lu(r, col));
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (!(best >= tolerance) || best == 0.0) {
      throw SingularMatrixError("solve_linear: matrix is singular to working precision (pivot " +
                                    std::to_string(best) + " in column " + std::to_string(col) +
                                    ")",
                                col);
    }
    if (pivot != col) {
      std::swap_ranges(lu.row(col).begin(), lu.row(col).end(), lu.row(pivot).begin());
      std::swap_ranges(x.row(col).begin(), x.row(col).end(), x.row(pivot).begin());
    }
    const double diag = lu(col, col);
    const auto pivot_row = lu.row(col);
    const auto pivot_rhs = x.row(col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = lu(r, col) / diag;
      if (factor == 0.0) continue;
      auto target = lu.row(r);
      target[col] = 0.0;
      for (std::size_t c = col + 1; c < n; ++c) target[c] -= factor * pivot_row[c];
      auto rhs = x.row(r);
      for (std::size_t c = 0; c < m; ++c) rhs[c] -= factor * pivot_rhs[c];
    }
  }

  for (std::size_t i = n; i-- > 0;) {
    auto xi = x.row(i);
    const auto lrow = lu.row(i);
    for (std::size_t k = i + 1; k < n; ++k) {
      const double coeff = lrow[k];
      if (coeff == 0.0) continue;
      const auto xk = x.row(k);
      for (std::size_t c = 0; c < m; ++c) xi[c] -= coeff * xk[c];
    }
    const double diag = lrow[i];
    for (std::size_t c = 0; c < m; ++c) xi[c] /= diag;
  }
  return x;
}

void require_finite(const Matrix& m, std::string_view what) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (!std::isfinite(m(r, c))) {
        throw DataError(std::string(what) + ": non-finite value at row " + std::to_string(r) +
                        ", column " + std::to_string(c));
      }
    }
  }
}

}  // namespace kelm
