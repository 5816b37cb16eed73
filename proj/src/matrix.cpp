#include "matbench/matrix.hpp"

#include <cfloat>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace matbench {

std::size_t element_bytes(Precision p) {
  return p == Precision::Single ? 4 : 8;
}

std::string to_string(Precision p) {
  return p == Precision::Single ? "single" : "double";
}

Precision precision_from_string(std::string_view name) {
  if (name == "single") return Precision::Single;
  if (name == "double") return Precision::Double;
  throw std::invalid_argument("unknown precision '" + std::string(name) +
                              "' (expected single|double)");
}

double precision_epsilon(Precision p) {
  return p == Precision::Single ? static_cast<double>(FLT_EPSILON) : DBL_EPSILON;
}

namespace {

void check_dims(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0)
    throw std::invalid_argument("matrix dimensions must be positive");
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, Precision precision)
    : rows_(rows), cols_(cols), precision_(precision) {
  check_dims(rows, cols);
  if (precision == Precision::Single)
    storage_ = std::vector<float>(rows * cols, 0.0f);
  else
    storage_ = std::vector<double>(rows * cols, 0.0);
}

Matrix Matrix::zeros(std::size_t rows, std::size_t cols, Precision precision) {
  return Matrix(rows, cols, precision);
}

Matrix Matrix::identity(std::size_t order, Precision precision) {
  Matrix m(order, order, precision);
  for (std::size_t i = 0; i < order; ++i) m.set(i, i, 1.0);
  return m;
}

Matrix Matrix::random_filled(std::size_t rows, std::size_t cols, Precision precision,
                             std::uint64_t seed, FillRange range) {
  Matrix m(rows, cols, precision);
  SplitMix64 rng(seed);
  const std::size_t count = rows * cols;
  if (precision == Precision::Single) {
    float* d = m.data<float>();
    if (range == FillRange::SmallInt) {
      for (std::size_t i = 0; i < count; ++i)
        d[i] = static_cast<float>(static_cast<int>(rng.next() % 17u) - 8);
    } else {
      // top 24 bits -> [0, 1) on a 2^-24 lattice
      for (std::size_t i = 0; i < count; ++i)
        d[i] = static_cast<float>(rng.next() >> 40) * 0x1.0p-24f;
    }
  } else {
    double* d = m.data<double>();
    if (range == FillRange::SmallInt) {
      for (std::size_t i = 0; i < count; ++i)
        d[i] = static_cast<double>(static_cast<int>(rng.next() % 17u) - 8);
    } else {
      for (std::size_t i = 0; i < count; ++i)
        d[i] = static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
    }
  }
  return m;
}

double Matrix::get(std::size_t i, std::size_t j) const {
  if (i >= rows_ || j >= cols_)
    throw std::out_of_range("matrix index out of range");
  const std::size_t idx = i * cols_ + j;
  if (precision_ == Precision::Single)
    return static_cast<double>(std::get<std::vector<float>>(storage_)[idx]);
  return std::get<std::vector<double>>(storage_)[idx];
}

void Matrix::set(std::size_t i, std::size_t j, double value) {
  if (i >= rows_ || j >= cols_)
    throw std::out_of_range("matrix index out of range");
  const std::size_t idx = i * cols_ + j;
  if (precision_ == Precision::Single)
    std::get<std::vector<float>>(storage_)[idx] = static_cast<float>(value);
  else
    std::get<std::vector<double>>(storage_)[idx] = value;
}

namespace {

void check_comparable(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("matrix shape mismatch: " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                                "x" + std::to_string(b.cols()));
  if (a.precision() != b.precision())
    throw std::invalid_argument("matrix precision mismatch: " + to_string(a.precision()) +
                                " vs " + to_string(b.precision()));
}

}  // namespace

std::optional<Mismatch> first_approx_mismatch(const Matrix& a, const Matrix& b,
                                              double rel_tol, double abs_tol) {
  check_comparable(a, b);
  if (rel_tol < 0.0 || abs_tol < 0.0)
    throw std::invalid_argument("tolerances must be nonnegative");
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double x = a.get(i, j);
      const double y = b.get(i, j);
      const double diff = std::fabs(x - y);
      const double bound = std::max(abs_tol, rel_tol * std::max(std::fabs(x), std::fabs(y)));
      if (!(diff <= bound)) return Mismatch{i, j, x, y};
    }
  }
  return std::nullopt;
}

std::optional<Mismatch> first_bitwise_mismatch(const Matrix& a, const Matrix& b) {
  check_comparable(a, b);
  const bool single = a.precision() == Precision::Single;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      bool same;
      if (single) {
        const float x = a.data<float>()[i * a.cols() + j];
        const float y = b.data<float>()[i * b.cols() + j];
        same = std::memcmp(&x, &y, sizeof x) == 0;
      } else {
        const double x = a.data<double>()[i * a.cols() + j];
        const double y = b.data<double>()[i * b.cols() + j];
        same = std::memcmp(&x, &y, sizeof x) == 0;
      }
      if (!same) return Mismatch{i, j, a.get(i, j), b.get(i, j)};
    }
  }
  return std::nullopt;
}

bool approx_eq(const Matrix& a, const Matrix& b, double rel_tol, double abs_tol) {
  return !first_approx_mismatch(a, b, rel_tol, abs_tol).has_value();
}

bool bitwise_equal(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.precision() != b.precision())
    return false;
  return !first_bitwise_mismatch(a, b).has_value();
}

}  // namespace matbench
