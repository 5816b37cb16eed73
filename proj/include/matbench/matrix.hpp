#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace matbench {

enum class Precision { Single, Double };

std::size_t element_bytes(Precision p);
std::string to_string(Precision p);
Precision precision_from_string(std::string_view name);

// Machine epsilon of the element type (FLT_EPSILON / DBL_EPSILON).
double precision_epsilon(Precision p);

enum class FillRange { SmallInt, UnitReal };

// splitmix64. The repo's fixed fill generator: <random> distributions are
// not pinned by the standard, so golden data would drift across toolchains.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Stable sub-stream derivation (tag 1 = A-matrix stream, tag 2 = B-matrix
// stream throughout the harness).
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t tag) {
  return SplitMix64(seed ^ (tag * 0xd1b54a32d192ed03ull)).next();
}

// Dense row-major matrix; element (i, j) lives at flat index i*cols + j.
// Storage is native float or double per the precision tag.
class Matrix {
 public:
  Matrix(std::size_t rows, std::size_t cols, Precision precision);

  static Matrix zeros(std::size_t rows, std::size_t cols, Precision precision);
  static Matrix identity(std::size_t order, Precision precision);

  // Deterministic fill: a pure function of (rows, cols, precision, seed,
  // range). SmallInt draws integers uniformly from [-8, 8] (exactly
  // representable, so products along reductions up to k = 2048 stay below
  // 2^24 and bitwise kernel comparisons are meaningful); UnitReal draws
  // uniformly from [0, 1) at the target precision.
  static Matrix random_filled(std::size_t rows, std::size_t cols, Precision precision,
                              std::uint64_t seed, FillRange range);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  Precision precision() const noexcept { return precision_; }
  std::size_t size() const noexcept { return rows_ * cols_; }

  double get(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, double value);

  // Raw typed access for kernels; T must match the precision tag.
  template <typename T>
  const T* data() const {
    return std::get<std::vector<T>>(storage_).data();
  }
  template <typename T>
  T* data() {
    return std::get<std::vector<T>>(storage_).data();
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  Precision precision_;
  std::variant<std::vector<float>, std::vector<double>> storage_;
};

struct Mismatch {
  std::size_t row = 0;
  std::size_t col = 0;
  double a = 0.0;
  double b = 0.0;
};

// First element pair violating |a-b| <= max(abs_tol, rel_tol*max(|a|,|b|)),
// scanning row-major. Shapes and precision must match.
std::optional<Mismatch> first_approx_mismatch(const Matrix& a, const Matrix& b,
                                              double rel_tol, double abs_tol);
std::optional<Mismatch> first_bitwise_mismatch(const Matrix& a, const Matrix& b);

bool approx_eq(const Matrix& a, const Matrix& b, double rel_tol, double abs_tol);

// Exact representational equality (same shape, precision, and data bytes).
bool bitwise_equal(const Matrix& a, const Matrix& b);

}  // namespace matbench
