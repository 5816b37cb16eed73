#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "matbench/matrix.hpp"

namespace matbench::kernels {

// ---------------------------------------------------------------------------
// configuration
// ---------------------------------------------------------------------------

struct TileConfig {
  std::size_t tile = 32;
  // When set, each tile pair is staged into contiguous scratch buffers
  // (software-simulated shared memory) before the inner loops run; when
  // clear, the kernel only reorders loops. The arithmetic order per output
  // element is identical either way, so results are bitwise equal.
  bool copy_tiles = false;
};

enum class Backend { NaiveSeq, TiledSeq, TiledPar, NaivePar };

const std::array<Backend, 4>& all_backends();
std::string to_string(Backend b);
Backend backend_from_string(std::string_view name);

// ---------------------------------------------------------------------------
// multiply backends
// ---------------------------------------------------------------------------
// All kernels require a.cols == b.rows and matching precision, and return an
// (a.rows x b.cols) matrix in that precision. Per-element summation order is
// ascending k everywhere (for the tiled kernels: ascending tile index, then
// ascending k within the tile), so on exactly-representable integer data all
// backends agree bitwise.

// Correctness oracle: textbook i-j-k order with a double accumulator
// regardless of input precision, rounded to the target precision at the end.
// Deliberately implemented apart from the performance kernels.
Matrix matmul_reference(const Matrix& a, const Matrix& b);

// One output element per (i, j), native-precision accumulator.
Matrix matmul_naive(const Matrix& a, const Matrix& b);

// Tile-blocked multiply over (I, J, K) tile triples; boundary tiles are
// clamped to the matrix edge, so sizes need not be divisible by the tile.
Matrix matmul_tiled(const Matrix& a, const Matrix& b, const TileConfig& cfg);

// Tiled multiply with bands of output tile-rows statically partitioned among
// `workers` threads. Bands are disjoint, each worker runs the same region
// kernel as matmul_tiled, and all workers are joined before returning, so the
// result is bitwise independent of the worker count.
Matrix matmul_parallel(const Matrix& a, const Matrix& b, const TileConfig& cfg,
                       std::size_t workers);

// Row-banded parallel variant of the naive kernel.
Matrix matmul_naive_parallel(const Matrix& a, const Matrix& b, std::size_t workers);

// Dispatch by Backend tag. `cfg` is ignored by the naive backends and
// `workers` by the sequential ones.
Matrix run_backend(Backend backend, const Matrix& a, const Matrix& b,
                   const TileConfig& cfg, std::size_t workers = 1);

// ---------------------------------------------------------------------------
// oracle-equivalence suite
// ---------------------------------------------------------------------------

struct VerifyConfig {
  std::vector<std::size_t> sizes = {1, 2, 3, 7, 8, 31, 32, 33, 64, 100, 128};
  std::vector<std::size_t> tiles = {1, 8, 16, 32};
  std::vector<std::size_t> worker_counts = {1, 2, 3, 4, 7};
  std::vector<Precision> precisions = {Precision::Single, Precision::Double};
  std::uint64_t seed = 42;
  bool copy_tiles = false;
};

struct VerifyCase {
  Backend backend;
  Precision precision;
  std::size_t size = 0;
  std::size_t tile = 0;
  std::size_t workers = 0;
  bool passed = false;
  std::optional<Mismatch> mismatch;  // first differing element when failed
};

// Pluggable backend runner so tests can inject a corrupted kernel.
using BackendFn = std::function<Matrix(Backend, const Matrix&, const Matrix&,
                                       const TileConfig&, std::size_t)>;

// Runs every backend over the full size x tile x workers cross with
// small-int fills and compares bitwise against matmul_reference. Returns one
// VerifyCase per combination, in execution order.
std::vector<VerifyCase> run_oracle_verification(const VerifyConfig& cfg = {},
                                                const BackendFn& backend_fn = {});

}  // namespace matbench::kernels
