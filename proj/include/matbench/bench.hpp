#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "matbench/kernels.hpp"
#include "matbench/matrix.hpp"

namespace matbench::bench {

// ---------------------------------------------------------------------------
// metrics
// ---------------------------------------------------------------------------

// Throughput of an (m x n) * (n x w) multiply: 2*m*n*w flops (one multiply
// plus one add per inner step) over `seconds`, in units of 1e9 flops/s.
// Computed as (flops / 1e9) / seconds so that power-of-two flop counts divide
// exactly. Throws on nonpositive time.
double gflops(std::size_t m, std::size_t n, std::size_t w, double seconds);

// Measured ratio baseline_seconds / candidate_seconds. Throws on nonpositive
// times.
double speedup(double baseline_seconds, double candidate_seconds);

// ---------------------------------------------------------------------------
// worker-count resolution
// ---------------------------------------------------------------------------

// Environment variable overriding the worker count (the CLI flag still wins
// over it). Invalid or nonpositive values are ignored.
inline constexpr const char* kWorkersEnvVar = "MATBENCH_WORKERS";

// Environment override if set and valid, else hardware concurrency (>= 1).
std::size_t default_workers();

// ---------------------------------------------------------------------------
// configuration and records
// ---------------------------------------------------------------------------

struct BenchmarkConfig {
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> tiles;
  std::vector<Precision> precisions;
  std::vector<std::size_t> reps_list;
  std::vector<kernels::Backend> backends;
  std::size_t workers = default_workers();
  std::uint64_t seed = 42;
  bool exact_fit = false;  // refuse sizes not divisible by every tile
  std::size_t warmup_runs = 1;
  bool copy_tiles = false;
};

// The default sweep grid: sizes 32..2048, tiles {8, 16, 32}, reps
// {1, 100, 1000}, both precisions, all four backends.
BenchmarkConfig default_config();

// Throws std::invalid_argument describing the first violated constraint.
void validate(const BenchmarkConfig& cfg);

struct BenchmarkRecord {
  kernels::Backend backend = kernels::Backend::NaiveSeq;
  Precision precision = Precision::Single;
  std::size_t m = 0, n = 0, w = 0;
  std::size_t tile = 0;
  std::size_t reps = 0;
  std::size_t workers = 0;
  double total_seconds = 0.0;
  double avg_seconds = 0.0;   // total_seconds / reps
  double gflops = 0.0;        // gflops(m, n, w, avg_seconds)
};

// ---------------------------------------------------------------------------
// execution
// ---------------------------------------------------------------------------

struct CaseSpec {
  kernels::Backend backend = kernels::Backend::NaiveSeq;
  Precision precision = Precision::Single;
  std::size_t size = 0;  // square order: m = n = w = size
  std::size_t tile = 32;
  std::size_t reps = 1;
  std::size_t workers = 1;
  std::uint64_t seed = 42;
  std::size_t warmup_runs = 1;
  bool copy_tiles = false;
};

// A benchmark must never silently record a wrong kernel; this error class
// distinguishes a failed result check from ordinary runtime failures.
class verification_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Compares a kernel result against the oracle result under
// rel_tol = reduction_len * epsilon(precision) * 8, abs_tol = 0; throws
// verification_error naming the first differing element.
void check_against_reference(const Matrix& result, const Matrix& reference,
                             std::size_t reduction_len);

// Single-entry memo for the oracle product of the (precision, size, seed)
// unit-real input pair; keeps a sweep from recomputing the reference for
// every backend/tile/reps combination at the same size.
class ReferenceCache {
 public:
  const Matrix& get(Precision precision, std::size_t size, std::uint64_t seed);
  std::size_t hits() const noexcept { return hits_; }
  std::size_t misses() const noexcept { return misses_; }

 private:
  bool has_ = false;
  Precision precision_ = Precision::Single;
  std::size_t size_ = 0;
  std::uint64_t seed_ = 0;
  std::optional<Matrix> value_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

// Generates unit-real inputs from seed-derived streams, performs
// `warmup_runs` untimed runs, times `reps` consecutive runs with a monotonic
// clock around the whole batch, verifies the final product against the
// oracle, and emits the record. A zero elapsed reading is clamped to the
// clock resolution and reported through `clamped` when given.
BenchmarkRecord run_case(const CaseSpec& spec, ReferenceCache* cache = nullptr,
                         bool* clamped = nullptr);

struct SweepFailure {
  CaseSpec spec;
  std::string message;
};

// Cartesian product of the config lists, nested (outer to inner) precision ->
// size -> tile -> reps -> backend, so the cached oracle product stays hot
// across the inner dimensions. Per-case failures are appended to `failures`
// (when given) and skipped, never fatal. Progress lines go to `progress`
// (when given) as cases finish.
std::vector<BenchmarkRecord> sweep(const BenchmarkConfig& cfg,
                                   std::vector<SweepFailure>* failures = nullptr,
                                   std::ostream* progress = nullptr);

}  // namespace matbench::bench
