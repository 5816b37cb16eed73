#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "matbench/bench.hpp"

using namespace matbench;
using namespace matbench::bench;
using kernels::Backend;

namespace {

// Restores the worker-override environment variable on scope exit.
struct EnvGuard {
  std::string saved;
  bool had = false;
  EnvGuard() {
    if (const char* v = std::getenv(kWorkersEnvVar)) {
      saved = v;
      had = true;
    }
  }
  ~EnvGuard() {
    if (had)
      setenv(kWorkersEnvVar, saved.c_str(), 1);
    else
      unsetenv(kWorkersEnvVar);
  }
};

}  // namespace

TEST_SUITE("bench") {

TEST_CASE("gflops arithmetic is exact on the power-of-two cube") {
  CHECK(gflops(1024, 1024, 1024, 2.147483648) == 1.0);  // 2*1024^3 = 2^31 flops
  CHECK(gflops(1, 1, 1, 2e-9) == 1.0);
  CHECK(gflops(2, 3, 4, 1.0) == 4.8e-8);
  CHECK_THROWS_AS(gflops(1, 1, 1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(gflops(1, 1, 1, -1.0), std::invalid_argument);
}

TEST_CASE("speedup is the measured time ratio") {
  CHECK(speedup(50.0, 1.0) == 50.0);
  CHECK(speedup(3.7, 3.7) == 1.0);
  CHECK(speedup(1.5, 1.0) == 1.5);
  CHECK_THROWS_AS(speedup(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(speedup(1.0, -2.0), std::invalid_argument);
}

TEST_CASE("worker default honors the environment override") {
  EnvGuard guard;
  setenv(kWorkersEnvVar, "3", 1);
  CHECK(default_workers() == 3);
  setenv(kWorkersEnvVar, "0", 1);  // invalid: ignored
  CHECK(default_workers() >= 1);
  setenv(kWorkersEnvVar, "lots", 1);  // invalid: ignored
  CHECK(default_workers() >= 1);
  unsetenv(kWorkersEnvVar);
  CHECK(default_workers() >= 1);
}

TEST_CASE("default sweep grid") {
  const BenchmarkConfig cfg = default_config();
  CHECK(cfg.sizes == std::vector<std::size_t>{32, 64, 128, 320, 640, 1024, 2048});
  CHECK(cfg.tiles == std::vector<std::size_t>{8, 16, 32});
  CHECK(cfg.reps_list == std::vector<std::size_t>{1, 100, 1000});
  CHECK(cfg.precisions.size() == 2);
  CHECK(cfg.backends.size() == 4);
  CHECK(cfg.workers >= 1);
  CHECK(cfg.seed == 42);
  CHECK(cfg.warmup_runs == 1);
  CHECK_NOTHROW(validate(cfg));
  // every default size is divisible by every default tile
  BenchmarkConfig exact = cfg;
  exact.exact_fit = true;
  CHECK_NOTHROW(validate(exact));
}

TEST_CASE("config validation rejects bad inputs") {
  BenchmarkConfig cfg = default_config();
  cfg.sizes.clear();
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = default_config();
  cfg.workers = 0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = default_config();
  cfg.exact_fit = true;
  cfg.sizes = {100};
  cfg.tiles = {32};
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = default_config();
  cfg.reps_list = {0};
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
}

TEST_CASE("run_case emits a coherent record") {
  CaseSpec spec;
  spec.backend = Backend::NaiveSeq;
  spec.precision = Precision::Single;
  spec.size = 32;
  spec.tile = 32;
  spec.reps = 1;
  const BenchmarkRecord rec = run_case(spec);
  CHECK(rec.m == 32);
  CHECK(rec.n == 32);
  CHECK(rec.w == 32);
  CHECK(rec.total_seconds > 0.0);
  CHECK(rec.avg_seconds == rec.total_seconds);
  CHECK(rec.gflops == gflops(32, 32, 32, rec.avg_seconds));
}

TEST_CASE("avg_seconds is total over reps") {
  CaseSpec spec;
  spec.backend = Backend::TiledSeq;
  spec.size = 16;
  spec.tile = 8;
  spec.reps = 100;
  const BenchmarkRecord rec = run_case(spec);
  CHECK(rec.avg_seconds == rec.total_seconds / 100.0);
  CHECK(std::fabs(rec.gflops - gflops(rec.m, rec.n, rec.w, rec.avg_seconds)) <=
        1e-12 * rec.gflops);
}

TEST_CASE("run_case validates its inputs") {
  CaseSpec spec;
  spec.size = 0;
  CHECK_THROWS_AS(run_case(spec), std::invalid_argument);
  spec.size = 8;
  spec.reps = 0;
  CHECK_THROWS_AS(run_case(spec), std::invalid_argument);
}

TEST_CASE("check_against_reference throws the dedicated error class") {
  const Matrix ref = Matrix::identity(4, Precision::Double);
  Matrix off = ref;
  off.set(2, 1, 0.5);
  CHECK_NOTHROW(check_against_reference(ref, ref, 4));
  CHECK_THROWS_WITH_AS(check_against_reference(off, ref, 4), doctest::Contains("(2, 1)"),
                       verification_error);
  // verification_error is a runtime_error, not a usage error
  CHECK_THROWS_AS(check_against_reference(off, ref, 4), std::runtime_error);
}

TEST_CASE("reference cache memoizes one oracle product") {
  ReferenceCache cache;
  const Matrix& first = cache.get(Precision::Single, 16, 42);
  CHECK(cache.misses() == 1);
  const Matrix& again = cache.get(Precision::Single, 16, 42);
  CHECK(cache.hits() == 1);
  CHECK(&first == &again);
  (void)cache.get(Precision::Single, 16, 43);  // different seed: recompute
  CHECK(cache.misses() == 2);
  (void)cache.get(Precision::Double, 16, 43);
  CHECK(cache.misses() == 3);
}

TEST_CASE("sweep cardinality and execution order") {
  BenchmarkConfig cfg;
  cfg.sizes = {8, 12, 16};
  cfg.tiles = {4};
  cfg.precisions = {Precision::Single};
  cfg.reps_list = {1};
  cfg.backends = {Backend::NaiveSeq, Backend::TiledSeq};
  cfg.workers = 1;
  cfg.warmup_runs = 0;
  std::vector<SweepFailure> failures;
  const auto records = sweep(cfg, &failures);
  CHECK(failures.empty());
  REQUIRE(records.size() == 6);  // 2 backends x 1 precision x 3 sizes x 1 tile x 1 reps
  // documented nesting: precision -> size -> tile -> reps -> backend
  CHECK(records[0].m == 8);
  CHECK(records[0].backend == Backend::NaiveSeq);
  CHECK(records[1].m == 8);
  CHECK(records[1].backend == Backend::TiledSeq);
  CHECK(records[2].m == 12);
  CHECK(records[4].m == 16);
  for (const auto& rec : records) {
    CHECK(rec.total_seconds > 0.0);
    CHECK(rec.avg_seconds == rec.total_seconds / static_cast<double>(rec.reps));
  }
}

TEST_CASE("sweep records both precisions in declaration order") {
  BenchmarkConfig cfg;
  cfg.sizes = {8};
  cfg.tiles = {8};
  cfg.precisions = {Precision::Single, Precision::Double};
  cfg.reps_list = {1, 2};
  cfg.backends = {Backend::TiledPar};
  cfg.workers = 2;
  cfg.warmup_runs = 0;
  std::ostringstream progress;
  const auto records = sweep(cfg, nullptr, &progress);
  REQUIRE(records.size() == 4);
  CHECK(records[0].precision == Precision::Single);
  CHECK(records[0].reps == 1);
  CHECK(records[1].reps == 2);
  CHECK(records[2].precision == Precision::Double);
  CHECK(records[0].workers == 2);
  CHECK(progress.str().find("tiled-par") != std::string::npos);
}

TEST_CASE("sweep rejects invalid configs up front") {
  BenchmarkConfig cfg = default_config();
  cfg.backends.clear();
  CHECK_THROWS_AS(sweep(cfg), std::invalid_argument);
}

}  // TEST_SUITE
