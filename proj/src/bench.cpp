#include "matbench/bench.hpp"

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <thread>

namespace matbench::bench {

double gflops(std::size_t m, std::size_t n, std::size_t w, double seconds) {
  if (!(seconds > 0.0)) throw std::invalid_argument("gflops: seconds must be positive");
  const double flops = 2.0 * static_cast<double>(m) * static_cast<double>(n) *
                       static_cast<double>(w);
  return (flops / 1e9) / seconds;
}

double speedup(double baseline_seconds, double candidate_seconds) {
  if (!(baseline_seconds > 0.0) || !(candidate_seconds > 0.0))
    throw std::invalid_argument("speedup: times must be positive");
  return baseline_seconds / candidate_seconds;
}

std::size_t default_workers() {
  if (const char* env = std::getenv(kWorkersEnvVar)) {
    const std::string_view sv(env);
    std::size_t v = 0;
    const auto [end, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
    if (ec == std::errc{} && end == sv.data() + sv.size() && v >= 1) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? hc : 1;
}

BenchmarkConfig default_config() {
  BenchmarkConfig cfg;
  cfg.sizes = {32, 64, 128, 320, 640, 1024, 2048};
  cfg.tiles = {8, 16, 32};
  cfg.precisions = {Precision::Single, Precision::Double};
  cfg.reps_list = {1, 100, 1000};
  cfg.backends = {kernels::Backend::NaiveSeq, kernels::Backend::TiledSeq,
                  kernels::Backend::TiledPar, kernels::Backend::NaivePar};
  return cfg;
}

void validate(const BenchmarkConfig& cfg) {
  if (cfg.sizes.empty()) throw std::invalid_argument("config: sizes list is empty");
  if (cfg.tiles.empty()) throw std::invalid_argument("config: tiles list is empty");
  if (cfg.precisions.empty()) throw std::invalid_argument("config: precisions list is empty");
  if (cfg.reps_list.empty()) throw std::invalid_argument("config: reps list is empty");
  if (cfg.backends.empty()) throw std::invalid_argument("config: backends list is empty");
  if (cfg.workers < 1) throw std::invalid_argument("config: workers must be >= 1");
  for (std::size_t s : cfg.sizes)
    if (s < 1) throw std::invalid_argument("config: sizes must be >= 1");
  for (std::size_t t : cfg.tiles)
    if (t < 1) throw std::invalid_argument("config: tiles must be >= 1");
  for (std::size_t r : cfg.reps_list)
    if (r < 1) throw std::invalid_argument("config: reps must be >= 1");
  if (cfg.exact_fit) {
    for (std::size_t s : cfg.sizes)
      for (std::size_t t : cfg.tiles)
        if (s % t != 0)
          throw std::invalid_argument("config: exact-fit requires every size divisible by "
                                      "every tile, but " +
                                      std::to_string(s) + " % " + std::to_string(t) +
                                      " != 0");
  }
}

void check_against_reference(const Matrix& result, const Matrix& reference,
                             std::size_t reduction_len) {
  const double rel_tol = static_cast<double>(reduction_len) *
                         precision_epsilon(result.precision()) * 8.0;
  const auto mismatch = first_approx_mismatch(result, reference, rel_tol, 0.0);
  if (!mismatch) return;
  std::ostringstream msg;
  msg << "result differs from the oracle at (" << mismatch->row << ", " << mismatch->col
      << "): got " << mismatch->a << ", expected " << mismatch->b
      << " (rel_tol " << rel_tol << ")";
  throw verification_error(msg.str());
}

const Matrix& ReferenceCache::get(Precision precision, std::size_t size,
                                  std::uint64_t seed) {
  if (has_ && precision_ == precision && size_ == size && seed_ == seed) {
    ++hits_;
    return *value_;
  }
  ++misses_;
  const Matrix a =
      Matrix::random_filled(size, size, precision, derive_stream(seed, 1), FillRange::UnitReal);
  const Matrix b =
      Matrix::random_filled(size, size, precision, derive_stream(seed, 2), FillRange::UnitReal);
  value_ = kernels::matmul_reference(a, b);
  has_ = true;
  precision_ = precision;
  size_ = size;
  seed_ = seed;
  return *value_;
}

BenchmarkRecord run_case(const CaseSpec& spec, ReferenceCache* cache, bool* clamped) {
  if (spec.size < 1) throw std::invalid_argument("case: size must be >= 1");
  if (spec.tile < 1) throw std::invalid_argument("case: tile must be >= 1");
  if (spec.reps < 1) throw std::invalid_argument("case: reps must be >= 1");
  if (spec.workers < 1) throw std::invalid_argument("case: workers must be >= 1");
  if (clamped) *clamped = false;

  const Matrix a = Matrix::random_filled(spec.size, spec.size, spec.precision,
                                         derive_stream(spec.seed, 1), FillRange::UnitReal);
  const Matrix b = Matrix::random_filled(spec.size, spec.size, spec.precision,
                                         derive_stream(spec.seed, 2), FillRange::UnitReal);
  const kernels::TileConfig tc{spec.tile, spec.copy_tiles};

  for (std::size_t i = 0; i < spec.warmup_runs; ++i)
    (void)kernels::run_backend(spec.backend, a, b, tc, spec.workers);

  using clock = std::chrono::steady_clock;
  std::optional<Matrix> result;
  const auto t0 = clock::now();
  for (std::size_t r = 0; r < spec.reps; ++r)
    result = kernels::run_backend(spec.backend, a, b, tc, spec.workers);
  const auto t1 = clock::now();

  double total = std::chrono::duration<double>(t1 - t0).count();
  if (!(total > 0.0)) {
    total = std::chrono::duration<double>(clock::duration(1)).count();
    if (clamped) *clamped = true;
  }

  const Matrix& reference = cache ? cache->get(spec.precision, spec.size, spec.seed)
                                  : kernels::matmul_reference(a, b);
  check_against_reference(*result, reference, spec.size);

  BenchmarkRecord rec;
  rec.backend = spec.backend;
  rec.precision = spec.precision;
  rec.m = rec.n = rec.w = spec.size;
  rec.tile = spec.tile;
  rec.reps = spec.reps;
  rec.workers = spec.workers;
  rec.total_seconds = total;
  rec.avg_seconds = total / static_cast<double>(spec.reps);
  rec.gflops = gflops(rec.m, rec.n, rec.w, rec.avg_seconds);
  return rec;
}

namespace {

void progress_line(std::ostream& out, const CaseSpec& spec) {
  out << kernels::to_string(spec.backend) << " " << to_string(spec.precision)
      << " size=" << spec.size << " tile=" << spec.tile << " reps=" << spec.reps
      << " workers=" << spec.workers;
}

}  // namespace

std::vector<BenchmarkRecord> sweep(const BenchmarkConfig& cfg,
                                   std::vector<SweepFailure>* failures,
                                   std::ostream* progress) {
  validate(cfg);
  std::vector<BenchmarkRecord> records;
  ReferenceCache cache;
  for (Precision precision : cfg.precisions) {
    for (std::size_t size : cfg.sizes) {
      for (std::size_t tile : cfg.tiles) {
        for (std::size_t reps : cfg.reps_list) {
          for (kernels::Backend backend : cfg.backends) {
            CaseSpec spec;
            spec.backend = backend;
            spec.precision = precision;
            spec.size = size;
            spec.tile = tile;
            spec.reps = reps;
            spec.workers = cfg.workers;
            spec.seed = cfg.seed;
            spec.warmup_runs = cfg.warmup_runs;
            spec.copy_tiles = cfg.copy_tiles;
            bool clamped = false;
            try {
              BenchmarkRecord rec = run_case(spec, &cache, &clamped);
              if (progress) {
                progress_line(*progress, spec);
                *progress << ": " << rec.total_seconds << " s total, " << rec.gflops
                          << " GFLOPS" << (clamped ? " (clamped to clock resolution)" : "")
                          << "\n";
              }
              records.push_back(rec);
            } catch (const std::exception& e) {
              if (failures) failures->push_back({spec, e.what()});
              if (progress) {
                progress_line(*progress, spec);
                *progress << ": FAILED: " << e.what() << "\n";
              }
            }
          }
        }
      }
    }
  }
  return records;
}

}  // namespace matbench::bench
