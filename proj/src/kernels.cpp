#include "matbench/kernels.hpp"

#include <algorithm>
#include <exception>
#include <stdexcept>
#include <thread>
#include <utility>

namespace matbench::kernels {

namespace {

void check_multiply_args(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("matmul dimension mismatch: " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " * " + std::to_string(b.rows()) +
                                "x" + std::to_string(b.cols()));
  if (a.precision() != b.precision())
    throw std::invalid_argument("matmul precision mismatch: " + to_string(a.precision()) +
                                " vs " + to_string(b.precision()));
}

void check_tile(const TileConfig& cfg) {
  if (cfg.tile < 1) throw std::invalid_argument("tile must be >= 1");
}

void check_workers(std::size_t workers) {
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
}

// Evenly split [0, count) into at most `parts` contiguous nonempty ranges.
std::vector<std::pair<std::size_t, std::size_t>> split_even(std::size_t count,
                                                            std::size_t parts) {
  std::vector<std::pair<std::size_t, std::size_t>> bands;
  if (count == 0) return bands;
  parts = std::min(parts, count);
  const std::size_t base = count / parts;
  const std::size_t extra = count % parts;
  std::size_t begin = 0;
  for (std::size_t p = 0; p < parts; ++p) {
    const std::size_t len = base + (p < extra ? 1 : 0);
    bands.emplace_back(begin, begin + len);
    begin += len;
  }
  return bands;
}

// Run one function per band on its own thread; rethrows the first exception.
template <typename Fn>
void run_banded(const std::vector<std::pair<std::size_t, std::size_t>>& bands, Fn&& fn) {
  if (bands.size() == 1) {
    fn(bands[0].first, bands[0].second);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(bands.size());
  threads.reserve(bands.size());
  for (std::size_t p = 0; p < bands.size(); ++p) {
    threads.emplace_back([&, p] {
      try {
        fn(bands[p].first, bands[p].second);
      } catch (...) {
        errors[p] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// --- naive: one dot product per output element, native accumulator --------

template <typename T>
void naive_rows(const T* a, const T* b, T* c, std::size_t n, std::size_t w,
                std::size_t row_begin, std::size_t row_end) {
  for (std::size_t i = row_begin; i < row_end; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      T acc = T(0);
      for (std::size_t k = 0; k < n; ++k) acc += a[i * n + k] * b[k * w + j];
      c[i * w + j] = acc;
    }
  }
}

// --- tiled: (I, K, J) tile sweep, i-k-j inner loops, clamped edges --------
// For a fixed output element the k order is globally ascending, matching the
// naive kernel. `c` must be zero-initialized; the function only touches rows
// in [tile_row_begin*T, tile_row_end*T), which is what makes banded
// parallelism race-free.

template <typename T>
void tiled_rows(const T* a, const T* b, T* c, std::size_t m, std::size_t n, std::size_t w,
                std::size_t tile, bool copy_tiles, std::size_t tile_row_begin,
                std::size_t tile_row_end) {
  std::vector<T> a_scratch;
  std::vector<T> b_scratch;
  if (copy_tiles) {
    a_scratch.resize(tile * tile);
    b_scratch.resize(tile * tile);
  }
  for (std::size_t ti = tile_row_begin; ti < tile_row_end; ++ti) {
    const std::size_t i0 = ti * tile;
    const std::size_t i1 = std::min(i0 + tile, m);
    for (std::size_t k0 = 0; k0 < n; k0 += tile) {
      const std::size_t k1 = std::min(k0 + tile, n);
      if (copy_tiles) {
        for (std::size_t i = i0; i < i1; ++i)
          for (std::size_t k = k0; k < k1; ++k)
            a_scratch[(i - i0) * tile + (k - k0)] = a[i * n + k];
      }
      for (std::size_t j0 = 0; j0 < w; j0 += tile) {
        const std::size_t j1 = std::min(j0 + tile, w);
        if (copy_tiles) {
          for (std::size_t k = k0; k < k1; ++k)
            for (std::size_t j = j0; j < j1; ++j)
              b_scratch[(k - k0) * tile + (j - j0)] = b[k * w + j];
          for (std::size_t i = i0; i < i1; ++i) {
            for (std::size_t k = k0; k < k1; ++k) {
              const T a_ik = a_scratch[(i - i0) * tile + (k - k0)];
              T* crow = c + i * w;
              const T* brow = b_scratch.data() + (k - k0) * tile;
              for (std::size_t j = j0; j < j1; ++j) crow[j] += a_ik * brow[j - j0];
            }
          }
        } else {
          for (std::size_t i = i0; i < i1; ++i) {
            for (std::size_t k = k0; k < k1; ++k) {
              const T a_ik = a[i * n + k];
              T* crow = c + i * w;
              const T* brow = b + k * w;
              for (std::size_t j = j0; j < j1; ++j) crow[j] += a_ik * brow[j];
            }
          }
        }
      }
    }
  }
}

template <typename T>
Matrix reference_impl(const Matrix& a, const Matrix& b) {
  const std::size_t m = a.rows(), n = a.cols(), w = b.cols();
  Matrix c(m, w, a.precision());
  const T* ad = a.data<T>();
  const T* bd = b.data<T>();
  T* cd = c.data<T>();
  // Stage B transposed in double so the inner loop is contiguous; the
  // conversions are exact and the summation order is unchanged, so this is
  // bit-identical to reading b[k*w + j] directly.
  std::vector<double> bt(n * w);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < w; ++j) bt[j * n + k] = static_cast<double>(bd[k * w + j]);
  std::vector<double> arow(n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < n; ++k) arow[k] = static_cast<double>(ad[i * n + k]);
    for (std::size_t j = 0; j < w; ++j) {
      const double* bcol = bt.data() + j * n;
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += arow[k] * bcol[k];
      cd[i * w + j] = static_cast<T>(acc);
    }
  }
  return c;
}

template <typename T>
Matrix naive_impl(const Matrix& a, const Matrix& b, std::size_t workers) {
  const std::size_t m = a.rows(), n = a.cols(), w = b.cols();
  Matrix c(m, w, a.precision());
  const T* ad = a.data<T>();
  const T* bd = b.data<T>();
  T* cd = c.data<T>();
  run_banded(split_even(m, workers), [&](std::size_t r0, std::size_t r1) {
    naive_rows<T>(ad, bd, cd, n, w, r0, r1);
  });
  return c;
}

template <typename T>
Matrix tiled_impl(const Matrix& a, const Matrix& b, const TileConfig& cfg,
                  std::size_t workers) {
  const std::size_t m = a.rows(), n = a.cols(), w = b.cols();
  Matrix c(m, w, a.precision());
  const T* ad = a.data<T>();
  const T* bd = b.data<T>();
  T* cd = c.data<T>();
  const std::size_t tile_rows = (m + cfg.tile - 1) / cfg.tile;
  run_banded(split_even(tile_rows, workers), [&](std::size_t t0, std::size_t t1) {
    tiled_rows<T>(ad, bd, cd, m, n, w, cfg.tile, cfg.copy_tiles, t0, t1);
  });
  return c;
}

}  // namespace

const std::array<Backend, 4>& all_backends() {
  static const std::array<Backend, 4> order = {Backend::NaiveSeq, Backend::TiledSeq,
                                               Backend::TiledPar, Backend::NaivePar};
  return order;
}

std::string to_string(Backend b) {
  switch (b) {
    case Backend::NaiveSeq: return "naive-seq";
    case Backend::TiledSeq: return "tiled-seq";
    case Backend::TiledPar: return "tiled-par";
    case Backend::NaivePar: return "naive-par";
  }
  throw std::invalid_argument("unknown backend tag");
}

Backend backend_from_string(std::string_view name) {
  if (name == "naive-seq") return Backend::NaiveSeq;
  if (name == "tiled-seq") return Backend::TiledSeq;
  if (name == "tiled-par") return Backend::TiledPar;
  if (name == "naive-par") return Backend::NaivePar;
  throw std::invalid_argument("unknown backend '" + std::string(name) +
                              "' (expected naive-seq|tiled-seq|tiled-par|naive-par)");
}

Matrix matmul_reference(const Matrix& a, const Matrix& b) {
  check_multiply_args(a, b);
  return a.precision() == Precision::Single ? reference_impl<float>(a, b)
                                            : reference_impl<double>(a, b);
}

Matrix matmul_naive(const Matrix& a, const Matrix& b) {
  check_multiply_args(a, b);
  return a.precision() == Precision::Single ? naive_impl<float>(a, b, 1)
                                            : naive_impl<double>(a, b, 1);
}

Matrix matmul_tiled(const Matrix& a, const Matrix& b, const TileConfig& cfg) {
  check_multiply_args(a, b);
  check_tile(cfg);
  return a.precision() == Precision::Single ? tiled_impl<float>(a, b, cfg, 1)
                                            : tiled_impl<double>(a, b, cfg, 1);
}

Matrix matmul_parallel(const Matrix& a, const Matrix& b, const TileConfig& cfg,
                       std::size_t workers) {
  check_multiply_args(a, b);
  check_tile(cfg);
  check_workers(workers);
  return a.precision() == Precision::Single ? tiled_impl<float>(a, b, cfg, workers)
                                            : tiled_impl<double>(a, b, cfg, workers);
}

Matrix matmul_naive_parallel(const Matrix& a, const Matrix& b, std::size_t workers) {
  check_multiply_args(a, b);
  check_workers(workers);
  return a.precision() == Precision::Single ? naive_impl<float>(a, b, workers)
                                            : naive_impl<double>(a, b, workers);
}

Matrix run_backend(Backend backend, const Matrix& a, const Matrix& b, const TileConfig& cfg,
                   std::size_t workers) {
  switch (backend) {
    case Backend::NaiveSeq: return matmul_naive(a, b);
    case Backend::TiledSeq: return matmul_tiled(a, b, cfg);
    case Backend::TiledPar: return matmul_parallel(a, b, cfg, workers);
    case Backend::NaivePar: return matmul_naive_parallel(a, b, workers);
  }
  throw std::invalid_argument("unknown backend tag");
}

std::vector<VerifyCase> run_oracle_verification(const VerifyConfig& cfg,
                                                const BackendFn& backend_fn) {
  const BackendFn& fn = backend_fn
                            ? backend_fn
                            : BackendFn([](Backend bk, const Matrix& a, const Matrix& b,
                                           const TileConfig& tc, std::size_t workers) {
                                return run_backend(bk, a, b, tc, workers);
                              });
  std::vector<VerifyCase> cases;
  for (Precision precision : cfg.precisions) {
    for (std::size_t size : cfg.sizes) {
      const Matrix a = Matrix::random_filled(size, size, precision,
                                             derive_stream(cfg.seed, 1), FillRange::SmallInt);
      const Matrix b = Matrix::random_filled(size, size, precision,
                                             derive_stream(cfg.seed, 2), FillRange::SmallInt);
      const Matrix ref = matmul_reference(a, b);
      for (std::size_t tile : cfg.tiles) {
        for (std::size_t workers : cfg.worker_counts) {
          for (Backend backend : all_backends()) {
            VerifyCase vc;
            vc.backend = backend;
            vc.precision = precision;
            vc.size = size;
            vc.tile = tile;
            vc.workers = workers;
            const Matrix got = fn(backend, a, b, TileConfig{tile, cfg.copy_tiles}, workers);
            vc.mismatch = first_bitwise_mismatch(got, ref);
            vc.passed = !vc.mismatch.has_value();
            cases.push_back(std::move(vc));
          }
        }
      }
    }
  }
  return cases;
}

}  // namespace matbench::kernels
