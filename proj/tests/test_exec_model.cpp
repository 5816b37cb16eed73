#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "matbench/exec_model.hpp"

using namespace matbench;
using namespace matbench::model;

namespace {

namespace fs = std::filesystem;

struct TempFile {
  fs::path path;
  explicit TempFile(const std::string& name, const std::string& contents)
      : path(fs::temp_directory_path() / name) {
    std::ofstream out(path);
    out << contents;
  }
  ~TempFile() {
    std::error_code ec;
    fs::remove(path, ec);
  }
};

const std::string kFullSpec =
    "# custom part\n"
    "name = test-device\n"
    "sm_count = 2\n"
    "cores_per_sm = 64\n"
    "warp_size = 32\n"
    "max_threads_per_block = 512   # trailing comment\n"
    "max_threads_per_sm = 1024\n"
    "max_blocks_per_sm = 16\n"
    "\n"
    "global_mem_bytes = 1073741824\n"
    "shared_mem_bytes_per_sm = 16384\n"
    "peak_gflops_single = 100.5\n"
    "peak_gflops_double = 10.25\n";

}  // namespace

TEST_SUITE("exec_model") {

TEST_CASE("built-in preset carries the full limit sheet") {
  const DeviceSpec spec = geforce_940m();
  CHECK(spec.name == "geforce-940m");
  CHECK(spec.sm_count == 3);
  CHECK(spec.cores_per_sm == 128);
  CHECK(spec.sm_count * spec.cores_per_sm == 384);
  CHECK(spec.warp_size == 32);
  CHECK(spec.max_threads_per_block == 1024);
  CHECK(spec.max_threads_per_sm == 2048);
  CHECK(spec.max_blocks_per_sm == 32);
  CHECK(spec.global_mem_bytes == 2147483648ull);
  CHECK(spec.shared_mem_bytes_per_sm == 50176);
  CHECK(spec.peak_gflops_single == 790.3);
  CHECK(spec.peak_gflops_double == 24.7);
  CHECK(spec.max_threads_per_block % spec.warp_size == 0);
  CHECK(spec.max_threads_per_sm >= spec.max_threads_per_block);
}

TEST_CASE("preset lookup by name") {
  CHECK(device_preset("geforce-940m").sm_count == 3);
  CHECK_THROWS_AS(device_preset("rtx-9090"), std::invalid_argument);
}

TEST_CASE("plan_grid on a 100x100 matrix with tile 20 is a 5x5 grid") {
  const GridPlan plan = plan_grid(100, 100, 20);
  CHECK(plan.grid_x == 5);
  CHECK(plan.grid_y == 5);
  CHECK(plan.block_threads == 400);
  CHECK(plan.exact_fit);
}

TEST_CASE("plan_grid on 2048 with tile 32") {
  const GridPlan plan = plan_grid(2048, 2048, 32);
  CHECK(plan.grid_x == 64);
  CHECK(plan.grid_y == 64);
  CHECK(plan.block_threads == 1024);
  CHECK(plan.exact_fit);
}

TEST_CASE("plan_grid ceiling division and exact_fit flag") {
  const GridPlan plan = plan_grid(33, 33, 32);
  CHECK(plan.grid_x == 2);
  CHECK(plan.grid_y == 2);
  CHECK_FALSE(plan.exact_fit);
  CHECK_THROWS_AS(plan_grid(0, 1, 1), std::invalid_argument);
}

TEST_CASE("plan_grid matches a loop-based tile count across a sample grid") {
  for (const std::size_t rows : {1u, 2u, 31u, 32u, 33u, 100u, 2048u}) {
    for (const std::size_t cols : {1u, 7u, 32u, 33u, 320u}) {
      for (const std::size_t tile : {1u, 3u, 8u, 32u, 50u}) {
        const GridPlan plan = plan_grid(rows, cols, tile);
        std::size_t count_x = 0;
        for (std::size_t c = 0; c < cols; c += tile) ++count_x;
        std::size_t count_y = 0;
        for (std::size_t r = 0; r < rows; r += tile) ++count_y;
        CAPTURE(rows);
        CAPTURE(cols);
        CAPTURE(tile);
        CHECK(plan.grid_x == count_x);
        CHECK(plan.grid_y == count_y);
        CHECK(plan.grid_x * tile >= cols);
        CHECK(plan.grid_y * tile >= rows);
        CHECK(plan.exact_fit == (plan.grid_x * tile == cols && plan.grid_y * tile == rows));
      }
    }
  }
}

TEST_CASE("occupancy of a 1024-thread block on the preset") {
  const Occupancy occ = occupancy(geforce_940m(), 1024);
  CHECK(occ.warps_per_block == 32);
  CHECK(occ.blocks_per_sm == 2);
  CHECK(occ.threads_per_sm == 2048);
  CHECK(occ.valid);
}

TEST_CASE("blocks beyond the device limit are invalid, not an error") {
  const Occupancy occ = occupancy(geforce_940m(), 2048);
  CHECK_FALSE(occ.valid);
  CHECK(occ.blocks_per_sm == 1);  // the arithmetic itself is still reported
}

TEST_CASE("a warp-sized block is one warp") {
  const Occupancy occ = occupancy(geforce_940m(), 32);
  CHECK(occ.warps_per_block == 1);
  CHECK(occ.valid);
  CHECK(occ.blocks_per_sm == 32);  // capped by max_blocks_per_sm
}

TEST_CASE("occupancy never exceeds the per-SM thread budget") {
  const DeviceSpec spec = geforce_940m();
  for (std::size_t bt = 1; bt <= 4096; bt += 37) {
    const Occupancy occ = occupancy(spec, bt);
    CHECK(occ.blocks_per_sm * bt <= spec.max_threads_per_sm);
    CHECK(occ.threads_per_sm == occ.blocks_per_sm * bt);
  }
}

TEST_CASE("shared-memory fit for the standard tile sizes") {
  const DeviceSpec spec = geforce_940m();
  const SharedMemFit single32 = shared_mem_fit(spec, 32, Precision::Single);
  CHECK(single32.bytes_needed == 8192);
  CHECK(single32.fits);
  const SharedMemFit double32 = shared_mem_fit(spec, 32, Precision::Double);
  CHECK(double32.bytes_needed == 16384);
  CHECK(double32.fits);
  const SharedMemFit tiny = shared_mem_fit(spec, 1, Precision::Single);
  CHECK(tiny.bytes_needed == 8);
  CHECK(tiny.fits);
  const SharedMemFit huge = shared_mem_fit(spec, 128, Precision::Double);
  CHECK(huge.bytes_needed == 262144);
  CHECK_FALSE(huge.fits);
}

TEST_CASE("naive load counts: A is read once per output column") {
  const LoadModel naive = global_load_model(4, 4, 4);
  CHECK(naive.loads_a == 64);
  CHECK(naive.loads_b == 64);
  CHECK(naive.total_loads == 128);
}

TEST_CASE("tiled load counts divide the naive counts by the tile") {
  const LoadModel tiled = global_load_model(64, 64, 64, 32);
  CHECK(tiled.loads_a == 64ull * 64 * 2);
  CHECK(global_load_model(64, 64, 64).loads_a / tiled.loads_a == 32);
}

TEST_CASE("tile = 1 reproduces the naive counts for any shape") {
  for (const std::size_t m : {1u, 3u, 32u, 100u}) {
    for (const std::size_t n : {1u, 7u, 64u}) {
      for (const std::size_t w : {2u, 33u, 128u}) {
        const LoadModel naive = global_load_model(m, n, w);
        const LoadModel tiled = global_load_model(m, n, w, 1);
        CHECK(naive.loads_a == tiled.loads_a);
        CHECK(naive.loads_b == tiled.loads_b);
        CHECK(naive.total_loads == tiled.total_loads);
      }
    }
  }
}

TEST_CASE("divisible shapes give an exact naive/tiled ratio of tile") {
  for (const std::size_t size : {32u, 64u, 96u, 128u, 2048u}) {
    for (const std::size_t tile : {1u, 2u, 8u, 16u, 32u}) {
      const LoadModel naive = global_load_model(size, size, size);
      const LoadModel tiled = global_load_model(size, size, size, tile);
      CHECK(naive.total_loads % tiled.total_loads == 0);
      CHECK(naive.total_loads / tiled.total_loads == tile);
    }
  }
}

TEST_CASE("footprint of the 2048 cube") {
  const DeviceSpec spec = geforce_940m();
  const Footprint fp = footprint(2048, 2048, 2048, Precision::Double, spec);
  CHECK(fp.bytes_total == 100663296);          // 96 MiB
  CHECK(fp.bytes_total == 96ull * 1024 * 1024);
  CHECK(fp.fits_global);
  const Footprint single = footprint(2048, 2048, 2048, Precision::Single, spec);
  CHECK(single.bytes_total == 48ull * 1024 * 1024);
  CHECK(footprint(1, 1, 1, Precision::Single, spec).bytes_total == 12);
}

TEST_CASE("footprint flags configurations beyond global memory") {
  DeviceSpec spec = geforce_940m();
  spec.global_mem_bytes = 1024;
  CHECK_FALSE(footprint(64, 64, 64, Precision::Single, spec).fits_global);
}

TEST_CASE("footprint is symmetric in m and w") {
  const DeviceSpec spec = geforce_940m();
  for (const std::size_t m : {1u, 5u, 32u, 100u})
    for (const std::size_t n : {2u, 33u})
      for (const std::size_t w : {3u, 64u})
        CHECK(footprint(m, n, w, Precision::Double, spec).bytes_total ==
              footprint(w, n, m, Precision::Double, spec).bytes_total);
}

TEST_CASE("device spec files load with comments and blank lines") {
  const TempFile f("matbench-test-spec-ok.txt", kFullSpec);
  const DeviceSpec spec = load_device_spec(f.path.string());
  CHECK(spec.name == "test-device");
  CHECK(spec.sm_count == 2);
  CHECK(spec.cores_per_sm == 64);
  CHECK(spec.max_threads_per_block == 512);
  CHECK(spec.max_threads_per_sm == 1024);
  CHECK(spec.global_mem_bytes == 1073741824);
  CHECK(spec.shared_mem_bytes_per_sm == 16384);
  CHECK(spec.peak_gflops_single == 100.5);
  CHECK(spec.peak_gflops_double == 10.25);
}

TEST_CASE("device spec file errors name the offending line or key") {
  const TempFile unknown("matbench-test-spec-unknown.txt",
                         "sm_count = 2\nclock_mhz = 900\n");
  CHECK_THROWS_WITH_AS(load_device_spec(unknown.path.string()),
                       doctest::Contains(":2: unknown key 'clock_mhz'"),
                       std::invalid_argument);

  const TempFile bad_int("matbench-test-spec-badint.txt", "sm_count = many\n");
  CHECK_THROWS_WITH_AS(load_device_spec(bad_int.path.string()), doctest::Contains(":1:"),
                       std::invalid_argument);

  const TempFile dup("matbench-test-spec-dup.txt", "sm_count = 2\nsm_count = 3\n");
  CHECK_THROWS_WITH_AS(load_device_spec(dup.path.string()),
                       doctest::Contains(":2: duplicate key"), std::invalid_argument);

  const TempFile missing("matbench-test-spec-missing.txt", "sm_count = 2\n");
  CHECK_THROWS_WITH_AS(load_device_spec(missing.path.string()),
                       doctest::Contains("missing key"), std::invalid_argument);

  std::string inverted = kFullSpec;
  const auto pos = inverted.find("max_threads_per_sm = 1024");
  inverted.replace(pos, 25, "max_threads_per_sm = 256 ");
  const TempFile bad_inv("matbench-test-spec-inv.txt", inverted);
  CHECK_THROWS_WITH_AS(load_device_spec(bad_inv.path.string()),
                       doctest::Contains("max_threads_per_sm"), std::invalid_argument);

  CHECK_THROWS_AS(load_device_spec("/nonexistent/device.spec"), std::invalid_argument);
}

}  // TEST_SUITE
