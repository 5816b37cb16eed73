#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "matbench/matrix.hpp"

// Analytic model of a tiled multiply mapped onto a GPU-style device: grid
// decomposition, occupancy limits, shared-memory fit, global-memory traffic
// at element granularity, and device-memory footprint. Pure arithmetic; no
// GPU or runtime is involved.
namespace matbench::model {

struct DeviceSpec {
  std::string name = "custom";
  std::size_t sm_count = 0;
  std::size_t cores_per_sm = 0;
  std::size_t warp_size = 0;
  std::size_t max_threads_per_block = 0;
  std::size_t max_threads_per_sm = 0;
  std::size_t max_blocks_per_sm = 0;
  std::uint64_t global_mem_bytes = 0;
  std::uint64_t shared_mem_bytes_per_sm = 0;
  double peak_gflops_single = 0.0;
  double peak_gflops_double = 0.0;
};

// Built-in GeForce 940M limit sheet: 3 SMs x 128 cores, warp 32, 1024
// threads/block, 2048 threads/SM, 32 blocks/SM, 2 GiB global memory, 49 KiB
// shared memory per SM, peaks 790.3 / 24.7 GFLOPS. The vendor sheet says
// "49 KB"; this preset reads that as 49 x 1024 bytes.
DeviceSpec geforce_940m();

// Lookup by preset name ("geforce-940m"); throws on unknown names.
DeviceSpec device_preset(std::string_view name);

// Load a custom spec from a flat key=value text file. Keys are the DeviceSpec
// field names ('name' optional); '#' starts a comment; blank lines are
// skipped. Errors (unknown key, duplicate, bad number, missing field,
// max_threads_per_sm < max_threads_per_block) name the offending line or key.
DeviceSpec load_device_spec(const std::string& path);

// ---------------------------------------------------------------------------

struct GridPlan {
  std::size_t grid_x = 0;        // ceil(cols / tile)
  std::size_t grid_y = 0;        // ceil(rows / tile)
  std::size_t block_threads = 0; // tile^2
  bool exact_fit = false;        // tile divides both dimensions
};

GridPlan plan_grid(std::size_t rows, std::size_t cols, std::size_t tile);

struct Occupancy {
  std::size_t warps_per_block = 0;
  std::size_t blocks_per_sm = 0;
  std::size_t threads_per_sm = 0;
  bool valid = false;  // block_threads <= max_threads_per_block
};

// Invalid block sizes yield valid = false rather than an error.
Occupancy occupancy(const DeviceSpec& spec, std::size_t block_threads);

struct SharedMemFit {
  std::uint64_t bytes_needed = 0;  // one A-tile plus one B-tile resident
  bool fits = false;
};

SharedMemFit shared_mem_fit(const DeviceSpec& spec, std::size_t tile, Precision precision);

struct LoadModel {
  std::uint64_t loads_a = 0;
  std::uint64_t loads_b = 0;
  std::uint64_t total_loads = 0;
};

// Element-granularity global-memory loads for an (m x n) * (n x w) multiply.
// Without a tile: every output column rereads A and every output row rereads
// B (loads_a = m*n*w, loads_b = n*w*m). With a tile: each element enters
// shared memory once per opposing tile-stripe (loads_a = m*n*ceil(w/tile),
// loads_b = n*w*ceil(m/tile)).
LoadModel global_load_model(std::size_t m, std::size_t n, std::size_t w,
                            std::optional<std::size_t> tile = std::nullopt);

struct Footprint {
  std::uint64_t bytes_total = 0;  // (m*n + n*w + m*w) * element_bytes
  bool fits_global = false;
};

Footprint footprint(std::size_t m, std::size_t n, std::size_t w, Precision precision,
                    const DeviceSpec& spec);

}  // namespace matbench::model
