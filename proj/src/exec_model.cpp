#include "matbench/exec_model.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <stdexcept>

namespace matbench::model {

namespace {

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

void check_positive(std::size_t v, const char* what) {
  if (v < 1) throw std::invalid_argument(std::string(what) + " must be >= 1");
}

}  // namespace

DeviceSpec geforce_940m() {
  DeviceSpec spec;
  spec.name = "geforce-940m";
  spec.sm_count = 3;
  spec.cores_per_sm = 128;
  spec.warp_size = 32;
  spec.max_threads_per_block = 1024;
  spec.max_threads_per_sm = 2048;
  spec.max_blocks_per_sm = 32;
  spec.global_mem_bytes = 2147483648ull;       // 2 GiB
  spec.shared_mem_bytes_per_sm = 49ull * 1024; // "49 KB" read as KiB
  spec.peak_gflops_single = 790.3;
  spec.peak_gflops_double = 24.7;
  return spec;
}

DeviceSpec device_preset(std::string_view name) {
  if (name == "geforce-940m") return geforce_940m();
  throw std::invalid_argument("unknown device preset '" + std::string(name) +
                              "' (available: geforce-940m)");
}

namespace {

struct FieldRef {
  enum class Kind { Size, Bytes, Real, Name } kind;
  void* ptr;
};

std::map<std::string, FieldRef, std::less<>> field_table(DeviceSpec& spec) {
  return {
      {"name", {FieldRef::Kind::Name, &spec.name}},
      {"sm_count", {FieldRef::Kind::Size, &spec.sm_count}},
      {"cores_per_sm", {FieldRef::Kind::Size, &spec.cores_per_sm}},
      {"warp_size", {FieldRef::Kind::Size, &spec.warp_size}},
      {"max_threads_per_block", {FieldRef::Kind::Size, &spec.max_threads_per_block}},
      {"max_threads_per_sm", {FieldRef::Kind::Size, &spec.max_threads_per_sm}},
      {"max_blocks_per_sm", {FieldRef::Kind::Size, &spec.max_blocks_per_sm}},
      {"global_mem_bytes", {FieldRef::Kind::Bytes, &spec.global_mem_bytes}},
      {"shared_mem_bytes_per_sm", {FieldRef::Kind::Bytes, &spec.shared_mem_bytes_per_sm}},
      {"peak_gflops_single", {FieldRef::Kind::Real, &spec.peak_gflops_single}},
      {"peak_gflops_double", {FieldRef::Kind::Real, &spec.peak_gflops_double}},
  };
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

[[noreturn]] void spec_error(const std::string& path, std::size_t line,
                             const std::string& what) {
  throw std::invalid_argument(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

DeviceSpec load_device_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open device spec file '" + path + "'");
  DeviceSpec spec;
  auto fields = field_table(spec);
  std::map<std::string, bool, std::less<>> seen;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) spec_error(path, line_no, "expected key=value");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto it = fields.find(key);
    if (it == fields.end())
      spec_error(path, line_no, "unknown key '" + std::string(key) + "'");
    if (seen[std::string(key)])
      spec_error(path, line_no, "duplicate key '" + std::string(key) + "'");
    seen[std::string(key)] = true;
    const FieldRef& ref = it->second;
    if (ref.kind == FieldRef::Kind::Name) {
      if (value.empty()) spec_error(path, line_no, "empty value for 'name'");
      *static_cast<std::string*>(ref.ptr) = std::string(value);
      continue;
    }
    if (ref.kind == FieldRef::Kind::Real) {
      double v = 0.0;
      const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc{} || end != value.data() + value.size() || v <= 0.0)
        spec_error(path, line_no, "expected a positive real for '" + std::string(key) + "'");
      *static_cast<double*>(ref.ptr) = v;
      continue;
    }
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || end != value.data() + value.size() || v == 0)
      spec_error(path, line_no, "expected a positive integer for '" + std::string(key) + "'");
    if (ref.kind == FieldRef::Kind::Bytes)
      *static_cast<std::uint64_t*>(ref.ptr) = v;
    else
      *static_cast<std::size_t*>(ref.ptr) = static_cast<std::size_t>(v);
  }
  for (const auto& [key, ref] : fields) {
    if (ref.kind == FieldRef::Kind::Name) continue;  // optional
    if (!seen[key])
      throw std::invalid_argument(path + ": missing key '" + key + "'");
  }
  if (spec.max_threads_per_sm < spec.max_threads_per_block)
    throw std::invalid_argument(path +
                                ": max_threads_per_sm must be >= max_threads_per_block");
  return spec;
}

GridPlan plan_grid(std::size_t rows, std::size_t cols, std::size_t tile) {
  check_positive(rows, "rows");
  check_positive(cols, "cols");
  check_positive(tile, "tile");
  GridPlan plan;
  plan.grid_x = ceil_div(cols, tile);
  plan.grid_y = ceil_div(rows, tile);
  plan.block_threads = tile * tile;
  plan.exact_fit = (cols % tile == 0) && (rows % tile == 0);
  return plan;
}

Occupancy occupancy(const DeviceSpec& spec, std::size_t block_threads) {
  check_positive(block_threads, "block_threads");
  Occupancy occ;
  occ.warps_per_block = ceil_div(block_threads, spec.warp_size);
  occ.blocks_per_sm = std::min<std::size_t>(spec.max_blocks_per_sm,
                                            spec.max_threads_per_sm / block_threads);
  occ.threads_per_sm = occ.blocks_per_sm * block_threads;
  occ.valid = block_threads <= spec.max_threads_per_block;
  return occ;
}

SharedMemFit shared_mem_fit(const DeviceSpec& spec, std::size_t tile, Precision precision) {
  check_positive(tile, "tile");
  SharedMemFit fit;
  fit.bytes_needed = 2ull * tile * tile * element_bytes(precision);
  fit.fits = fit.bytes_needed <= spec.shared_mem_bytes_per_sm;
  return fit;
}

LoadModel global_load_model(std::size_t m, std::size_t n, std::size_t w,
                            std::optional<std::size_t> tile) {
  check_positive(m, "m");
  check_positive(n, "n");
  check_positive(w, "w");
  LoadModel loads;
  if (tile) {
    check_positive(*tile, "tile");
    loads.loads_a = static_cast<std::uint64_t>(m) * n * ceil_div(w, *tile);
    loads.loads_b = static_cast<std::uint64_t>(n) * w * ceil_div(m, *tile);
  } else {
    loads.loads_a = static_cast<std::uint64_t>(m) * n * w;
    loads.loads_b = static_cast<std::uint64_t>(n) * w * m;
  }
  loads.total_loads = loads.loads_a + loads.loads_b;
  return loads;
}

Footprint footprint(std::size_t m, std::size_t n, std::size_t w, Precision precision,
                    const DeviceSpec& spec) {
  check_positive(m, "m");
  check_positive(n, "n");
  check_positive(w, "w");
  Footprint fp;
  const std::uint64_t elements = static_cast<std::uint64_t>(m) * n +
                                 static_cast<std::uint64_t>(n) * w +
                                 static_cast<std::uint64_t>(m) * w;
  fp.bytes_total = elements * element_bytes(precision);
  fp.fits_global = fp.bytes_total <= spec.global_mem_bytes;
  return fp;
}

}  // namespace matbench::model
