// matbench: dense matrix-multiplication kernels, a benchmark harness, and an
// analytic device execution model behind one command-line entry point.
//
// Exit codes: 0 success, 1 runtime/verification failure, 2 usage/validation
// error.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "matbench/bench.hpp"
#include "matbench/exec_model.hpp"
#include "matbench/kernels.hpp"
#include "matbench/matrix.hpp"
#include "matbench/report.hpp"

namespace fs = std::filesystem;
using matbench::Precision;
namespace kernels = matbench::kernels;
namespace bench = matbench::bench;
namespace model = matbench::model;
namespace report = matbench::report;

namespace {

std::vector<Precision> parse_precisions(const std::vector<std::string>& names) {
  std::vector<Precision> out;
  out.reserve(names.size());
  for (const auto& name : names) out.push_back(matbench::precision_from_string(name));
  return out;
}

std::vector<kernels::Backend> parse_backends(const std::vector<std::string>& names) {
  std::vector<kernels::Backend> out;
  out.reserve(names.size());
  for (const auto& name : names) out.push_back(kernels::backend_from_string(name));
  return out;
}

std::string fmt_general(double v, int precision) {
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, precision);
  return std::string(buf, res.ptr);
}

const char* yes_no(bool v) { return v ? "yes" : "no"; }

// Resolve --device: preset names win; anything else must be a spec file.
model::DeviceSpec resolve_device(const std::string& device) {
  try {
    return model::device_preset(device);
  } catch (const std::invalid_argument&) {
    if (fs::exists(device)) return model::load_device_spec(device);
    throw std::invalid_argument("'" + device +
                                "' is neither a device preset nor a spec file "
                                "(presets: geforce-940m)");
  }
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchOptions {
  bench::BenchmarkConfig cfg = bench::default_config();
  std::vector<std::string> precision_names;
  std::vector<std::string> backend_names;
  std::size_t workers = 0;  // 0 = env var / hardware default
  std::string out_path = "results.csv";
};

int run_bench(BenchOptions& opt) {
  if (!opt.precision_names.empty()) opt.cfg.precisions = parse_precisions(opt.precision_names);
  if (!opt.backend_names.empty()) opt.cfg.backends = parse_backends(opt.backend_names);
  opt.cfg.workers = opt.workers > 0 ? opt.workers : bench::default_workers();
  bench::validate(opt.cfg);

  std::vector<bench::SweepFailure> failures;
  const std::vector<bench::BenchmarkRecord> records =
      bench::sweep(opt.cfg, &failures, &std::cerr);
  report::write_csv(records, opt.out_path);
  if (!records.empty()) std::cout << report::summary_table(records) << "\n";
  std::cout << "wrote " << records.size() << " records to " << opt.out_path << "\n";
  if (!failures.empty()) {
    std::cerr << failures.size() << " case(s) failed\n";
    return 1;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

int run_verify(const kernels::VerifyConfig& cfg) {
  const std::vector<kernels::VerifyCase> cases = kernels::run_oracle_verification(cfg);
  std::size_t passed = 0;
  for (const auto& c : cases) {
    std::cout << (c.passed ? "ok   " : "FAIL ") << kernels::to_string(c.backend) << " "
              << matbench::to_string(c.precision) << " size=" << c.size << " tile=" << c.tile
              << " workers=" << c.workers;
    if (!c.passed)
      std::cout << "  first mismatch at (" << c.mismatch->row << ", " << c.mismatch->col
                << "): " << c.mismatch->a << " vs " << c.mismatch->b;
    std::cout << "\n";
    if (c.passed) ++passed;
  }
  std::cout << passed << "/" << cases.size() << " cases match the oracle bitwise\n";
  return passed == cases.size() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// model
// ---------------------------------------------------------------------------

struct ModelOptions {
  std::string device = "geforce-940m";
  std::size_t size = 2048;
  std::size_t tile = 32;
  std::string precision_name = "single";
  bool json = false;
};

int run_model(const ModelOptions& opt) {
  const model::DeviceSpec spec = resolve_device(opt.device);
  const Precision precision = matbench::precision_from_string(opt.precision_name);
  const model::GridPlan plan = model::plan_grid(opt.size, opt.size, opt.tile);
  const model::Occupancy occ = model::occupancy(spec, plan.block_threads);
  const model::SharedMemFit shared = model::shared_mem_fit(spec, opt.tile, precision);
  const model::Footprint fp = model::footprint(opt.size, opt.size, opt.size, precision, spec);
  const model::LoadModel naive = model::global_load_model(opt.size, opt.size, opt.size);
  const model::LoadModel tiled =
      model::global_load_model(opt.size, opt.size, opt.size, opt.tile);
  const double ratio =
      static_cast<double>(naive.total_loads) / static_cast<double>(tiled.total_loads);

  if (opt.json) {
    nlohmann::ordered_json j;
    j["device"] = spec.name;
    j["size"] = opt.size;
    j["tile"] = opt.tile;
    j["precision"] = matbench::to_string(precision);
    j["grid_x"] = plan.grid_x;
    j["grid_y"] = plan.grid_y;
    j["block_threads"] = plan.block_threads;
    j["exact_fit"] = plan.exact_fit;
    j["warps_per_block"] = occ.warps_per_block;
    j["blocks_per_sm"] = occ.blocks_per_sm;
    j["threads_per_sm"] = occ.threads_per_sm;
    j["block_valid"] = occ.valid;
    j["shared_bytes_needed"] = shared.bytes_needed;
    j["shared_bytes_per_sm"] = spec.shared_mem_bytes_per_sm;
    j["shared_fits"] = shared.fits;
    j["footprint_bytes"] = fp.bytes_total;
    j["global_mem_bytes"] = spec.global_mem_bytes;
    j["footprint_fits"] = fp.fits_global;
    j["naive_loads_a"] = naive.loads_a;
    j["naive_loads_b"] = naive.loads_b;
    j["naive_total_loads"] = naive.total_loads;
    j["tiled_loads_a"] = tiled.loads_a;
    j["tiled_loads_b"] = tiled.loads_b;
    j["tiled_total_loads"] = tiled.total_loads;
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  std::cout << "device: " << spec.name << "\n";
  std::cout << "matrix: " << opt.size << " x " << opt.size << " x " << opt.size
            << ", tile: " << opt.tile << ", precision: " << matbench::to_string(precision)
            << "\n";
  std::cout << "grid: " << plan.grid_x << " x " << plan.grid_y << " blocks, "
            << plan.block_threads << " threads/block, exact fit: " << yes_no(plan.exact_fit)
            << "\n";
  std::cout << "occupancy: " << occ.warps_per_block << " warps/block, " << occ.blocks_per_sm
            << " blocks/SM, " << occ.threads_per_sm
            << " threads/SM, block size valid: " << yes_no(occ.valid) << "\n";
  std::cout << "shared memory: " << shared.bytes_needed << " bytes needed of "
            << spec.shared_mem_bytes_per_sm << " per SM, fits: " << yes_no(shared.fits)
            << "\n";
  std::cout << "footprint: " << fp.bytes_total << " bytes ("
            << fmt_general(static_cast<double>(fp.bytes_total) / 1048576.0, 6)
            << " MiB) of " << spec.global_mem_bytes
            << " bytes global, fits: " << yes_no(fp.fits_global) << "\n";
  std::cout << "global loads naive: A=" << naive.loads_a << ", B=" << naive.loads_b
            << ", total=" << naive.total_loads << "\n";
  std::cout << "global loads tiled: A=" << tiled.loads_a << ", B=" << tiled.loads_b
            << ", total=" << tiled.total_loads << "\n";
  std::cout << "naive/tiled load ratio: " << fmt_general(ratio, 6) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// plot
// ---------------------------------------------------------------------------

struct PlotOptions {
  std::string in_path = "results.csv";
  std::string kind = "gflops";
  std::string baseline_name;
  std::string target_name;
  std::string out_dir = ".";
};

int run_plot(const PlotOptions& opt) {
  kernels::Backend baseline{};
  kernels::Backend target{};
  if (opt.kind == "speedup") {
    if (opt.baseline_name.empty() || opt.target_name.empty())
      throw std::invalid_argument("--baseline and --target are required for --kind speedup");
    baseline = kernels::backend_from_string(opt.baseline_name);
    target = kernels::backend_from_string(opt.target_name);
  }

  const std::vector<bench::BenchmarkRecord> records = report::read_csv(opt.in_path);
  if (records.empty()) throw std::runtime_error("no records in '" + opt.in_path + "'");

  std::map<std::pair<int, std::size_t>, std::vector<const bench::BenchmarkRecord*>> groups;
  for (const auto& r : records)
    groups[{static_cast<int>(r.precision), r.reps}].push_back(&r);

  fs::create_directories(opt.out_dir);
  for (const auto& [key, group] : groups) {
    const auto precision = static_cast<Precision>(key.first);
    const std::size_t reps = key.second;
    const std::string group_tag =
        matbench::to_string(precision) + " precision, reps=" + std::to_string(reps);

    report::ChartSpec chart;
    chart.x_log2 = true;
    chart.x_label = "matrix order";

    if (opt.kind == "speedup") {
      std::set<std::size_t> tiles;
      for (const auto* r : group) tiles.insert(r->tile);
      chart.title = "speedup " + kernels::to_string(target) + " vs " +
                    kernels::to_string(baseline) + " (" + group_tag + ")";
      chart.y_label = "speedup";
      for (const std::size_t tile : tiles) {
        report::ChartSeries series = report::derive_speedup_series(
            records, baseline, target, {precision, tile, reps});
        series.label = "tile=" + std::to_string(tile);
        chart.series.push_back(std::move(series));
      }
    } else {
      const bool time_kind = opt.kind == "time";
      chart.title = std::string(time_kind ? "time" : "GFLOPS") + " vs matrix order (" +
                    group_tag + ")";
      chart.y_label = time_kind ? "seconds per multiply" : "GFLOPS";
      std::map<std::pair<int, std::size_t>, std::map<std::size_t, double>> by_series;
      for (const auto* r : group) {
        auto& points = by_series[{static_cast<int>(r->backend), r->tile}];
        if (!points.emplace(r->m, time_kind ? r->avg_seconds : r->gflops).second)
          throw std::runtime_error("duplicate record for " +
                                   kernels::to_string(r->backend) + " tile=" +
                                   std::to_string(r->tile) + " size=" + std::to_string(r->m) +
                                   " (" + group_tag + ")");
      }
      for (const auto& [series_key, points] : by_series) {
        report::ChartSeries series;
        series.label = kernels::to_string(static_cast<kernels::Backend>(series_key.first)) +
                       " tile=" + std::to_string(series_key.second);
        for (const auto& [size, y] : points)
          series.points.emplace_back(static_cast<double>(size), y);
        chart.series.push_back(std::move(series));
      }
    }

    const fs::path out_path = fs::path(opt.out_dir) /
                              (opt.kind + "-" + matbench::to_string(precision) + "-reps" +
                               std::to_string(reps) + ".svg");
    report::render_chart(chart, out_path.string());
    std::cout << "wrote " << out_path.string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dense matmul kernel benchmarks and analytic device model"};
  app.require_subcommand(1);

  // --- bench ---------------------------------------------------------------
  BenchOptions bench_opt;
  CLI::App* cmd_bench = app.add_subcommand("bench", "run a benchmark sweep and write CSV");
  cmd_bench->add_option("--sizes", bench_opt.cfg.sizes, "square matrix orders")
      ->delimiter(',')
      ->capture_default_str();
  cmd_bench->add_option("--tiles", bench_opt.cfg.tiles, "tile edge lengths")
      ->delimiter(',')
      ->capture_default_str();
  cmd_bench
      ->add_option("--precisions", bench_opt.precision_names,
                   "element precisions (single|double), default both")
      ->delimiter(',');
  cmd_bench
      ->add_option("--reps", bench_opt.cfg.reps_list, "repetition counts per timed batch")
      ->delimiter(',')
      ->capture_default_str();
  cmd_bench
      ->add_option("--backends", bench_opt.backend_names,
                   "backends (naive-seq|tiled-seq|tiled-par|naive-par), default all")
      ->delimiter(',');
  cmd_bench->add_option("--workers", bench_opt.workers,
                        "worker threads for parallel backends (default: " +
                            std::string(bench::kWorkersEnvVar) +
                            " env var, else hardware concurrency)");
  cmd_bench->add_option("--seed", bench_opt.cfg.seed, "fill-data seed")
      ->capture_default_str();
  cmd_bench->add_flag("--exact-fit", bench_opt.cfg.exact_fit,
                      "refuse sizes not divisible by every tile");
  cmd_bench->add_option("--warmup", bench_opt.cfg.warmup_runs, "untimed runs per case")
      ->capture_default_str();
  cmd_bench->add_flag("--copy-tiles", bench_opt.cfg.copy_tiles,
                      "stage tiles into contiguous scratch buffers");
  cmd_bench->add_option("--out", bench_opt.out_path, "output CSV path")
      ->capture_default_str();

  // --- verify ----------------------------------------------------------------
  kernels::VerifyConfig verify_cfg;
  std::vector<std::string> verify_precision_names;
  CLI::App* cmd_verify =
      app.add_subcommand("verify", "check every backend bitwise against the oracle");
  cmd_verify->add_option("--sizes", verify_cfg.sizes, "square matrix orders")
      ->delimiter(',')
      ->capture_default_str();
  cmd_verify->add_option("--tiles", verify_cfg.tiles, "tile edge lengths")
      ->delimiter(',')
      ->capture_default_str();
  cmd_verify
      ->add_option("--workers", verify_cfg.worker_counts, "worker counts to exercise")
      ->delimiter(',')
      ->capture_default_str();
  cmd_verify
      ->add_option("--precisions", verify_precision_names,
                   "element precisions (single|double), default both")
      ->delimiter(',');
  cmd_verify->add_option("--seed", verify_cfg.seed, "fill-data seed")->capture_default_str();
  cmd_verify->add_flag("--copy-tiles", verify_cfg.copy_tiles,
                       "stage tiles into contiguous scratch buffers");

  // --- model -----------------------------------------------------------------
  ModelOptions model_opt;
  bool model_json = false;
  CLI::App* cmd_model =
      app.add_subcommand("model", "analytic grid/occupancy/memory arithmetic for a device");
  cmd_model->add_option("--device", model_opt.device, "device preset name or spec file")
      ->capture_default_str();
  cmd_model->add_option("--size", model_opt.size, "square matrix order")
      ->capture_default_str();
  cmd_model->add_option("--tile", model_opt.tile, "tile edge length")->capture_default_str();
  cmd_model
      ->add_option("--precision", model_opt.precision_name, "element precision "
                                                            "(single|double)")
      ->capture_default_str();
  cmd_model->add_flag("--json", model_json, "emit flat JSON instead of text");

  // --- plot ------------------------------------------------------------------
  PlotOptions plot_opt;
  CLI::App* cmd_plot =
      app.add_subcommand("plot", "render SVG charts from a benchmark CSV");
  cmd_plot->add_option("--in", plot_opt.in_path, "input CSV path")->capture_default_str();
  cmd_plot
      ->add_option("--kind", plot_opt.kind, "chart kind (gflops|time|speedup)")
      ->check(CLI::IsMember({"gflops", "time", "speedup"}))
      ->capture_default_str();
  cmd_plot->add_option("--baseline", plot_opt.baseline_name,
                       "baseline backend for speedup charts");
  cmd_plot->add_option("--target", plot_opt.target_name,
                       "candidate backend for speedup charts");
  cmd_plot->add_option("--out-dir", plot_opt.out_dir, "output directory")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmd_bench->parsed()) return run_bench(bench_opt);
    if (cmd_verify->parsed()) {
      if (!verify_precision_names.empty())
        verify_cfg.precisions = parse_precisions(verify_precision_names);
      return run_verify(verify_cfg);
    }
    if (cmd_model->parsed()) {
      model_opt.json = model_json;
      return run_model(model_opt);
    }
    if (cmd_plot->parsed()) return run_plot(plot_opt);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
