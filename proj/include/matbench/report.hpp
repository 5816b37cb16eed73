#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "matbench/bench.hpp"

namespace matbench::report {

// ---------------------------------------------------------------------------
// CSV persistence
// ---------------------------------------------------------------------------

inline constexpr std::string_view kCsvHeader =
    "backend,precision,m,n,w,tile,reps,workers,total_seconds,avg_seconds,gflops";

// Header plus one row per record; reals use shortest round-trip form;
// newline is LF. to_csv returns the exact bytes write_csv persists.
std::string to_csv(const std::vector<bench::BenchmarkRecord>& records);
void write_csv(const std::vector<bench::BenchmarkRecord>& records, const std::string& path);

// Inverse of write_csv for well-formed files; errors name the line number.
std::vector<bench::BenchmarkRecord> read_csv(const std::string& path);

// ---------------------------------------------------------------------------
// charting
// ---------------------------------------------------------------------------

struct ChartSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // x strictly increasing
};

struct ChartSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool x_log2 = false;  // place x at log2(x) with major ticks at powers of two
  std::vector<ChartSeries> series;
  std::size_t width_px = 880;
  std::size_t height_px = 560;
};

struct SpeedupKey {
  Precision precision = Precision::Single;
  std::size_t tile = 0;
  std::size_t reps = 0;
};

// One point per size: (size, baseline.avg_seconds / target.avg_seconds),
// sizes ascending, over the records matching `key`. Requires exactly one
// record per (backend, size) under the key; errors list the offending sizes.
ChartSeries derive_speedup_series(const std::vector<bench::BenchmarkRecord>& records,
                                  kernels::Backend baseline, kernels::Backend target,
                                  const SpeedupKey& key);

// Standalone SVG 1.1 document: axes with tick labels, one polyline per
// series with distinct stroke styles, point markers, and a legend. Byte
// deterministic for identical specs.
std::string render_chart_svg(const ChartSpec& spec);
void render_chart(const ChartSpec& spec, const std::string& path);

// ---------------------------------------------------------------------------
// tables
// ---------------------------------------------------------------------------

// One markdown pipe table per (precision, reps) group: rows are
// backend x tile, columns are sizes, cells are GFLOPS to 4 significant
// digits. Groups and rows are deterministically ordered.
std::string summary_table(const std::vector<bench::BenchmarkRecord>& records);

}  // namespace matbench::report
