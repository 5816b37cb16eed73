#include "matbench/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace matbench::report {

namespace {

// All numeric text goes through std::to_chars: locale-independent, and the
// default (shortest) form round-trips exactly through from_chars.
std::string fmt_shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt_fixed(double v, int precision) {
  char buf[512];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
  return std::string(buf, res.ptr);
}

std::string fmt_general(double v, int precision) {
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, precision);
  return std::string(buf, res.ptr);
}

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

[[noreturn]] void csv_error(const std::string& path, std::size_t line,
                            const std::string& what) {
  throw std::runtime_error(path + ": line " + std::to_string(line) + ": " + what);
}

}  // namespace

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

std::string to_csv(const std::vector<bench::BenchmarkRecord>& records) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : records) {
    out += kernels::to_string(r.backend);
    out += ',';
    out += to_string(r.precision);
    out += ',';
    out += std::to_string(r.m);
    out += ',';
    out += std::to_string(r.n);
    out += ',';
    out += std::to_string(r.w);
    out += ',';
    out += std::to_string(r.tile);
    out += ',';
    out += std::to_string(r.reps);
    out += ',';
    out += std::to_string(r.workers);
    out += ',';
    out += fmt_shortest(r.total_seconds);
    out += ',';
    out += fmt_shortest(r.avg_seconds);
    out += ',';
    out += fmt_shortest(r.gflops);
    out += '\n';
  }
  return out;
}

void write_csv(const std::vector<bench::BenchmarkRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  const std::string text = to_csv(records);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::size_t parse_count(std::string_view field, const std::string& path, std::size_t line,
                        const char* what) {
  std::size_t v = 0;
  const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || end != field.data() + field.size())
    csv_error(path, line, std::string("cannot parse ") + what + " from '" +
                              std::string(field) + "'");
  return v;
}

double parse_real(std::string_view field, const std::string& path, std::size_t line,
                  const char* what) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || end != field.data() + field.size())
    csv_error(path, line, std::string("cannot parse ") + what + " from '" +
                              std::string(field) + "'");
  return v;
}

}  // namespace

std::vector<bench::BenchmarkRecord> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  std::vector<bench::BenchmarkRecord> records;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line(text.data() + pos,
                          (nl == std::string::npos ? text.size() : nl) - pos);
    pos = (nl == std::string::npos) ? text.size() + 1 : nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    if (line_no == 1) {
      if (line != kCsvHeader)
        csv_error(path, 1, "expected header '" + std::string(kCsvHeader) + "'");
      continue;
    }
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 11)
      csv_error(path, line_no,
                "expected 11 fields, found " + std::to_string(fields.size()));
    bench::BenchmarkRecord r;
    try {
      r.backend = kernels::backend_from_string(fields[0]);
      r.precision = precision_from_string(fields[1]);
    } catch (const std::invalid_argument& e) {
      csv_error(path, line_no, e.what());
    }
    r.m = parse_count(fields[2], path, line_no, "m");
    r.n = parse_count(fields[3], path, line_no, "n");
    r.w = parse_count(fields[4], path, line_no, "w");
    r.tile = parse_count(fields[5], path, line_no, "tile");
    r.reps = parse_count(fields[6], path, line_no, "reps");
    r.workers = parse_count(fields[7], path, line_no, "workers");
    r.total_seconds = parse_real(fields[8], path, line_no, "total_seconds");
    r.avg_seconds = parse_real(fields[9], path, line_no, "avg_seconds");
    r.gflops = parse_real(fields[10], path, line_no, "gflops");
    records.push_back(r);
  }
  return records;
}

// ---------------------------------------------------------------------------
// speedup series
// ---------------------------------------------------------------------------

ChartSeries derive_speedup_series(const std::vector<bench::BenchmarkRecord>& records,
                                  kernels::Backend baseline, kernels::Backend target,
                                  const SpeedupKey& key) {
  std::map<std::size_t, const bench::BenchmarkRecord*> base_by_size;
  std::map<std::size_t, const bench::BenchmarkRecord*> target_by_size;
  std::set<std::size_t> duplicates;
  for (const auto& r : records) {
    if (r.precision != key.precision || r.tile != key.tile || r.reps != key.reps) continue;
    if (r.backend == baseline && !base_by_size.emplace(r.m, &r).second)
      duplicates.insert(r.m);
    if (r.backend == target && !target_by_size.emplace(r.m, &r).second)
      duplicates.insert(r.m);
  }
  auto list_sizes = [](const std::set<std::size_t>& sizes) {
    std::string out;
    for (std::size_t s : sizes) {
      if (!out.empty()) out += ", ";
      out += std::to_string(s);
    }
    return out;
  };
  if (!duplicates.empty())
    throw std::runtime_error("speedup: duplicate records for sizes: " +
                             list_sizes(duplicates));
  std::set<std::size_t> missing;
  for (const auto& [size, rec] : base_by_size)
    if (!target_by_size.count(size)) missing.insert(size);
  for (const auto& [size, rec] : target_by_size)
    if (!base_by_size.count(size)) missing.insert(size);
  if (!missing.empty())
    throw std::runtime_error("speedup: missing counterpart records for sizes: " +
                             list_sizes(missing));
  if (base_by_size.empty())
    throw std::runtime_error("speedup: no records match the requested key");

  ChartSeries series;
  series.label = kernels::to_string(target) + " vs " + kernels::to_string(baseline);
  for (const auto& [size, base] : base_by_size) {
    const auto* targ = target_by_size.at(size);
    series.points.emplace_back(static_cast<double>(size),
                               bench::speedup(base->avg_seconds, targ->avg_seconds));
  }
  return series;
}

// ---------------------------------------------------------------------------
// SVG chart
// ---------------------------------------------------------------------------

namespace {

std::vector<double> nice_ticks(double lo, double hi, std::size_t target) {
  if (!(hi > lo)) hi = lo + 1.0;
  const double raw = (hi - lo) / static_cast<double>(std::max<std::size_t>(target, 2) - 1);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  const double factor = norm <= 1.0 ? 1.0 : norm <= 2.0 ? 2.0 : norm <= 5.0 ? 5.0 : 10.0;
  const double step = factor * mag;
  const double first = std::floor(lo / step) * step;
  std::vector<double> ticks;
  for (int i = 0;; ++i) {
    const double v = first + step * i;
    ticks.push_back(v);
    if (v >= hi - step * 1e-9) break;
  }
  return ticks;
}

constexpr std::array<std::string_view, 8> kPalette = {
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr std::array<std::string_view, 4> kDashes = {"", "6,3", "2,2", "8,3,2,3"};

}  // namespace

std::string render_chart_svg(const ChartSpec& spec) {
  if (spec.series.empty()) throw std::invalid_argument("chart: no series");
  for (const auto& s : spec.series) {
    if (s.points.empty())
      throw std::invalid_argument("chart: series '" + s.label + "' has no points");
    for (std::size_t i = 1; i < s.points.size(); ++i)
      if (!(s.points[i].first > s.points[i - 1].first))
        throw std::invalid_argument("chart: series '" + s.label +
                                    "' x values must be strictly increasing");
    if (spec.x_log2)
      for (const auto& [x, y] : s.points)
        if (!(x > 0.0))
          throw std::invalid_argument("chart: log2 x-axis requires positive x values");
  }

  const double width = static_cast<double>(spec.width_px);
  const double height = static_cast<double>(spec.height_px);
  const double ml = 70.0, mr = 160.0, mt = 46.0, mb = 54.0;
  const double pw = width - ml - mr;
  const double ph = height - mt - mb;
  if (pw < 50.0 || ph < 50.0) throw std::invalid_argument("chart: canvas too small");

  const auto tx = [&](double x) { return spec.x_log2 ? std::log2(x) : x; };

  double xlo = tx(spec.series[0].points[0].first);
  double xhi = xlo;
  double ylo = 0.0;
  double yhi = spec.series[0].points[0].second;
  for (const auto& s : spec.series) {
    for (const auto& [x, y] : s.points) {
      xlo = std::min(xlo, tx(x));
      xhi = std::max(xhi, tx(x));
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
    }
  }
  if (!(xhi > xlo)) {
    xlo -= 0.5;
    xhi += 0.5;
  }

  // x ticks: integer log2 exponents for the geometric axis, or 1/2/5-stepped
  // values on a linear axis.
  std::vector<std::pair<double, std::string>> xticks;  // (transformed pos, label)
  if (spec.x_log2) {
    const long e_lo = static_cast<long>(std::ceil(xlo - 1e-9));
    const long e_hi = static_cast<long>(std::floor(xhi + 1e-9));
    for (long e = e_lo; e <= e_hi; ++e)
      xticks.emplace_back(static_cast<double>(e),
                          fmt_general(std::exp2(static_cast<double>(e)), 6));
    if (xticks.empty()) {
      xticks.emplace_back(xlo, fmt_general(std::exp2(xlo), 6));
      xticks.emplace_back(xhi, fmt_general(std::exp2(xhi), 6));
    }
  } else {
    const std::vector<double> ticks = nice_ticks(xlo, xhi, 6);
    for (const double v : ticks) xticks.emplace_back(v, fmt_general(v, 6));
    xlo = ticks.front();
    xhi = ticks.back();
  }

  const std::vector<double> yticks = nice_ticks(ylo, yhi, 6);
  ylo = yticks.front();
  yhi = yticks.back();

  const auto px = [&](double x) { return ml + (tx(x) - xlo) / (xhi - xlo) * pw; };
  const auto pxt = [&](double t) { return ml + (t - xlo) / (xhi - xlo) * pw; };
  const auto py = [&](double y) { return mt + ph - (y - ylo) / (yhi - ylo) * ph; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(spec.width_px) +
         "\" height=\"" + std::to_string(spec.height_px) + "\" viewBox=\"0 0 " +
         std::to_string(spec.width_px) + " " + std::to_string(spec.height_px) +
         "\" font-family=\"Helvetica,Arial,sans-serif\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(spec.width_px) + "\" height=\"" +
         std::to_string(spec.height_px) + "\" fill=\"#ffffff\"/>\n";
  svg += "<text x=\"" + fmt_fixed(ml + pw / 2.0, 2) +
         "\" y=\"26.00\" text-anchor=\"middle\" font-size=\"16\" fill=\"#222222\">" +
         xml_escape(spec.title) + "</text>\n";

  // gridlines + ticks
  svg += "<g id=\"x-ticks\" font-size=\"11\" fill=\"#444444\">\n";
  for (const auto& [t, label] : xticks) {
    const std::string x = fmt_fixed(pxt(t), 2);
    svg += "<line x1=\"" + x + "\" y1=\"" + fmt_fixed(mt, 2) + "\" x2=\"" + x + "\" y2=\"" +
           fmt_fixed(mt + ph, 2) + "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg += "<line x1=\"" + x + "\" y1=\"" + fmt_fixed(mt + ph, 2) + "\" x2=\"" + x +
           "\" y2=\"" + fmt_fixed(mt + ph + 5.0, 2) +
           "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + x + "\" y=\"" + fmt_fixed(mt + ph + 18.0, 2) +
           "\" text-anchor=\"middle\">" + xml_escape(label) + "</text>\n";
  }
  svg += "</g>\n";
  svg += "<g id=\"y-ticks\" font-size=\"11\" fill=\"#444444\">\n";
  for (const double v : yticks) {
    const std::string y = fmt_fixed(py(v), 2);
    svg += "<line x1=\"" + fmt_fixed(ml, 2) + "\" y1=\"" + y + "\" x2=\"" +
           fmt_fixed(ml + pw, 2) + "\" y2=\"" + y +
           "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg += "<line x1=\"" + fmt_fixed(ml - 5.0, 2) + "\" y1=\"" + y + "\" x2=\"" +
           fmt_fixed(ml, 2) + "\" y2=\"" + y + "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + fmt_fixed(ml - 8.0, 2) + "\" y=\"" + y +
           "\" dy=\"4\" text-anchor=\"end\">" + fmt_general(v, 6) + "</text>\n";
  }
  svg += "</g>\n";

  // axes
  svg += "<line x1=\"" + fmt_fixed(ml, 2) + "\" y1=\"" + fmt_fixed(mt + ph, 2) + "\" x2=\"" +
         fmt_fixed(ml + pw, 2) + "\" y2=\"" + fmt_fixed(mt + ph, 2) +
         "\" stroke=\"#333333\" stroke-width=\"1.5\"/>\n";
  svg += "<line x1=\"" + fmt_fixed(ml, 2) + "\" y1=\"" + fmt_fixed(mt, 2) + "\" x2=\"" +
         fmt_fixed(ml, 2) + "\" y2=\"" + fmt_fixed(mt + ph, 2) +
         "\" stroke=\"#333333\" stroke-width=\"1.5\"/>\n";
  svg += "<text x=\"" + fmt_fixed(ml + pw / 2.0, 2) + "\" y=\"" + fmt_fixed(height - 14.0, 2) +
         "\" text-anchor=\"middle\" font-size=\"13\" fill=\"#222222\">" +
         xml_escape(spec.x_label) + "</text>\n";
  svg += "<text x=\"18.00\" y=\"" + fmt_fixed(mt + ph / 2.0, 2) +
         "\" text-anchor=\"middle\" font-size=\"13\" fill=\"#222222\" transform=\"rotate(-90 "
         "18.00 " +
         fmt_fixed(mt + ph / 2.0, 2) + ")\">" + xml_escape(spec.y_label) + "</text>\n";

  // series
  svg += "<g id=\"series\">\n";
  for (std::size_t si = 0; si < spec.series.size(); ++si) {
    const auto& s = spec.series[si];
    const std::string_view color = kPalette[si % kPalette.size()];
    const std::string_view dash = kDashes[si % kDashes.size()];
    svg += "<polyline fill=\"none\" stroke=\"";
    svg += color;
    svg += "\" stroke-width=\"2\"";
    if (!dash.empty()) {
      svg += " stroke-dasharray=\"";
      svg += dash;
      svg += "\"";
    }
    svg += " points=\"";
    for (std::size_t pi = 0; pi < s.points.size(); ++pi) {
      if (pi > 0) svg += ' ';
      svg += fmt_fixed(px(s.points[pi].first), 2) + "," +
             fmt_fixed(py(s.points[pi].second), 2);
    }
    svg += "\"/>\n";
    for (const auto& [x, y] : s.points) {
      svg += "<circle cx=\"" + fmt_fixed(px(x), 2) + "\" cy=\"" + fmt_fixed(py(y), 2) +
             "\" r=\"3\" fill=\"";
      svg += color;
      svg += "\"/>\n";
    }
  }
  svg += "</g>\n";

  // legend
  svg += "<g id=\"legend\" font-size=\"12\" fill=\"#222222\">\n";
  for (std::size_t si = 0; si < spec.series.size(); ++si) {
    const double ly = mt + 10.0 + 20.0 * static_cast<double>(si);
    const std::string_view color = kPalette[si % kPalette.size()];
    const std::string_view dash = kDashes[si % kDashes.size()];
    svg += "<line x1=\"" + fmt_fixed(ml + pw + 14.0, 2) + "\" y1=\"" + fmt_fixed(ly, 2) +
           "\" x2=\"" + fmt_fixed(ml + pw + 38.0, 2) + "\" y2=\"" + fmt_fixed(ly, 2) +
           "\" stroke=\"";
    svg += color;
    svg += "\" stroke-width=\"2\"";
    if (!dash.empty()) {
      svg += " stroke-dasharray=\"";
      svg += dash;
      svg += "\"";
    }
    svg += "/>\n";
    svg += "<text x=\"" + fmt_fixed(ml + pw + 44.0, 2) + "\" y=\"" + fmt_fixed(ly + 4.0, 2) +
           "\">" + xml_escape(spec.series[si].label) + "</text>\n";
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

void render_chart(const ChartSpec& spec, const std::string& path) {
  const std::string svg = render_chart_svg(spec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(svg.data(), static_cast<std::streamsize>(svg.size()));
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// markdown summary
// ---------------------------------------------------------------------------

std::string summary_table(const std::vector<bench::BenchmarkRecord>& records) {
  if (records.empty()) throw std::invalid_argument("summary_table: no records");

  struct Group {
    std::set<std::size_t> sizes;
    // (backend rank, tile) -> size -> gflops; later records overwrite earlier
    std::map<std::pair<int, std::size_t>, std::map<std::size_t, double>> rows;
  };
  std::map<std::pair<int, std::size_t>, Group> groups;  // (precision rank, reps)
  for (const auto& r : records) {
    Group& g = groups[{static_cast<int>(r.precision), r.reps}];
    g.sizes.insert(r.m);
    g.rows[{static_cast<int>(r.backend), r.tile}][r.m] = r.gflops;
  }

  std::string out;
  bool first_group = true;
  for (const auto& [key, group] : groups) {
    if (!first_group) out += '\n';
    first_group = false;
    const auto precision = static_cast<Precision>(key.first);
    out += "### " + to_string(precision) + " precision, reps=" + std::to_string(key.second) +
           " (GFLOPS)\n\n";
    out += "| backend | tile |";
    for (const std::size_t size : group.sizes) out += " " + std::to_string(size) + " |";
    out += "\n|---|---|";
    for (std::size_t i = 0; i < group.sizes.size(); ++i) out += "---|";
    out += '\n';
    for (const auto& [row_key, cells] : group.rows) {
      out += "| " + kernels::to_string(static_cast<kernels::Backend>(row_key.first)) +
             " | " + std::to_string(row_key.second) + " |";
      for (const std::size_t size : group.sizes) {
        const auto it = cells.find(size);
        out += it == cells.end() ? " - |" : " " + fmt_general(it->second, 4) + " |";
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace matbench::report
