#include "modclass/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace modclass {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

template <class T>
T parse_number(std::string_view field, int line, const char* column) {
  T v{};
  const auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || p != field.data() + field.size())
    throw std::runtime_error("csv line " + std::to_string(line) + ": bad " + column + " '" + std::string(field) + "'");
  return v;
}

void check_field(const std::string& s, const char* what) {
  if (s.find_first_of(",\"\n\r") != std::string::npos)
    throw std::invalid_argument(std::string("csv: ") + what + " must not contain commas, quotes or newlines");
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                              "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, p);
}

std::string curves_to_csv(std::span<const PeCurve> curves) {
  std::string out = kCsvHeader;
  out.push_back('\n');
  for (const auto& c : curves) {
    check_field(c.series, "series name");
    check_field(c.sweep_var, "sweep variable");
    for (const auto& p : c.points) {
      out += c.sweep_var;
      out += ',' + format_double(p.sweep_value);
      out += ',' + format_double(p.pe.pe);
      out += ',' + format_double(p.pe.ci_low);
      out += ',' + format_double(p.pe.ci_high);
      out += ',' + std::to_string(p.pe.trials);
      out += ',' + c.series;
      out += ',' + format_double(c.snr_db);
      out += ',' + std::to_string(c.seed);
      out.push_back('\n');
    }
  }
  return out;
}

std::vector<PeCurve> curves_from_csv(std::string_view text) {
  auto lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines.front() != kCsvHeader) throw std::runtime_error("csv: missing or unexpected header");
  std::vector<PeCurve> curves;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const int line = static_cast<int>(i) + 1;
    const auto f = split(lines[i], ',');
    if (f.size() != 9) throw std::runtime_error("csv line " + std::to_string(line) + ": expected 9 fields");
    CurvePoint p;
    p.sweep_value = parse_number<double>(f[1], line, "sweep_value");
    p.pe.pe = parse_number<double>(f[2], line, "pe");
    p.pe.ci_low = parse_number<double>(f[3], line, "ci_low");
    p.pe.ci_high = parse_number<double>(f[4], line, "ci_high");
    p.pe.trials = parse_number<std::int64_t>(f[5], line, "trials");
    const std::string var(f[0]);
    const std::string series(f[6]);
    const double snr = parse_number<double>(f[7], line, "snr_db");
    const auto seed = parse_number<std::uint64_t>(f[8], line, "seed");
    const bool same = !curves.empty() && curves.back().series == series && curves.back().sweep_var == var &&
                      curves.back().seed == seed &&
                      format_double(curves.back().snr_db) == format_double(snr);
    if (!same) curves.push_back(PeCurve{series, snr, var, seed, {}});
    curves.back().points.push_back(std::move(p));
  }
  return curves;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot move output into place at '" + path.string() + "': " + ec.message());
  }
}

void write_csv(std::span<const PeCurve> curves, const std::filesystem::path& path) {
  write_file_atomic(path, curves_to_csv(curves));
}

void write_csv(const PeCurve& curve, const std::filesystem::path& path) {
  write_csv(std::span<const PeCurve>(&curve, 1), path);
}

std::vector<PeCurve> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return curves_from_csv(buf.str());
}

std::string render_svg(std::span<const PeCurve> curves, const std::string& title) {
  if (curves.empty()) throw std::invalid_argument("render_svg: need at least one curve");
  constexpr double kWidth = 760, kHeight = 480;
  constexpr double kLeft = 80, kRight = 230, kTop = 40, kBottom = 64;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  double x_min = INFINITY, x_max = -INFINITY;
  for (const auto& c : curves)
    for (const auto& p : c.points) {
      x_min = std::min(x_min, p.sweep_value);
      x_max = std::max(x_max, p.sweep_value);
    }
  if (!std::isfinite(x_min)) x_min = 0, x_max = 1;
  const bool log_x = x_min > 0 && x_max / x_min >= 10.0;
  auto xt = [&](double v) { return log_x ? std::log10(v) : v; };
  double lo = xt(x_min), hi = xt(x_max);
  if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
  const double pad = 0.04 * (hi - lo);
  lo -= pad;
  hi += pad;
  auto px = [&](double v) { return kLeft + (xt(v) - lo) / (hi - lo) * plot_w; };
  const double y_lo = std::log10(kPlotFloor);
  auto py = [&](double pe) {
    const double l = std::log10(std::clamp(pe, kPlotFloor, 1.0));
    return kTop + (0.0 - l) / (0.0 - y_lo) * plot_h;
  };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty())
    s << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
      << xml_escape(title) << "</text>\n";

  // Decade grid on the Pe axis.
  for (int d = 0; d >= static_cast<int>(y_lo); --d) {
    const double y = py(std::pow(10.0, d));
    s << "<line x1=\"" << kLeft << "\" y1=\"" << fixed(y) << "\" x2=\"" << kLeft + plot_w << "\" y2=\"" << fixed(y)
      << "\" stroke=\"#dddddd\"/>\n";
    s << "<text x=\"" << kLeft - 8 << "\" y=\"" << fixed(y + 4) << "\" text-anchor=\"end\">1e" << d << "</text>\n";
  }
  std::vector<double> ticks;
  for (const auto& c : curves)
    for (const auto& p : c.points) ticks.push_back(p.sweep_value);
  std::sort(ticks.begin(), ticks.end());
  ticks.erase(std::unique(ticks.begin(), ticks.end()), ticks.end());
  double last_tick = -INFINITY;
  for (double t : ticks) {
    const double x = px(t);
    if (x - last_tick < 28) continue;
    last_tick = x;
    s << "<line x1=\"" << fixed(x) << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << fixed(x) << "\" y2=\""
      << kTop + plot_h + 5 << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << fixed(x) << "\" y=\"" << kTop + plot_h + 18 << "\" text-anchor=\"middle\">"
      << format_double(t) << "</text>\n";
  }
  s << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\"" << plot_h
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  const std::string x_label = curves.front().sweep_var.empty() ? "sweep" : curves.front().sweep_var;
  s << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 18 << "\" text-anchor=\"middle\">"
    << xml_escape(x_label) << (log_x ? " (log scale)" : "") << "</text>\n";
  s << "<text transform=\"translate(22," << kTop + plot_h / 2
    << ") rotate(-90)\" text-anchor=\"middle\">probability of error</text>\n";

  bool clamped = false;
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const auto& c = curves[k];
    const char* color = kPalette[k % kPalette.size()];
    const std::string label = c.series + " (" + format_double(c.snr_db) + " dB)";
    s << "<g class=\"series\" data-label=\"" << xml_escape(label) << "\">\n";
    if (!c.points.empty()) {
      s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"" << (k % 2 ? " stroke-dasharray=\"6 3\"" : "")
        << " points=\"";
      for (const auto& p : c.points) s << fixed(px(p.sweep_value)) << ',' << fixed(py(p.pe.pe)) << ' ';
      s << "\"/>\n";
    }
    for (const auto& p : c.points) {
      const double x = px(p.sweep_value);
      s << "<line class=\"whisker\" x1=\"" << fixed(x) << "\" y1=\"" << fixed(py(p.pe.ci_low)) << "\" x2=\""
        << fixed(x) << "\" y2=\"" << fixed(py(p.pe.ci_high)) << "\" stroke=\"" << color << "\"/>\n";
      const bool below = p.pe.pe < kPlotFloor;
      clamped = clamped || below;
      s << "<circle class=\"marker\" cx=\"" << fixed(x) << "\" cy=\"" << fixed(py(p.pe.pe)) << "\" r=\"3.5\" fill=\""
        << (below ? "white" : color) << "\" stroke=\"" << color << "\"><title>" << xml_escape(c.sweep_var) << '='
        << format_double(p.sweep_value) << " Pe=" << format_double(p.pe.pe) << (below ? " (shown at floor)" : "")
        << "</title></circle>\n";
    }
    const double ly = kTop + 12 + 20.0 * static_cast<double>(k);
    const double lx = kLeft + plot_w + 16;
    s << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 24 << "\" y2=\"" << ly << "\" stroke=\""
      << color << "\" stroke-width=\"1.5\"" << (k % 2 ? " stroke-dasharray=\"6 3\"" : "") << "/>\n";
    s << "<text x=\"" << lx + 30 << "\" y=\"" << ly + 4 << "\">" << xml_escape(label) << "</text>\n";
    s << "</g>\n";
  }
  if (clamped)
    s << "<text class=\"floor-note\" x=\"" << kLeft + 6 << "\" y=\"" << kTop + plot_h - 6
      << "\" font-size=\"11\">hollow markers: Pe below 1e-4, drawn at the floor</text>\n";
  s << "</svg>\n";
  return s.str();
}

void render_plot(std::span<const PeCurve> curves, const std::filesystem::path& path, const std::string& title) {
  write_file_atomic(path, render_svg(curves, title));
}

}  // namespace modclass
