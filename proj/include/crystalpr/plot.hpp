#pragma once

// Deterministic SVG rendering of histogram and line CSVs.  Fixed canvas,
// fixed font, fixed number formatting, so identical data gives identical bytes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "crystalpr/io.hpp"

namespace crystalpr {

enum class PlotKind { Histogram, Line };

inline PlotKind plot_kind_from_string(const std::string& s)
{
  if (s == "histogram") return PlotKind::Histogram;
  if (s == "line") return PlotKind::Line;
  throw std::invalid_argument("unknown plot kind '" + s + "' (expected histogram|line)");
}

struct PlotOptions {
  PlotKind kind = PlotKind::Line;
  std::string x_column;  // default: first column
  std::string y_column;  // default: second column
  bool log_y = false;
  std::string title;
};

namespace detail {

inline std::string fmt(double v, int prec = 2)
{
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

inline std::string tick_label(double v)
{
  char buf[48];
  if (v != 0.0 && (std::abs(v) >= 1e5 || std::abs(v) < 1e-2))
    std::snprintf(buf, sizeof buf, "%.0e", v);
  else
    std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline std::string escape_xml(const std::string& s)
{
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline double parse_number(const std::string& cell, const std::string& column)
{
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (cell.empty() || end != cell.c_str() + cell.size())
    throw std::invalid_argument("plot: non-numeric value '" + cell + "' in column '" + column + "'");
  return v;
}

}  // namespace detail

/// Renders columns (x, y) of `table`.  Histograms draw one bar per row with
/// x as the bin label; lines connect points in row order.  A table without
/// rows yields empty axes.
inline std::string render_svg(const CsvTable& table, const PlotOptions& opt)
{
  constexpr double W = 640, H = 400, L = 70, R = 20, T = 40, B = 50;
  const double pw = W - L - R, ph = H - T - B;

  std::vector<double> xs, ys;
  std::string xname = opt.x_column, yname = opt.y_column;
  if (!table.columns.empty() || !table.rows.empty()) {
    if (table.columns.size() < 2) throw std::invalid_argument("plot: CSV needs at least two columns");
    if (xname.empty()) xname = table.columns[0];
    if (yname.empty()) yname = table.columns[1];
    const auto xi = table.column(xname), yi = table.column(yname);
    if (xi < 0) throw std::invalid_argument("plot: no column '" + xname + "'");
    if (yi < 0) throw std::invalid_argument("plot: no column '" + yname + "'");
    for (const auto& row : table.rows) {
      xs.push_back(detail::parse_number(row[static_cast<std::size_t>(xi)], xname));
      ys.push_back(detail::parse_number(row[static_cast<std::size_t>(yi)], yname));
    }
  }

  const bool log_y = opt.log_y;
  auto ty = [&](double v) { return log_y ? std::log10(std::max(v, 1e-300)) : v; };
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!xs.empty()) {
    x0 = *std::min_element(xs.begin(), xs.end());
    x1 = *std::max_element(xs.begin(), xs.end());
    if (opt.kind == PlotKind::Histogram) {
      x0 -= 0.5;
      x1 += 0.5;
    }
    if (x1 == x0) {
      x0 -= 0.5;
      x1 += 0.5;
    }
    std::vector<double> t;
    for (double v : ys)
      if (!log_y || v > 0) t.push_back(ty(v));
    if (!t.empty()) {
      y1 = *std::max_element(t.begin(), t.end());
      y0 = log_y ? std::floor(*std::min_element(t.begin(), t.end())) : std::min(0.0, *std::min_element(t.begin(), t.end()));
      if (log_y) y1 = std::ceil(y1);
      if (y1 <= y0) y1 = y0 + 1;
    }
  }
  auto px = [&](double v) { return L + (v - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return T + ph - (ty(v) - y0) / (y1 - y0) * ph; };
  auto pyt = [&](double t) { return T + ph - (t - y0) / (y1 - y0) * ph; };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << ' ' << H
    << "\" font-family=\"DejaVu Sans Mono, monospace\" font-size=\"11\">\n";
  s << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  if (!opt.title.empty())
    s << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << detail::escape_xml(opt.title)
      << "</text>\n";
  s << "<line x1=\"" << L << "\" y1=\"" << T + ph << "\" x2=\"" << L + pw << "\" y2=\"" << T + ph << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << T + ph << "\" stroke=\"black\"/>\n";

  // Five ticks per axis (decades on a log axis).
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0;
    s << "<text x=\"" << detail::fmt(px(xv)) << "\" y=\"" << detail::fmt(T + ph + 16) << "\" text-anchor=\"middle\">"
      << detail::tick_label(xv) << "</text>\n";
  }
  if (log_y) {
    for (int e = static_cast<int>(y0); e <= static_cast<int>(y1); ++e)
      s << "<text x=\"" << L - 6 << "\" y=\"" << detail::fmt(pyt(e) + 4) << "\" text-anchor=\"end\">1e" << e << "</text>\n";
  } else {
    for (int i = 0; i <= 4; ++i) {
      const double t = y0 + (y1 - y0) * i / 4.0;
      s << "<text x=\"" << L - 6 << "\" y=\"" << detail::fmt(pyt(t) + 4) << "\" text-anchor=\"end\">" << detail::tick_label(t)
        << "</text>\n";
    }
  }
  s << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">" << detail::escape_xml(xname) << "</text>\n";
  s << "<text x=\"16\" y=\"" << T + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << T + ph / 2 << ")\">"
    << detail::escape_xml(yname) << (log_y ? " (log)" : "") << "</text>\n";

  if (opt.kind == PlotKind::Histogram) {
    const double bw = std::max(1.0, pw / (x1 - x0) * 0.8);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (log_y && ys[i] <= 0) continue;
      const double top = py(ys[i]), base = log_y ? pyt(y0) : py(0.0);
      s << "<rect x=\"" << detail::fmt(px(xs[i]) - bw / 2) << "\" y=\"" << detail::fmt(std::min(top, base)) << "\" width=\""
        << detail::fmt(bw) << "\" height=\"" << detail::fmt(std::abs(base - top)) << "\" fill=\"steelblue\"/>\n";
    }
  } else if (!xs.empty()) {
    s << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (log_y && ys[i] <= 0) continue;
      s << (first ? "" : " ") << detail::fmt(px(xs[i])) << ',' << detail::fmt(py(ys[i]));
      first = false;
    }
    s << "\"/>\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (log_y && ys[i] <= 0) continue;
      s << "<circle cx=\"" << detail::fmt(px(xs[i])) << "\" cy=\"" << detail::fmt(py(ys[i])) << "\" r=\"3\" fill=\"steelblue\"/>\n";
    }
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace crystalpr
