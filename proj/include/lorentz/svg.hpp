#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lorentz/extended_real.hpp"

namespace lorentz::svg {

struct Series {
  std::vector<std::pair<double, double>> points;
  std::string label;
  std::string color = "#1f77b4";
  bool step = false;   // draw as a right-continuous step function
  bool dashed = false;
};

struct Bars {
  std::vector<double> edges;    // k+1 bin edges
  std::vector<double> heights;  // k bar heights
  std::string color = "#c7d7ea";
};

struct HLine {
  double y;
  std::string label;
};

/// Minimal line/step/histogram chart with linear axes.
class Plot {
 public:
  Plot(std::string title, std::string xlabel, std::string ylabel)
      : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

  void add(Series s) { series_.push_back(std::move(s)); }
  void add(Bars b) { bars_.push_back(std::move(b)); }
  void add(HLine h) { hlines_.push_back(std::move(h)); }

  void render(std::ostream& out) const {
    double x0 = kInf, x1 = -kInf, y0 = kInf, y1 = -kInf;
    auto extend = [&](double x, double y) {
      if (!std::isfinite(x) || !std::isfinite(y)) return;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    };
    for (const auto& s : series_)
      for (auto [x, y] : s.points) extend(x, y);
    for (const auto& b : bars_) {
      for (std::size_t i = 0; i < b.heights.size(); ++i) {
        extend(b.edges[i], 0.0);
        extend(b.edges[i + 1], b.heights[i]);
      }
    }
    for (const auto& h : hlines_) y1 = std::max(y1, h.y), y0 = std::min(y0, h.y);
    if (!(x0 < x1)) x0 -= 0.5, x1 += 0.5;
    if (!(y0 < y1)) y0 -= 0.5, y1 += 0.5;
    const double pad = 0.05 * (y1 - y0);
    y1 += pad;
    if (y0 != 0.0) y0 -= pad;

    auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); };
    auto py = [&](double y) { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape(title_)
        << "</text>\n";

    for (const auto& b : bars_)
      for (std::size_t i = 0; i < b.heights.size(); ++i) {
        const double xa = px(b.edges[i]), xb = px(b.edges[i + 1]), ya = py(b.heights[i]), yb = py(0.0);
        out << "<rect x=\"" << num(xa) << "\" y=\"" << num(ya) << "\" width=\"" << num(xb - xa) << "\" height=\""
            << num(yb - ya) << "\" fill=\"" << b.color << "\" stroke=\"white\" stroke-width=\"0.5\"/>\n";
      }

    // Axes and ticks.
    out << "<g stroke=\"black\" fill=\"none\">\n";
    out << "<line x1=\"" << kLeft << "\" y1=\"" << num(py(y0)) << "\" x2=\"" << kWidth - kRight << "\" y2=\""
        << num(py(y0)) << "\"/>\n";
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kHeight - kBottom
        << "\"/>\n</g>\n";
    for (double tx : ticks(x0, x1)) {
      out << "<line x1=\"" << num(px(tx)) << "\" y1=\"" << num(py(y0)) << "\" x2=\"" << num(px(tx)) << "\" y2=\""
          << num(py(y0) + 5) << "\" stroke=\"black\"/>\n";
      out << "<text x=\"" << num(px(tx)) << "\" y=\"" << num(py(y0) + 18) << "\" text-anchor=\"middle\">"
          << tick_label(tx) << "</text>\n";
    }
    for (double ty : ticks(y0, y1)) {
      out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << num(py(ty)) << "\" x2=\"" << kLeft << "\" y2=\""
          << num(py(ty)) << "\" stroke=\"black\"/>\n";
      out << "<text x=\"" << kLeft - 8 << "\" y=\"" << num(py(ty) + 4) << "\" text-anchor=\"end\">"
          << tick_label(ty) << "</text>\n";
    }
    out << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 10
        << "\" text-anchor=\"middle\">" << escape(xlabel_) << "</text>\n";
    out << "<text x=\"15\" y=\"" << (kTop + kHeight - kBottom) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
        << (kTop + kHeight - kBottom) / 2 << ")\">" << escape(ylabel_) << "</text>\n";

    for (const auto& h : hlines_) {
      out << "<line x1=\"" << kLeft << "\" y1=\"" << num(py(h.y)) << "\" x2=\"" << kWidth - kRight << "\" y2=\""
          << num(py(h.y)) << "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";
      if (!h.label.empty())
        out << "<text x=\"" << kWidth - kRight - 4 << "\" y=\"" << num(py(h.y) - 4)
            << "\" text-anchor=\"end\" fill=\"gray\">" << escape(h.label) << "</text>\n";
    }

    int legend_row = 0;
    for (const auto& s : series_) {
      if (s.points.empty()) continue;
      std::ostringstream d;
      bool first = true;
      double prev_y = 0.0;
      for (auto [x, y] : s.points) {
        if (!std::isfinite(x) || !std::isfinite(y)) continue;
        if (first) {
          d << 'M' << num(px(x)) << ',' << num(py(y));
          first = false;
        } else {
          if (s.step) d << " L" << num(px(x)) << ',' << num(py(prev_y));
          d << " L" << num(px(x)) << ',' << num(py(y));
        }
        prev_y = y;
      }
      out << "<path d=\"" << d.str() << "\" fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
          << (s.dashed ? " stroke-dasharray=\"4 3\"" : "") << "/>\n";
      if (!s.label.empty()) {
        const double ly = kTop + 14.0 * legend_row++;
        out << "<line x1=\"" << kWidth - kRight - 150 << "\" y1=\"" << ly << "\" x2=\"" << kWidth - kRight - 130
            << "\" y2=\"" << ly << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << kWidth - kRight - 125 << "\" y=\"" << ly + 4 << "\">" << escape(s.label)
            << "</text>\n";
      }
    }
    out << "</svg>\n";
  }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  static constexpr int kWidth = 720, kHeight = 480, kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

  static std::string num(double v) {
    std::ostringstream o;
    o.setf(std::ios::fixed);
    o.precision(2);
    o << v;
    return o.str();
  }

  static std::string tick_label(double v) {
    std::ostringstream o;
    o.precision(4);
    o << (std::abs(v) < 1e-12 ? 0.0 : v);
    return o.str();
  }

  static std::vector<double> ticks(double lo, double hi) {
    const double raw = (hi - lo) / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    const double step = (norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0) * mag;
    std::vector<double> out;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) out.push_back(t);
    return out;
  }

  static std::string escape(const std::string& s) {
    std::string o;
    for (char c : s) {
      switch (c) {
        case '<': o += "&lt;"; break;
        case '>': o += "&gt;"; break;
        case '&': o += "&amp;"; break;
        default: o += c;
      }
    }
    return o;
  }

  std::string title_, xlabel_, ylabel_;
  std::vector<Series> series_;
  std::vector<Bars> bars_;
  std::vector<HLine> hlines_;
};

/// Density-normalized histogram of `data` with `bins` equal-width bins.
inline Bars histogram(std::span<const double> data, std::size_t bins) {
  Bars b;
  if (data.empty() || bins == 0) return b;
  const auto [mn, mx] = std::minmax_element(data.begin(), data.end());
  double lo = *mn, hi = *mx;
  if (!(lo < hi)) lo -= 0.5, hi += 0.5;
  const double w = (hi - lo) / static_cast<double>(bins);
  b.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) b.edges[i] = lo + w * static_cast<double>(i);
  b.heights.assign(bins, 0.0);
  for (double v : data) {
    auto i = static_cast<std::size_t>((v - lo) / w);
    b.heights[std::min(i, bins - 1)] += 1.0;
  }
  for (double& h : b.heights) h /= static_cast<double>(data.size()) * w;
  return b;
}

inline const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
  return colors[i % 7];
}

}  // namespace lorentz::svg
