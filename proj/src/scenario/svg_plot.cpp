#include "clusterfeed/scenario/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace clusterfeed::scenario {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;

const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
  return colors[i % 7];
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string tick_label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::pair<double, double> padded(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) return {0.0, 1.0};
  if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
    const double d = std::max(std::abs(hi) * 0.05, 1e-9);
    return {lo - d, hi + d};
  }
  return {lo, hi};
}

std::vector<double> ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) {
    out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

void open_svg(std::ostringstream& s, const std::string& title) {
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
    << "</text>\n";
}

void axes(std::ostringstream& s, const Frame& f, const std::string& xl, const std::string& yl) {
  const double left = f.px(f.x0), right = f.px(f.x1), bottom = f.py(f.y0), top = f.py(f.y1);
  s << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(right - left) << "\" height=\""
    << num(bottom - top) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ticks(f.x0, f.x1)) {
    s << "<line x1=\"" << num(f.px(t)) << "\" y1=\"" << num(bottom) << "\" x2=\"" << num(f.px(t)) << "\" y2=\""
      << num(bottom + 5) << "\" stroke=\"black\"/>"
      << "<text x=\"" << num(f.px(t)) << "\" y=\"" << num(bottom + 18) << "\" text-anchor=\"middle\">"
      << tick_label(t) << "</text>\n";
  }
  for (double t : ticks(f.y0, f.y1)) {
    s << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(f.py(t)) << "\" x2=\"" << num(left) << "\" y2=\""
      << num(f.py(t)) << "\" stroke=\"black\"/>"
      << "<text x=\"" << num(left - 8) << "\" y=\"" << num(f.py(t) + 4) << "\" text-anchor=\"end\">"
      << tick_label(t) << "</text>\n";
  }
  s << "<text x=\"" << num((left + right) / 2) << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
    << escape(xl) << "</text>\n";
  s << "<text transform=\"translate(16," << num((top + bottom) / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(yl) << "</text>\n";
}

void legend(std::ostringstream& s, const std::vector<std::pair<std::string, std::string>>& items) {
  double y = kTop + 10;
  const double x = kWidth - kRight + 12;
  for (const auto& [label, color] : items) {
    if (label.empty()) continue;
    s << "<rect x=\"" << num(x) << "\" y=\"" << num(y - 8) << "\" width=\"14\" height=\"8\" fill=\"" << color
      << "\"/><text x=\"" << num(x + 20) << "\" y=\"" << num(y) << "\">" << escape(label) << "</text>\n";
    y += 18;
  }
}

void draw_series(std::ostringstream& s, const Frame& f, const Series& se, const std::string& color) {
  if (se.markers) {
    s << "<g fill=\"" << color << "\" fill-opacity=\"0.5\">";
    for (std::size_t i = 0; i < se.x.size(); ++i) {
      if (!std::isfinite(se.x[i]) || !std::isfinite(se.y[i])) continue;
      s << "<circle cx=\"" << num(f.px(se.x[i])) << "\" cy=\"" << num(f.py(se.y[i])) << "\" r=\"1.6\"/>";
    }
    s << "</g>\n";
    return;
  }
  std::string pts;
  const auto flush = [&] {
    if (!pts.empty()) {
      s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"" << pts << "\"/>\n";
    }
    pts.clear();
  };
  for (std::size_t i = 0; i < se.x.size(); ++i) {
    if (!std::isfinite(se.x[i]) || !std::isfinite(se.y[i])) {
      flush();
      continue;
    }
    pts += num(f.px(se.x[i])) + "," + num(f.py(se.y[i])) + " ";
  }
  flush();
}

Frame frame_for(const std::vector<Series>& series, const std::optional<std::pair<double, double>>& xr,
                const std::optional<std::pair<double, double>>& yr) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& se : series) {
    for (std::size_t i = 0; i < se.x.size(); ++i) {
      if (!std::isfinite(se.x[i]) || !std::isfinite(se.y[i])) continue;
      x0 = std::min(x0, se.x[i]);
      x1 = std::max(x1, se.x[i]);
      y0 = std::min(y0, se.y[i]);
      y1 = std::max(y1, se.y[i]);
    }
  }
  auto [a, b] = xr ? *xr : padded(x0, x1);
  auto [c, d] = yr ? *yr : padded(y0, y1);
  return {a, b, c, d};
}

std::string heat(double t) {
  t = std::clamp(t, 0.0, 1.0);
  // blue to yellow
  const int r = static_cast<int>(40 + 215 * t);
  const int g = static_cast<int>(60 + 170 * t);
  const int b = static_cast<int>(150 - 110 * t);
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

std::string xy_plot_svg(const XYPlot& plot) {
  std::ostringstream s;
  open_svg(s, plot.title);
  const Frame f = frame_for(plot.series, plot.x_range, plot.y_range);
  axes(s, f, plot.x_label, plot.y_label);
  std::vector<std::pair<std::string, std::string>> items;
  for (std::size_t i = 0; i < plot.series.size(); ++i) {
    const std::string color = plot.series[i].color.empty() ? palette(i) : plot.series[i].color;
    draw_series(s, f, plot.series[i], color);
    items.emplace_back(plot.series[i].label, color);
  }
  legend(s, items);
  s << "</svg>\n";
  return s.str();
}

std::string contour_plot_svg(const ContourPlot& plot) {
  std::ostringstream s;
  open_svg(s, plot.title);
  const auto nx = static_cast<Eigen::Index>(plot.x.size());
  const auto ny = static_cast<Eigen::Index>(plot.y.size());
  Frame f{plot.x.front(), plot.x.back(), plot.y.front(), plot.y.back()};
  std::tie(f.x0, f.x1) = padded(f.x0, f.x1);
  std::tie(f.y0, f.y1) = padded(f.y0, f.y1);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (Eigen::Index i = 0; i < plot.values.size(); ++i) {
    const double v = plot.values.data()[i];
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  std::tie(lo, hi) = padded(lo, hi);
  // cells centered on the grid nodes
  const auto half = [](const std::vector<double>& g, Eigen::Index i, int side) {
    const auto n = static_cast<Eigen::Index>(g.size());
    if (n == 1) return g[0] + 0.5 * side;
    if (side < 0) return i == 0 ? g[0] : 0.5 * (g[i - 1] + g[i]);
    return i == n - 1 ? g[n - 1] : 0.5 * (g[i] + g[i + 1]);
  };
  for (Eigen::Index r = 0; r < ny; ++r) {
    for (Eigen::Index c = 0; c < nx; ++c) {
      const double v = plot.values(r, c);
      const double xa = f.px(half(plot.x, c, -1)), xb = f.px(half(plot.x, c, 1));
      const double ya = f.py(half(plot.y, r, 1)), yb = f.py(half(plot.y, r, -1));
      s << "<rect x=\"" << num(xa) << "\" y=\"" << num(ya) << "\" width=\"" << num(xb - xa + 0.3) << "\" height=\""
        << num(yb - ya + 0.3) << "\" fill=\"" << (std::isfinite(v) ? heat((v - lo) / (hi - lo)) : "#d9d9d9")
        << "\"/>";
    }
    s << "\n";
  }
  // marching squares, saddles resolved with the cell mean
  for (double level : plot.levels) {
    s << "<g stroke=\"black\" stroke-width=\"1\">";
    for (Eigen::Index r = 0; r + 1 < ny; ++r) {
      for (Eigen::Index c = 0; c + 1 < nx; ++c) {
        const double v[4] = {plot.values(r, c), plot.values(r, c + 1), plot.values(r + 1, c + 1),
                             plot.values(r + 1, c)};
        if (!std::all_of(v, v + 4, [](double x) { return std::isfinite(x); })) continue;
        const double xs[4] = {plot.x[c], plot.x[c + 1], plot.x[c + 1], plot.x[c]};
        const double ys[4] = {plot.y[r], plot.y[r], plot.y[r + 1], plot.y[r + 1]};
        std::vector<std::pair<double, double>> cuts;
        for (int e = 0; e < 4; ++e) {
          const int a = e, b = (e + 1) % 4;
          if ((v[a] < level) != (v[b] < level)) {
            const double t = (level - v[a]) / (v[b] - v[a]);
            cuts.emplace_back(xs[a] + t * (xs[b] - xs[a]), ys[a] + t * (ys[b] - ys[a]));
          }
        }
        if (cuts.size() == 4 && (0.25 * (v[0] + v[1] + v[2] + v[3]) < level) != (v[0] < level)) {
          std::rotate(cuts.begin(), cuts.begin() + 1, cuts.end());
        }
        for (std::size_t k = 0; k + 1 < cuts.size(); k += 2) {
          s << "<line x1=\"" << num(f.px(cuts[k].first)) << "\" y1=\"" << num(f.py(cuts[k].second)) << "\" x2=\""
            << num(f.px(cuts[k + 1].first)) << "\" y2=\"" << num(f.py(cuts[k + 1].second)) << "\"/>";
        }
      }
    }
    s << "</g>\n";
  }
  s << "<defs><clipPath id=\"plotarea\"><rect x=\"" << num(f.px(f.x0)) << "\" y=\"" << num(f.py(f.y1))
    << "\" width=\"" << num(f.px(f.x1) - f.px(f.x0)) << "\" height=\"" << num(f.py(f.y0) - f.py(f.y1))
    << "\"/></clipPath></defs>\n<g clip-path=\"url(#plotarea)\">\n";
  std::vector<std::pair<std::string, std::string>> items;
  for (std::size_t i = 0; i < plot.overlays.size(); ++i) {
    const std::string color = plot.overlays[i].color.empty() ? palette(i + 1) : plot.overlays[i].color;
    draw_series(s, f, plot.overlays[i], color);
    items.emplace_back(plot.overlays[i].label, color);
  }
  s << "</g>\n";
  axes(s, f, plot.x_label, plot.y_label);
  char range[96];
  std::snprintf(range, sizeof range, "map %.3g .. %.3g", lo, hi);
  items.emplace_back(range, heat(1.0));
  items.emplace_back("no solution", "#d9d9d9");
  legend(s, items);
  s << "</svg>\n";
  return s.str();
}

std::string polar_plot_svg(const PolarPlot& plot) {
  std::ostringstream s;
  open_svg(s, plot.title);
  const double cx = (kWidth - kRight) / 2 + 20, cy = kHeight / 2 + 10, radius = kHeight / 2 - 50;
  double peak = 0.0;
  for (const auto& [label, vals] : plot.traces) {
    for (double v : vals) peak = std::max(peak, v);
  }
  const double range = plot.dynamic_range_db;
  const auto rad = [&](double mag) {
    if (!(mag > 0.0) || !(peak > 0.0)) return 0.0;
    const double db = 20.0 * std::log10(mag / peak);
    return radius * std::max(0.0, 1.0 + db / range);
  };
  s << "<g fill=\"none\" stroke=\"#bbbbbb\">";
  for (int ring = 1; ring <= 3; ++ring) {
    s << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(radius * ring / 3.0) << "\"/>";
  }
  for (int a = 0; a < 360; a += 30) {
    const double t = a * 3.14159265358979323846 / 180.0;
    s << "<line x1=\"" << num(cx) << "\" y1=\"" << num(cy) << "\" x2=\"" << num(cx + radius * std::cos(t))
      << "\" y2=\"" << num(cy - radius * std::sin(t)) << "\"/>";
  }
  s << "</g>\n";
  for (int ring = 0; ring < 3; ++ring) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.0f dB", -range * ring / 3.0);
    s << "<text x=\"" << num(cx + 3) << "\" y=\"" << num(cy - radius * (3 - ring) / 3.0 + 12)
      << "\" font-size=\"10\" fill=\"#666666\">" << buf << "</text>";
  }
  s << "\n";
  std::vector<std::pair<std::string, std::string>> items;
  for (std::size_t i = 0; i < plot.traces.size(); ++i) {
    const auto& [label, vals] = plot.traces[i];
    std::string pts;
    for (std::size_t k = 0; k < vals.size() && k < plot.angles.size(); ++k) {
      const double r = rad(vals[k]);
      pts += num(cx + r * std::cos(plot.angles[k])) + "," + num(cy - r * std::sin(plot.angles[k])) + " ";
    }
    s << "<polygon fill=\"none\" stroke=\"" << palette(i) << "\" stroke-width=\"1.8\" points=\"" << pts
      << "\"/>\n";
    items.emplace_back(label, palette(i));
  }
  legend(s, items);
  s << "</svg>\n";
  return s.str();
}

}  // namespace clusterfeed::scenario
