#include "qualsim/svg_chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace qualsim::chart {

namespace {

constexpr double kWidth = 960;
constexpr double kHeight = 540;
constexpr double kLeft = 80;
constexpr double kRight = 80;
constexpr double kTop = 50;
constexpr double kBottom = 130;

const char* kPalette[] = {"#1f5f99", "#c0392b"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  if (v != 0.0 && (std::abs(v) >= 1e5 || std::abs(v) < 1e-3)) std::snprintf(buf, sizeof buf, "%.0e", v);
  else std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Scale {
  double lo, hi, px_lo, px_hi;
  double operator()(double v) const { return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo); }
};

std::string open_svg(const Labels& labels) {
  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) + "\" height=\"" +
                  fmt(kHeight) + "\" font-family=\"sans-serif\" font-size=\"11\">\n"
                  "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
       escape(labels.title) + "</text>\n";
  s += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"" + fmt(kHeight - 10) + "\" text-anchor=\"middle\">" +
       escape(labels.x_axis) + "</text>\n";
  s += "<text transform=\"translate(18," + fmt(kTop + (kHeight - kTop - kBottom) / 2) +
       ") rotate(-90)\" text-anchor=\"middle\">" + escape(labels.y_axis) + "</text>\n";
  return s;
}

std::string y_axis(const Scale& y, const std::vector<double>& ticks, double x, bool right, const char* colour) {
  std::string s = "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(y.px_hi) + "\" x2=\"" + fmt(x) + "\" y2=\"" +
                  fmt(y.px_lo) + "\" stroke=\"" + colour + "\"/>\n";
  for (double t : ticks) {
    const double py = y(t);
    s += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(py) + "\" x2=\"" + fmt(right ? x + 5 : x - 5) + "\" y2=\"" +
         fmt(py) + "\" stroke=\"" + colour + "\"/>\n";
    s += "<text x=\"" + fmt(right ? x + 8 : x - 8) + "\" y=\"" + fmt(py + 4) + "\" text-anchor=\"" +
         (right ? "start" : "end") + "\" fill=\"" + colour + "\">" + tick_label(t) + "</text>\n";
    if (!right) {
      s += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(py) + "\" x2=\"" + fmt(kWidth - kRight) + "\" y2=\"" +
           fmt(py) + "\" stroke=\"#e4e4e4\"/>\n";
    }
  }
  return s;
}

std::pair<double, double> padded(double lo, double hi) {
  if (lo == hi) {
    const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.05;
    return {lo - pad, hi + pad};
  }
  return {lo, hi};
}

}  // namespace

std::vector<double> nice_ticks(double lo, double hi, int target) {
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / std::max(target, 1);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> ticks;
  const double first = std::floor(lo / step + 1e-9) * step;
  for (int k = 0;; ++k) {
    const double t = first + k * step;
    ticks.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
    if (t >= hi - step * 1e-9) break;
  }
  return ticks;
}

std::string bar_chart(std::span<const Bar> bars, const Labels& labels) {
  if (bars.empty()) throw std::invalid_argument("bar chart needs at least one bar");
  double lo = 0.0, hi = 0.0;
  for (const auto& b : bars) {
    lo = std::min(lo, b.value);
    hi = std::max(hi, b.value);
  }
  std::tie(lo, hi) = padded(lo, hi);
  auto ticks = nice_ticks(lo, hi);
  lo = std::min(lo, ticks.front());
  hi = std::max(hi, ticks.back());
  const Scale y{lo, hi, kHeight - kBottom, kTop};
  const double slot = (kWidth - kLeft - kRight) / static_cast<double>(bars.size());

  std::string s = open_svg(labels);
  s += y_axis(y, ticks, kLeft, false, "black");
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const double x = kLeft + slot * i + slot * 0.15;
    const double top = y(std::max(bars[i].value, 0.0));
    const double bottom = y(std::min(bars[i].value, 0.0));
    s += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(top) + "\" width=\"" + fmt(slot * 0.7) + "\" height=\"" +
         fmt(bottom - top) + "\" fill=\"" + kPalette[bars[i].value < 0 ? 1 : 0] + "\"><title>" +
         escape(bars[i].label) + ": " + tick_label(bars[i].value) + "</title></rect>\n";
    const double lx = kLeft + slot * (i + 0.5);
    s += "<text transform=\"translate(" + fmt(lx) + "," + fmt(kHeight - kBottom + 8) +
         ") rotate(60)\" font-size=\"9\">" + escape(bars[i].label) + "</text>\n";
  }
  s += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(y(0.0)) + "\" x2=\"" + fmt(kWidth - kRight) + "\" y2=\"" +
       fmt(y(0.0)) + "\" stroke=\"black\"/>\n";
  s += "</svg>\n";
  return s;
}

std::string scatter_chart(std::span<const Point> points, const Labels& labels) {
  if (points.empty()) throw std::invalid_argument("scatter chart needs at least one point");
  auto [xmin, xmax] = std::minmax_element(points.begin(), points.end(),
                                          [](const Point& a, const Point& b) { return a.x < b.x; });
  auto [ymin, ymax] = std::minmax_element(points.begin(), points.end(),
                                          [](const Point& a, const Point& b) { return a.y < b.y; });
  auto [xlo, xhi] = padded(xmin->x, xmax->x);
  auto [ylo, yhi] = padded(ymin->y, ymax->y);
  const auto xt = nice_ticks(xlo, xhi);
  const auto yt = nice_ticks(ylo, yhi);
  const Scale x{std::min(xlo, xt.front()), std::max(xhi, xt.back()), kLeft, kWidth - kRight};
  const Scale y{std::min(ylo, yt.front()), std::max(yhi, yt.back()), kHeight - kBottom, kTop};

  std::string s = open_svg(labels);
  s += y_axis(y, yt, kLeft, false, "black");
  s += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(kHeight - kBottom) + "\" x2=\"" + fmt(kWidth - kRight) +
       "\" y2=\"" + fmt(kHeight - kBottom) + "\" stroke=\"black\"/>\n";
  for (double t : xt) {
    s += "<text x=\"" + fmt(x(t)) + "\" y=\"" + fmt(kHeight - kBottom + 16) + "\" text-anchor=\"middle\">" +
         tick_label(t) + "</text>\n";
  }
  for (const auto& p : points) {
    s += "<circle cx=\"" + fmt(x(p.x)) + "\" cy=\"" + fmt(y(p.y)) + "\" r=\"4\" fill=\"" + kPalette[0] +
         "\" fill-opacity=\"0.75\"><title>" + escape(p.label) + "</title></circle>\n";
  }
  s += "</svg>\n";
  return s;
}

std::string line_chart(std::span<const Series> series, const Labels& labels, bool log_x) {
  if (series.size() != 2) throw std::invalid_argument("line chart needs exactly two series");
  double xlo = INFINITY, xhi = -INFINITY;
  for (const auto& s : series) {
    if (s.points.empty()) throw std::invalid_argument("series " + s.name + " is empty");
    for (const auto& [px, py] : s.points) {
      if (log_x && !(px > 0.0)) throw std::invalid_argument("log axis needs positive x");
      xlo = std::min(xlo, px);
      xhi = std::max(xhi, px);
    }
  }
  auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
  auto [sxlo, sxhi] = padded(tx(xlo), tx(xhi));
  const Scale x{sxlo, sxhi, kLeft, kWidth - kRight};

  std::string out = open_svg(labels);
  out += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(kHeight - kBottom) + "\" x2=\"" + fmt(kWidth - kRight) +
         "\" y2=\"" + fmt(kHeight - kBottom) + "\" stroke=\"black\"/>\n";
  for (const auto& [px, py] : series.front().points) {
    out += "<text x=\"" + fmt(x(tx(px))) + "\" y=\"" + fmt(kHeight - kBottom + 16) + "\" text-anchor=\"middle\">" +
           tick_label(px) + "</text>\n";
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& pts = series[k].points;
    double ylo = INFINITY, yhi = -INFINITY;
    for (const auto& [px, py] : pts) {
      ylo = std::min(ylo, py);
      yhi = std::max(yhi, py);
    }
    std::tie(ylo, yhi) = padded(ylo, yhi);
    const auto ticks = nice_ticks(ylo, yhi, 5);
    const Scale y{std::min(ylo, ticks.front()), std::max(yhi, ticks.back()), kHeight - kBottom, kTop};
    out += y_axis(y, ticks, k == 0 ? kLeft : kWidth - kRight, k == 1, kPalette[k]);
    std::string path;
    for (const auto& [px, py] : pts) path += (path.empty() ? "" : " ") + fmt(x(tx(px))) + ',' + fmt(y(py));
    out += "<polyline points=\"" + path + "\" fill=\"none\" stroke=\"" + kPalette[k] + "\" stroke-width=\"2\"/>\n";
    for (const auto& [px, py] : pts) {
      out += "<circle cx=\"" + fmt(x(tx(px))) + "\" cy=\"" + fmt(y(py)) + "\" r=\"3\" fill=\"" + kPalette[k] + "\"/>\n";
    }
    const double ly = kTop + 14 * k;
    out += "<line x1=\"" + fmt(kLeft + 20) + "\" y1=\"" + fmt(ly) + "\" x2=\"" + fmt(kLeft + 40) + "\" y2=\"" +
           fmt(ly) + "\" stroke=\"" + kPalette[k] + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + fmt(kLeft + 46) + "\" y=\"" + fmt(ly + 4) + "\">" + escape(series[k].name) +
           (k == 0 ? " (left scale)" : " (right scale)") + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace qualsim::chart
