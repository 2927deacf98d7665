#include "terracut/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "terracut/error.hpp"

namespace terracut::svg {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;

std::string fixed(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.2f", v);
  return buffer;
}

std::string label_number(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.4g", v);
  return buffer;
}

std::string header(double width, double height) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         fixed(width) + "\" height=\"" + fixed(height) + "\" viewBox=\"0 0 " + fixed(width) + " " + fixed(height) +
         "\">\n<rect x=\"0\" y=\"0\" width=\"" + fixed(width) + "\" height=\"" + fixed(height) + "\" fill=\"#ffffff\"/>\n";
}

std::string text(double x, double y, const std::string& content, int size = 12) {
  return "<text x=\"" + fixed(x) + "\" y=\"" + fixed(y) + "\" font-family=\"sans-serif\" font-size=\"" +
         std::to_string(size) + "\">" + escape(content) + "</text>\n";
}

// Maps projected coordinates into the map panel (left 600 px), y flipped.
struct MapFrame {
  BoundingBox box;
  double scale = 1.0;
  double offset_x = 0.0;
  double offset_y = 0.0;

  explicit MapFrame(std::span<const MultiPolygon> units) {
    for (const auto& u : units) box.extend(bounding_box(u));
    const Point extent = box.max - box.min;
    if (!(extent.x() > 0.0) || !(extent.y() > 0.0) || !extent.allFinite()) {
      fail(ErrorCode::DegenerateGeometry, "map extent is empty");
    }
    const double panel_w = 580.0;
    const double panel_h = kHeight - 60.0;
    scale = std::min(panel_w / extent.x(), panel_h / extent.y());
    offset_x = 10.0 + 0.5 * (panel_w - scale * extent.x());
    offset_y = 40.0 + 0.5 * (panel_h - scale * extent.y());
  }

  Point map(const Point& p) const {
    return {offset_x + (p.x() - box.min.x()) * scale, offset_y + (box.max.y() - p.y()) * scale};
  }

  std::string path(const MultiPolygon& unit) const {
    std::string d;
    auto ring = [&](const Ring& r) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        const Point q = map(r[i]);
        d += (i == 0 ? "M" : "L") + fixed(q.x()) + " " + fixed(q.y()) + " ";
      }
      d += "Z ";
    };
    for (const auto& part : unit) {
      ring(part.outer);
      for (const auto& hole : part.holes) ring(hole);
    }
    if (!d.empty()) d.pop_back();
    return d;
  }
};

void check_units(std::span<const MultiPolygon> units) {
  for (const auto& u : units) {
    if (u.empty()) fail(ErrorCode::DegenerateGeometry, "unit without polygons");
    for (const auto& part : u) {
      normalize_ring(part.outer);
      if (!(polygon_area(part) > 0.0)) fail(ErrorCode::DegenerateGeometry, "zero-area polygon");
    }
  }
}

}  // namespace

std::string Rgb::hex() const {
  char buffer[8];
  std::snprintf(buffer, sizeof(buffer), "#%02x%02x%02x", r, g, b);
  return buffer;
}

const std::array<Rgb, kPaletteSize>& palette() {
  static constexpr std::array<Rgb, kPaletteSize> colors{{
      {230, 25, 75},  {60, 180, 75},   {255, 225, 25}, {67, 99, 216},  {245, 130, 49},
      {145, 30, 180}, {70, 240, 240},  {240, 50, 230}, {188, 246, 12}, {250, 190, 190},
      {0, 128, 128},  {230, 190, 255}, {154, 99, 36},  {128, 0, 0},    {0, 0, 117},
  }};
  return colors;
}

Rgb categorical_color(int label) {
  const auto m = static_cast<int>(kPaletteSize);
  return palette()[static_cast<std::size_t>(((label - 1) % m + m) % m)];
}

Rgb ramp_color(double t) {
  t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0);
  auto mix = [t](std::uint8_t lo, std::uint8_t hi) {
    return static_cast<std::uint8_t>(std::lround(lo + t * (static_cast<double>(hi) - lo)));
  };
  return {mix(kRampLow.r, kRampHigh.r), mix(kRampLow.g, kRampHigh.g), mix(kRampLow.b, kRampHigh.b)};
}

std::string escape(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
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

std::string choropleth_categorical(std::span<const MultiPolygon> units, std::span<const int> labels,
                                   const std::string& title) {
  if (units.size() != labels.size()) fail(ErrorCode::DimensionMismatch, "labels misaligned with polygons");
  check_units(units);
  const MapFrame frame(units);
  std::string out = header(kWidth, kHeight) + text(10, 24, title, 16);
  for (std::size_t i = 0; i < units.size(); ++i) {
    out += "<path d=\"" + frame.path(units[i]) + "\" fill=\"" + categorical_color(labels[i]).hex() +
           "\" fill-rule=\"evenodd\" stroke=\"#333333\" stroke-width=\"0.3\"/>\n";
  }
  std::vector<int> distinct(labels.begin(), labels.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  out += "<g id=\"legend\">\n";
  for (std::size_t i = 0; i < distinct.size(); ++i) {
    const double y = 50.0 + 18.0 * static_cast<double>(i);
    out += "<rect x=\"620\" y=\"" + fixed(y) + "\" width=\"12\" height=\"12\" fill=\"" +
           categorical_color(distinct[i]).hex() + "\"/>\n";
    out += text(640, y + 10.0, "Cluster " + std::to_string(distinct[i]));
  }
  out += "</g>\n</svg>\n";
  return out;
}

std::string choropleth_continuous(std::span<const MultiPolygon> units, std::span<const double> values,
                                  const std::string& title) {
  if (units.size() != values.size()) fail(ErrorCode::DimensionMismatch, "values misaligned with polygons");
  if (values.empty()) fail(ErrorCode::InvalidArgument, "no values to map");
  for (double v : values)
    if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "non-finite value in choropleth");
  check_units(units);
  const MapFrame frame(units);
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  std::string out = header(kWidth, kHeight) + text(10, 24, title, 16);
  for (std::size_t i = 0; i < units.size(); ++i) {
    const double t = hi > lo ? (values[i] - lo) / (hi - lo) : 0.5;
    out += "<path d=\"" + frame.path(units[i]) + "\" fill=\"" + ramp_color(t).hex() +
           "\" fill-rule=\"evenodd\" stroke=\"#333333\" stroke-width=\"0.3\"/>\n";
  }
  out += "<g id=\"legend\">\n";
  constexpr int steps = 5;
  for (int s = 0; s < steps; ++s) {
    const double t = static_cast<double>(s) / (steps - 1);
    const double y = 50.0 + 18.0 * s;
    out += "<rect x=\"620\" y=\"" + fixed(y) + "\" width=\"12\" height=\"12\" fill=\"" + ramp_color(t).hex() + "\"/>\n";
    out += text(640, y + 10.0, label_number(lo + t * (hi - lo)));
  }
  out += "</g>\n</svg>\n";
  return out;
}

namespace {

struct Axes {
  double x0, x1, y0, y1;
  double left = 70.0, right = 600.0, top = 50.0, bottom = 540.0;

  double px(double x) const { return x1 > x0 ? left + (x - x0) / (x1 - x0) * (right - left) : 0.5 * (left + right); }
  double py(double y) const { return y1 > y0 ? bottom - (y - y0) / (y1 - y0) * (bottom - top) : 0.5 * (top + bottom); }

  std::string frame(const std::string& x_label, const std::string& y_label) const {
    std::string out = "<rect x=\"" + fixed(left) + "\" y=\"" + fixed(top) + "\" width=\"" + fixed(right - left) +
                      "\" height=\"" + fixed(bottom - top) + "\" fill=\"none\" stroke=\"#000000\"/>\n";
    for (int i = 0; i <= 4; ++i) {
      const double fx = x0 + (x1 - x0) * i / 4.0;
      const double fy = y0 + (y1 - y0) * i / 4.0;
      out += text(px(fx) - 10.0, bottom + 16.0, label_number(fx));
      out += text(left - 55.0, py(fy) + 4.0, label_number(fy));
    }
    out += text(0.5 * (left + right) - 30.0, bottom + 40.0, x_label);
    out += text(left, top - 8.0, y_label);
    return out;
  }
};

Axes fit_axes(std::span<const double> xs, std::span<const double> ys) {
  Axes a{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
         std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (double x : xs)
    if (std::isfinite(x)) a.x0 = std::min(a.x0, x), a.x1 = std::max(a.x1, x);
  for (double y : ys)
    if (std::isfinite(y)) a.y0 = std::min(a.y0, y), a.y1 = std::max(a.y1, y);
  if (!std::isfinite(a.x0)) a.x0 = 0.0, a.x1 = 1.0;
  if (!std::isfinite(a.y0)) a.y0 = 0.0, a.y1 = 1.0;
  if (a.y1 == a.y0) a.y0 -= 0.5, a.y1 += 0.5;
  if (a.x1 == a.x0) a.x0 -= 0.5, a.x1 += 0.5;
  return a;
}

}  // namespace

std::string line_chart(const std::vector<Series>& series, const std::string& title, const std::string& x_label,
                       const std::string& y_label) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) fail(ErrorCode::DimensionMismatch, "series x and y differ in length");
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    ys.insert(ys.end(), s.y.begin(), s.y.end());
  }
  const Axes axes = fit_axes(xs, ys);
  std::string out = header(kWidth, kHeight) + text(10, 20, title, 16) + axes.frame(x_label, y_label);
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& line = series[s];
    const int label = line.color_label > 0 ? line.color_label : static_cast<int>(s) + 1;
    const std::string color = line.emphasized ? "#000000" : categorical_color(label).hex();
    std::string points;
    for (std::size_t i = 0; i < line.x.size(); ++i) {
      if (!std::isfinite(line.y[i])) continue;
      points += fixed(axes.px(line.x[i])) + "," + fixed(axes.py(line.y[i])) + " ";
    }
    if (!points.empty()) points.pop_back();
    out += "<polyline points=\"" + points + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" +
           (line.emphasized ? "2.5" : "1.5") + "\"/>\n";
    const double ly = 50.0 + 18.0 * static_cast<double>(s);
    out += "<line x1=\"620\" y1=\"" + fixed(ly) + "\" x2=\"640\" y2=\"" + fixed(ly) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    out += text(646, ly + 4.0, line.name);
  }
  out += "</svg>\n";
  return out;
}

std::string bar_chart(const std::vector<std::string>& labels, std::span<const double> values, const std::string& title) {
  if (labels.size() != values.size()) fail(ErrorCode::DimensionMismatch, "bar labels and values differ in length");
  double extent = 0.0;
  for (double v : values) extent = std::max(extent, std::abs(v));
  if (!(extent > 0.0)) extent = 1.0;
  const double row = 22.0;
  const double height = 60.0 + row * static_cast<double>(labels.size());
  const double zero = 520.0;
  const double half = 250.0;
  std::string out = header(kWidth, height) + text(10, 24, title, 16);
  out += "<line x1=\"" + fixed(zero) + "\" y1=\"40\" x2=\"" + fixed(zero) + "\" y2=\"" + fixed(height - 10.0) +
         "\" stroke=\"#000000\"/>\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double y = 44.0 + row * static_cast<double>(i);
    const double w = std::abs(values[i]) / extent * half;
    const double x = values[i] < 0 ? zero - w : zero;
    out += "<rect x=\"" + fixed(x) + "\" y=\"" + fixed(y) + "\" width=\"" + fixed(w) + "\" height=\"" +
           fixed(row - 6.0) + "\" fill=\"" + (values[i] < 0 ? "#4363d8" : "#e6194b") + "\"/>\n";
    out += text(10, y + 12.0, labels[i] + " (" + label_number(values[i]) + ")");
  }
  out += "</svg>\n";
  return out;
}

std::string scatter_with_curve(std::span<const double> x, std::span<const double> y, std::span<const double> curve_x,
                               std::span<const double> curve_y, const std::string& title, const std::string& x_label,
                               const std::string& y_label) {
  if (x.size() != y.size() || curve_x.size() != curve_y.size()) {
    fail(ErrorCode::DimensionMismatch, "scatter inputs differ in length");
  }
  const Axes axes = fit_axes(x, y);
  std::string out = header(kWidth, kHeight) + text(10, 20, title, 16) + axes.frame(x_label, y_label);
  for (std::size_t i = 0; i < x.size(); ++i) {
    out += "<circle cx=\"" + fixed(axes.px(x[i])) + "\" cy=\"" + fixed(axes.py(y[i])) +
           "\" r=\"2\" fill=\"#4363d8\" fill-opacity=\"0.6\"/>\n";
  }
  std::string points;
  for (std::size_t i = 0; i < curve_x.size(); ++i) points += fixed(axes.px(curve_x[i])) + "," + fixed(axes.py(curve_y[i])) + " ";
  if (!points.empty()) points.pop_back();
  out += "<polyline points=\"" + points + "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"2\"/>\n</svg>\n";
  return out;
}

}  // namespace terracut::svg
