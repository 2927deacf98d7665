#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "terracut/geometry.hpp"

namespace terracut::svg {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  std::string hex() const;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

inline constexpr std::size_t kPaletteSize = 15;

/// Fixed categorical palette; label c (1-based) maps to entry (c-1) mod 15.
const std::array<Rgb, kPaletteSize>& palette();
Rgb categorical_color(int label);

/// Endpoints of the continuous ramp.
inline constexpr Rgb kRampLow{255, 247, 188};
inline constexpr Rgb kRampHigh{217, 95, 14};

/// Linear RGB interpolation, t clamped to [0, 1], channels rounded to nearest.
Rgb ramp_color(double t);

std::string escape(std::string_view text);

/// One <path> per unit, filled by cluster label, with a legend.
std::string choropleth_categorical(std::span<const MultiPolygon> units, std::span<const int> labels,
                                   const std::string& title);

/// One <path> per unit, filled on the continuous ramp from min to max, with a legend.
std::string choropleth_continuous(std::span<const MultiPolygon> units, std::span<const double> values,
                                  const std::string& title);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool emphasized = false;
  int color_label = 0;  // palette entry; 0 picks by series index
};

std::string line_chart(const std::vector<Series>& series, const std::string& title, const std::string& x_label,
                       const std::string& y_label);

/// Horizontal bars, one per label, coloured by sign.
std::string bar_chart(const std::vector<std::string>& labels, std::span<const double> values, const std::string& title);

/// Scatter points plus a fitted curve drawn through (curve_x, curve_y).
std::string scatter_with_curve(std::span<const double> x, std::span<const double> y, std::span<const double> curve_x,
                               std::span<const double> curve_y, const std::string& title, const std::string& x_label,
                               const std::string& y_label);

}  // namespace terracut::svg
