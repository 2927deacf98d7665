#pragma once

#include <span>

#include <Eigen/Core>

namespace terracut {

struct LoessResult {
  Eigen::VectorXd fitted;
  std::size_t degenerate_neighborhoods = 0;  // fits that fell back to a weighted mean
};

/// Tricube-weighted local linear fit evaluated at every x. Each neighbourhood
/// holds the ceil(span * n) nearest points; a neighbourhood whose x values
/// coincide falls back to the weighted mean of its y.
LoessResult loess_fit(std::span<const double> x, std::span<const double> y, double span = 0.75);

}  // namespace terracut
