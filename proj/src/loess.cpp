#include "terracut/loess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "terracut/error.hpp"

namespace terracut {

LoessResult loess_fit(std::span<const double> x, std::span<const double> y, double span) {
  const std::size_t n = x.size();
  if (y.size() != n) fail(ErrorCode::DimensionMismatch, "loess x and y differ in length");
  if (n < 3) fail(ErrorCode::InvalidArgument, "loess needs at least 3 points");
  if (!(span > 0.0 && span <= 1.0)) fail(ErrorCode::InvalidArgument, "loess span must be in (0, 1]");
  const std::size_t q = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(span * static_cast<double>(n))), 1, n);

  LoessResult result;
  result.fitted.resize(static_cast<Eigen::Index>(n));
  std::vector<std::size_t> order(n);
  std::vector<double> distance(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) distance[j] = std::abs(x[j] - x[i]);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return distance[a] < distance[b]; });
    const double h = distance[order[q - 1]];

    double sw = 0.0, swx = 0.0, swy = 0.0, swxx = 0.0, swxy = 0.0;
    for (std::size_t m = 0; m < q; ++m) {
      const std::size_t j = order[m];
      double w = 1.0;
      if (h > 0.0) {
        const double u = distance[j] / h;
        w = u < 1.0 ? std::pow(1.0 - u * u * u, 3) : 0.0;
      }
      const double dx = x[j] - x[i];  // centred on the target for conditioning
      sw += w;
      swx += w * dx;
      swy += w * y[j];
      swxx += w * dx * dx;
      swxy += w * dx * y[j];
    }
    const double var = swxx - swx * swx / sw;
    if (h == 0.0 || !(var > 1e-12 * swxx) || !(var > 0.0)) {
      result.fitted(static_cast<Eigen::Index>(i)) = swy / sw;
      ++result.degenerate_neighborhoods;
      continue;
    }
    const double slope = (swxy - swx * swy / sw) / var;
    const double intercept = (swy - slope * swx) / sw;
    result.fitted(static_cast<Eigen::Index>(i)) = intercept;  // dx = 0 at the target
  }
  return result;
}

}  // namespace terracut
