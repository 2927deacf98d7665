#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "terracut/geometry.hpp"

namespace terracut {

struct SilhouetteResult {
  Eigen::VectorXd values;  // s(i) in [-1, 1]; 0 for members of singleton clusters
  double mean = 0.0;
};

/// Euclidean distance matrix between the rows of x.
template <typename Derived>
Eigen::MatrixXd pairwise_distances(const Eigen::MatrixBase<Derived>& x) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = j + 1; i < n; ++i) d(i, j) = d(j, i) = (x.row(i) - x.row(j)).norm();
  return d;
}

/// Silhouette from a precomputed distance matrix. Throws SingleCluster when
/// fewer than two distinct labels are present.
SilhouetteResult silhouette_from_distances(const Eigen::MatrixXd& distances, std::span<const int> labels);

template <typename Derived>
SilhouetteResult silhouette(const Eigen::MatrixBase<Derived>& x, std::span<const int> labels) {
  return silhouette_from_distances(pairwise_distances(x), labels);
}

struct SweepRow {
  std::size_t k = 0;
  double r = 0.0;
  bool connected = false;
  std::optional<double> silhouette;
  std::string note;  // why a connected cell has no score
};

/// One row per (k, r) cell, sorted by k then r.
struct SweepTable {
  std::vector<SweepRow> rows;

  /// `k,r,silhouette,connected`; unscored cells leave silhouette empty.
  std::string csv() const;
  const SweepRow* find(std::size_t k, double r) const;
};

/// For each r: distance adjacency over the centroids, MST on squared
/// attribute distances, greedy SKATER pruning for every k, silhouette on the
/// scaled attributes. Cells whose graph is disconnected are flagged, not scored.
SweepTable sweep(const Eigen::MatrixXd& scaled, std::span<const Point> centroids, std::vector<std::size_t> k_grid,
                 std::vector<double> r_grid);

/// Best-scoring cell; ties go to the smaller k, then the smaller r.
/// Throws NoValidRow when no cell is scored.
const SweepRow& select_best(const SweepTable& table);

/// Adjusted Rand index between two labelings of the same units.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

}  // namespace terracut
