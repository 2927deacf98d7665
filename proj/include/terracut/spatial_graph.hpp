#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "terracut/geometry.hpp"

namespace terracut {

/// Snap tolerance (metres) for the queen boundary predicate.
inline constexpr double kQueenTolerance = 1e-9;

enum class Construction { Queen, Distance, Explicit };

/// Symmetric, self-loop free adjacency over units 0..n-1 (dataset order).
class ContiguityGraph {
 public:
  ContiguityGraph() = default;

  /// Builds from an undirected edge list; duplicates are merged. Throws
  /// InvalidArgument on self-loops or out-of-range nodes.
  ContiguityGraph(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                  Construction construction = Construction::Explicit, double radius = 0.0);

  std::size_t n() const { return neighbors_.size(); }
  std::size_t edge_count() const;
  const std::vector<std::size_t>& neighbors(std::size_t i) const { return neighbors_[i]; }
  bool adjacent(std::size_t i, std::size_t j) const;

  /// Edges with i < j in lexicographic order.
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

  Construction construction() const { return construction_; }
  double radius() const { return radius_; }

  /// Dense 0/1 matrix, one row per line.
  std::string dense_csv() const;
  /// `i,j` header followed by edges().
  std::string edge_list_csv() const;

 private:
  std::vector<std::vector<std::size_t>> neighbors_;
  Construction construction_ = Construction::Explicit;
  double radius_ = 0.0;
};

/// Euclidean distance used by every centroid computation in the library.
inline double centroid_distance(const Point& a, const Point& b) {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  return std::sqrt(dx * dx + dy * dy);
}

/// w_ij = 1 iff d_ij <= r (the boundary is adjacent). O(n^2).
ContiguityGraph distance_adjacency(std::span<const Point> centroids, double r);

/// i ~ j iff the polygon boundaries share a vertex or an edge stretch.
ContiguityGraph queen_adjacency(std::span<const MultiPolygon> polygons, double tolerance = kQueenTolerance);

bool is_connected(const ContiguityGraph& graph);

/// Component id per node, numbered by smallest member.
std::vector<std::size_t> connected_components(const ContiguityGraph& graph);

/// Longest edge of the Euclidean minimum spanning tree over the centroids
/// (Prim, O(n^2)): the smallest r for which distance_adjacency is connected.
double min_connecting_radius(std::span<const Point> centroids);

}  // namespace terracut
