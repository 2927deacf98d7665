#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "terracut/error.hpp"
#include "terracut/spatial_graph.hpp"

namespace terracut {

/// Tree or graph edge with i < j; cost is the squared attribute distance.
struct WeightedEdge {
  std::size_t i = 0;
  std::size_t j = 0;
  double cost = 0.0;

  friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

/// Lexicographic (i, j) order, the tie-break used throughout.
inline bool edge_index_less(const WeightedEdge& a, const WeightedEdge& b) {
  return a.i != b.i ? a.i < b.i : a.j < b.j;
}

struct SpanningTree {
  std::size_t n = 0;
  std::vector<WeightedEdge> edges;  // sorted by (i, j)
  double total_cost = 0.0;
};

/// Cluster labeling obtained by cutting tree edges.
struct Partition {
  std::size_t k = 0;
  std::vector<int> labels;            // 1..k, numbered by smallest member index
  Eigen::VectorXd cluster_ssd;        // entry c-1 belongs to label c
  double total_ssd = 0.0;
  std::vector<WeightedEdge> cuts;     // in the order they were made
};

/// Two candidate SSD decreases closer than this (relative) count as tied,
/// and the lower edge index wins.
inline constexpr double kCutTieTolerance = 1e-9;

/// One edge per graph edge with cost ||x_i - x_j||^2.
template <typename Derived>
std::vector<WeightedEdge> edge_costs(const ContiguityGraph& graph, const Eigen::MatrixBase<Derived>& x) {
  if (static_cast<std::size_t>(x.rows()) != graph.n()) {
    fail(ErrorCode::DimensionMismatch, "attribute rows (" + std::to_string(x.rows()) + ") != graph nodes (" +
                                           std::to_string(graph.n()) + ")");
  }
  std::vector<WeightedEdge> out;
  out.reserve(graph.edge_count());
  for (const auto& [i, j] : graph.edges()) {
    const auto a = static_cast<Eigen::Index>(i);
    const auto b = static_cast<Eigen::Index>(j);
    out.push_back({i, j, (x.row(a) - x.row(b)).squaredNorm()});
  }
  return out;
}

/// Kruskal with (cost, i, j) ordering, so ties resolve to the lowest edge
/// index. Throws DisconnectedGraph listing the components.
SpanningTree minimum_spanning_tree(std::span<const WeightedEdge> edges, std::size_t n);

/// Sum of squared deviations of the members from their mean (two-pass).
template <typename Derived>
double cluster_ssd(std::span<const std::size_t> members, const Eigen::MatrixBase<Derived>& x) {
  if (members.empty()) fail(ErrorCode::InvalidArgument, "cluster_ssd of an empty cluster");
  Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(x.cols());
  for (std::size_t i : members) mean += x.row(static_cast<Eigen::Index>(i));
  mean /= static_cast<double>(members.size());
  double ssd = 0.0;
  for (std::size_t i : members) ssd += (x.row(static_cast<Eigen::Index>(i)) - mean).squaredNorm();
  return ssd;
}

/// Greedy best-first pruning: k-1 times, removes the forest edge whose cut
/// most decreases total SSD. Throws KOutOfRange unless 1 <= k <= n.
Partition skater_partition(const SpanningTree& tree, const Eigen::Ref<const Eigen::MatrixXd>& x, std::size_t k);

/// The first `count` greedy cuts. Partitions for every k <= count + 1 share
/// a prefix of this sequence.
std::vector<WeightedEdge> skater_cuts(const SpanningTree& tree, const Eigen::Ref<const Eigen::MatrixXd>& x,
                                      std::size_t count);

/// Labels and SSDs after removing `cuts` from the tree.
Partition partition_from_cuts(const SpanningTree& tree, const Eigen::Ref<const Eigen::MatrixXd>& x,
                              std::span<const WeightedEdge> cuts);

/// True if every cluster induces a connected subgraph of `graph`.
bool clusters_connected(const ContiguityGraph& graph, std::span<const int> labels);

}  // namespace terracut
