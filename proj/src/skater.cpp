#include "terracut/skater.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>

namespace terracut {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> rank_;
};

WeightedEdge normalized(WeightedEdge e) {
  if (e.i > e.j) std::swap(e.i, e.j);
  return e;
}

// Component labels over the forest left after removing `cuts`, numbered
// 0.. by smallest member.
std::vector<std::size_t> forest_components(const SpanningTree& tree, std::span<const WeightedEdge> cuts) {
  std::vector<std::pair<std::size_t, std::size_t>> kept;
  for (const auto& e : tree.edges) {
    const bool cut = std::any_of(cuts.begin(), cuts.end(), [&](const WeightedEdge& c) {
      return c.i == e.i && c.j == e.j;
    });
    if (!cut) kept.emplace_back(e.i, e.j);
  }
  return connected_components(ContiguityGraph(tree.n, kept));
}

}  // namespace

SpanningTree minimum_spanning_tree(std::span<const WeightedEdge> edges, std::size_t n) {
  std::vector<WeightedEdge> sorted;
  sorted.reserve(edges.size());
  for (const auto& e : edges) {
    if (e.i >= n || e.j >= n) fail(ErrorCode::InvalidArgument, "edge endpoint out of range");
    if (e.i == e.j) fail(ErrorCode::InvalidArgument, "self-loop in edge list");
    sorted.push_back(normalized(e));
  }
  std::sort(sorted.begin(), sorted.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    return edge_index_less(a, b);
  });

  SpanningTree tree;
  tree.n = n;
  DisjointSets sets(n);
  for (const auto& e : sorted) {
    if (sets.unite(e.i, e.j)) {
      tree.edges.push_back(e);
      tree.total_cost += e.cost;
      if (tree.edges.size() + 1 == n) break;
    }
  }
  if (n > 0 && tree.edges.size() + 1 != n) {
    std::map<std::size_t, std::vector<std::size_t>> components;
    for (std::size_t v = 0; v < n; ++v) components[sets.find(v)].push_back(v);
    std::string message = std::to_string(components.size()) + " components:";
    for (const auto& [root, members] : components) {
      message += " {";
      for (std::size_t m = 0; m < members.size() && m < 8; ++m) message += (m ? "," : "") + std::to_string(members[m]);
      if (members.size() > 8) message += ",... (" + std::to_string(members.size()) + " nodes)";
      message += "}";
    }
    fail(ErrorCode::DisconnectedGraph, message);
  }
  std::sort(tree.edges.begin(), tree.edges.end(), edge_index_less);
  return tree;
}

std::vector<WeightedEdge> skater_cuts(const SpanningTree& tree, const Eigen::Ref<const Eigen::MatrixXd>& x,
                                      std::size_t count) {
  const std::size_t n = tree.n;
  if (static_cast<std::size_t>(x.rows()) != n) fail(ErrorCode::DimensionMismatch, "attribute rows != tree nodes");
  if (n > 0 && tree.edges.size() + 1 != n) fail(ErrorCode::InvalidArgument, "not a spanning tree");
  if (count + 1 > std::max<std::size_t>(n, 1)) {
    fail(ErrorCode::KOutOfRange, "cannot make " + std::to_string(count) + " cuts in a tree of " + std::to_string(n) + " nodes");
  }
  const Eigen::Index p = x.cols();

  // Forest as adjacency lists of edge indices; cut edges are flagged.
  std::vector<std::vector<std::size_t>> incident(n);
  for (std::size_t e = 0; e < tree.edges.size(); ++e) {
    incident[tree.edges[e].i].push_back(e);
    incident[tree.edges[e].j].push_back(e);
  }
  std::vector<bool> removed(tree.edges.size(), false);

  Eigen::MatrixXd sum(n, p);
  Eigen::VectorXd sq(n);
  std::vector<double> size(n);
  std::vector<std::size_t> parent_edge(n);
  std::vector<std::size_t> root_of(n);
  std::vector<std::size_t> order;
  std::vector<bool> visited(n);
  std::vector<std::size_t> stack;
  order.reserve(n);

  auto ssd = [](double m, const auto& s, double q) { return std::max(0.0, q - s.squaredNorm() / m); };

  std::vector<WeightedEdge> cuts;
  for (std::size_t step = 0; step < count; ++step) {
    // Root each component at its smallest node and accumulate subtree stats in post-order.
    std::fill(visited.begin(), visited.end(), false);
    order.clear();
    constexpr std::size_t none = static_cast<std::size_t>(-1);
    for (std::size_t root = 0; root < n; ++root) {
      if (visited[root]) continue;
      const std::size_t begin = order.size();
      visited[root] = true;
      parent_edge[root] = none;
      stack.assign(1, root);
      while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        order.push_back(u);
        root_of[u] = root;
        for (std::size_t e : incident[u]) {
          if (removed[e]) continue;
          const std::size_t v = tree.edges[e].i == u ? tree.edges[e].j : tree.edges[e].i;
          if (visited[v]) continue;
          visited[v] = true;
          parent_edge[v] = e;
          stack.push_back(v);
        }
      }
      for (std::size_t idx = order.size(); idx-- > begin;) {
        const std::size_t u = order[idx];
        const auto r = static_cast<Eigen::Index>(u);
        sum.row(r) = x.row(r);
        sq(r) = x.row(r).squaredNorm();
        size[u] = 1.0;
      }
      for (std::size_t idx = order.size(); idx-- > begin + 1;) {
        const std::size_t u = order[idx];
        const auto& e = tree.edges[parent_edge[u]];
        const std::size_t parent = e.i == u ? e.j : e.i;
        sum.row(static_cast<Eigen::Index>(parent)) += sum.row(static_cast<Eigen::Index>(u));
        sq(static_cast<Eigen::Index>(parent)) += sq(static_cast<Eigen::Index>(u));
        size[parent] += size[u];
      }
    }

    // Edges are stored in (i, j) order, so scanning them in index order and
    // only accepting strict improvements keeps the lowest index among ties.
    std::size_t best_edge = none;
    double best_decrease = 0.0;
    std::vector<std::size_t> child_of_edge(tree.edges.size(), none);
    for (std::size_t v = 0; v < n; ++v)
      if (parent_edge[v] != none) child_of_edge[parent_edge[v]] = v;
    for (std::size_t e = 0; e < tree.edges.size(); ++e) {
      if (removed[e]) continue;
      const std::size_t child = child_of_edge[e];
      const auto c = static_cast<Eigen::Index>(child);
      const auto r = static_cast<Eigen::Index>(root_of[child]);
      const double whole = ssd(size[root_of[child]], sum.row(r), sq(r));
      const double below = ssd(size[child], sum.row(c), sq(c));
      const double above = ssd(size[root_of[child]] - size[child], sum.row(r) - sum.row(c), sq(r) - sq(c));
      const double decrease = whole - below - above;
      if (best_edge == none || decrease > best_decrease + kCutTieTolerance * std::max(1.0, std::abs(best_decrease))) {
        best_edge = e;
        best_decrease = decrease;
      }
    }
    removed[best_edge] = true;
    cuts.push_back(tree.edges[best_edge]);
  }
  return cuts;
}

Partition partition_from_cuts(const SpanningTree& tree, const Eigen::Ref<const Eigen::MatrixXd>& x,
                              std::span<const WeightedEdge> cuts) {
  const auto component = forest_components(tree, cuts);
  Partition part;
  part.k = tree.n == 0 ? 0 : *std::max_element(component.begin(), component.end()) + 1;
  part.labels.resize(tree.n);
  std::vector<std::vector<std::size_t>> members(part.k);
  for (std::size_t v = 0; v < tree.n; ++v) {
    part.labels[v] = static_cast<int>(component[v]) + 1;
    members[component[v]].push_back(v);
  }
  part.cluster_ssd.resize(static_cast<Eigen::Index>(part.k));
  for (std::size_t c = 0; c < part.k; ++c) {
    part.cluster_ssd(static_cast<Eigen::Index>(c)) = cluster_ssd(std::span<const std::size_t>(members[c]), x);
  }
  part.total_ssd = part.cluster_ssd.sum();
  part.cuts.assign(cuts.begin(), cuts.end());
  return part;
}

Partition skater_partition(const SpanningTree& tree, const Eigen::Ref<const Eigen::MatrixXd>& x, std::size_t k) {
  if (k < 1 || k > tree.n) {
    fail(ErrorCode::KOutOfRange, "k = " + std::to_string(k) + " outside [1, " + std::to_string(tree.n) + "]");
  }
  const auto cuts = skater_cuts(tree, x, k - 1);
  return partition_from_cuts(tree, x, cuts);
}

bool clusters_connected(const ContiguityGraph& graph, std::span<const int> labels) {
  if (labels.size() != graph.n()) fail(ErrorCode::DimensionMismatch, "labels misaligned with graph");
  std::vector<std::pair<std::size_t, std::size_t>> within;
  for (const auto& [i, j] : graph.edges())
    if (labels[i] == labels[j]) within.emplace_back(i, j);
  const auto component = connected_components(ContiguityGraph(graph.n(), within));
  // Connected clusters <=> one induced component per distinct label.
  std::map<int, std::size_t> first;
  for (std::size_t v = 0; v < graph.n(); ++v) {
    const auto [it, inserted] = first.emplace(labels[v], component[v]);
    if (!inserted && it->second != component[v]) return false;
  }
  return true;
}

}  // namespace terracut
