#include "terracut/spatial_graph.hpp"

#include <algorithm>
#include <limits>

#include "terracut/error.hpp"
#include "terracut/parallel.hpp"

namespace terracut {

ContiguityGraph::ContiguityGraph(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                 Construction construction, double radius)
    : neighbors_(n), construction_(construction), radius_(radius) {
  for (const auto& [i, j] : edges) {
    if (i >= n || j >= n) fail(ErrorCode::InvalidArgument, "edge endpoint out of range");
    if (i == j) fail(ErrorCode::InvalidArgument, "self-loop at node " + std::to_string(i));
    neighbors_[i].push_back(j);
    neighbors_[j].push_back(i);
  }
  for (auto& list : neighbors_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
}

std::size_t ContiguityGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& list : neighbors_) twice += list.size();
  return twice / 2;
}

bool ContiguityGraph::adjacent(std::size_t i, std::size_t j) const {
  const auto& list = neighbors_[i];
  return std::binary_search(list.begin(), list.end(), j);
}

std::vector<std::pair<std::size_t, std::size_t>> ContiguityGraph::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(edge_count());
  for (std::size_t i = 0; i < n(); ++i)
    for (std::size_t j : neighbors_[i])
      if (i < j) out.emplace_back(i, j);
  return out;
}

std::string ContiguityGraph::dense_csv() const {
  std::string out;
  out.reserve(n() * n() * 2);
  for (std::size_t i = 0; i < n(); ++i) {
    std::vector<char> row(n(), '0');
    for (std::size_t j : neighbors_[i]) row[j] = '1';
    for (std::size_t j = 0; j < n(); ++j) {
      if (j) out += ',';
      out += row[j];
    }
    out += '\n';
  }
  return out;
}

std::string ContiguityGraph::edge_list_csv() const {
  std::string out = "i,j\n";
  for (const auto& [i, j] : edges()) out += std::to_string(i) + "," + std::to_string(j) + "\n";
  return out;
}

ContiguityGraph distance_adjacency(std::span<const Point> centroids, double r) {
  if (!(r > 0.0)) fail(ErrorCode::InvalidArgument, "radius must be positive");
  const std::size_t n = centroids.size();
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (centroid_distance(centroids[i], centroids[j]) <= r) edges.emplace_back(i, j);
  return ContiguityGraph(n, edges, Construction::Distance, r);
}

ContiguityGraph queen_adjacency(std::span<const MultiPolygon> polygons, double tolerance) {
  const std::size_t n = polygons.size();
  std::vector<BoundingBox> boxes(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (polygons[i].empty()) fail(ErrorCode::DegenerateGeometry, "unit " + std::to_string(i) + " has no polygons");
    for (const Polygon& part : polygons[i]) {
      normalize_ring(part.outer);
      if (!(polygon_area(part) > 0.0)) fail(ErrorCode::DegenerateGeometry, "unit " + std::to_string(i) + " has zero area");
    }
    boxes[i] = bounding_box(polygons[i]);
  }
  // Rows are filled independently, then concatenated in row order.
  std::vector<std::vector<std::size_t>> rows(n);
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!boxes[i].intersects(boxes[j], tolerance)) continue;
      if (boundaries_touch(polygons[i], polygons[j], tolerance)) rows[i].push_back(j);
    }
  });
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : rows[i]) edges.emplace_back(i, j);
  return ContiguityGraph(n, edges, Construction::Queen);
}

std::vector<std::size_t> connected_components(const ContiguityGraph& graph) {
  constexpr std::size_t unset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> component(graph.n(), unset);
  std::vector<std::size_t> stack;
  std::size_t next = 0;
  for (std::size_t start = 0; start < graph.n(); ++start) {
    if (component[start] != unset) continue;
    component[start] = next;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v : graph.neighbors(u)) {
        if (component[v] == unset) {
          component[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  return component;
}

bool is_connected(const ContiguityGraph& graph) {
  const auto component = connected_components(graph);
  return std::all_of(component.begin(), component.end(), [](std::size_t c) { return c == 0; });
}

double min_connecting_radius(std::span<const Point> centroids) {
  const std::size_t n = centroids.size();
  if (n < 2) fail(ErrorCode::InvalidArgument, "min_connecting_radius needs at least 2 centroids");
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<bool> in_tree(n, false);
  double longest = 0.0;
  best[0] = 0.0;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t u = n;
    for (std::size_t v = 0; v < n; ++v)
      if (!in_tree[v] && (u == n || best[v] < best[u])) u = v;
    in_tree[u] = true;
    longest = std::max(longest, best[u]);
    for (std::size_t v = 0; v < n; ++v) {
      if (in_tree[v]) continue;
      const double d = centroid_distance(centroids[u], centroids[v]);
      if (d < best[v]) best[v] = d;
    }
  }
  return longest;
}

}  // namespace terracut
