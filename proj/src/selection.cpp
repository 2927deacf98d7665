#include "terracut/selection.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "terracut/error.hpp"
#include "terracut/io.hpp"
#include "terracut/parallel.hpp"
#include "terracut/skater.hpp"
#include "terracut/spatial_graph.hpp"

namespace terracut {

namespace {

// Dense 0..m-1 ids for arbitrary labels.
std::vector<std::size_t> compact_labels(std::span<const int> labels, std::size_t& count) {
  std::map<int, std::size_t> ids;
  for (int l : labels) ids.emplace(l, 0);
  std::size_t next = 0;
  for (auto& [label, id] : ids) id = next++;
  count = next;
  std::vector<std::size_t> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = ids[labels[i]];
  return out;
}

}  // namespace

SilhouetteResult silhouette_from_distances(const Eigen::MatrixXd& distances, std::span<const int> labels) {
  const std::size_t n = labels.size();
  if (static_cast<std::size_t>(distances.rows()) != n || distances.rows() != distances.cols()) {
    fail(ErrorCode::DimensionMismatch, "distance matrix does not match labels");
  }
  std::size_t k = 0;
  const auto cluster = compact_labels(labels, k);
  if (k < 2) fail(ErrorCode::SingleCluster, "silhouette needs at least two clusters");
  std::vector<double> size(k, 0.0);
  for (std::size_t c : cluster) size[c] += 1.0;

  SilhouetteResult result;
  result.values.resize(static_cast<Eigen::Index>(n));
  std::vector<double> totals(k);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t own = cluster[i];
    if (size[own] < 2.0) {
      result.values(static_cast<Eigen::Index>(i)) = 0.0;
      continue;
    }
    std::fill(totals.begin(), totals.end(), 0.0);
    const auto col = distances.col(static_cast<Eigen::Index>(i));
    for (std::size_t j = 0; j < n; ++j) totals[cluster[j]] += col(static_cast<Eigen::Index>(j));
    const double a = totals[own] / (size[own] - 1.0);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c)
      if (c != own) b = std::min(b, totals[c] / size[c]);
    const double denom = std::max(a, b);
    result.values(static_cast<Eigen::Index>(i)) = denom > 0.0 ? (b - a) / denom : 0.0;
  }
  result.mean = result.values.mean();
  return result;
}

std::string SweepTable::csv() const {
  std::string out = "k,r,silhouette,connected\n";
  for (const auto& row : rows) {
    out += std::to_string(row.k) + "," + io::format_number(row.r) + "," +
           (row.silhouette ? io::format_number(*row.silhouette) : std::string()) + "," +
           (row.connected ? "true" : "false") + "\n";
  }
  return out;
}

const SweepRow* SweepTable::find(std::size_t k, double r) const {
  for (const auto& row : rows)
    if (row.k == k && row.r == r) return &row;
  return nullptr;
}

SweepTable sweep(const Eigen::MatrixXd& scaled, std::span<const Point> centroids, std::vector<std::size_t> k_grid,
                 std::vector<double> r_grid) {
  if (k_grid.empty() || r_grid.empty()) fail(ErrorCode::InvalidArgument, "sweep grids must be nonempty");
  if (static_cast<std::size_t>(scaled.rows()) != centroids.size()) {
    fail(ErrorCode::DimensionMismatch, "attribute rows != centroids");
  }
  std::sort(k_grid.begin(), k_grid.end());
  k_grid.erase(std::unique(k_grid.begin(), k_grid.end()), k_grid.end());
  std::sort(r_grid.begin(), r_grid.end());
  r_grid.erase(std::unique(r_grid.begin(), r_grid.end()), r_grid.end());

  const std::size_t n = centroids.size();
  const Eigen::MatrixXd distances = pairwise_distances(scaled);

  // cells[r][k]
  std::vector<std::vector<SweepRow>> cells(r_grid.size(), std::vector<SweepRow>(k_grid.size()));
  parallel_for(r_grid.size(), [&](std::size_t ri) {
    const double r = r_grid[ri];
    auto& column = cells[ri];
    for (std::size_t ki = 0; ki < k_grid.size(); ++ki) {
      column[ki].k = k_grid[ki];
      column[ki].r = r;
    }
    const ContiguityGraph graph = distance_adjacency(centroids, r);
    if (!is_connected(graph)) return;
    for (auto& row : column) row.connected = true;

    const auto edges = edge_costs(graph, scaled);
    const SpanningTree tree = minimum_spanning_tree(edges, n);
    const std::size_t reachable = std::min(k_grid.back(), n);
    const auto cuts = skater_cuts(tree, scaled, reachable - 1);
    for (auto& row : column) {
      if (row.k < 2) {
        row.note = "single cluster";
        continue;
      }
      if (row.k > n) {
        row.note = "k exceeds the number of units";
        continue;
      }
      const Partition part = partition_from_cuts(tree, scaled, std::span(cuts).first(row.k - 1));
      row.silhouette = silhouette_from_distances(distances, part.labels).mean;
    }
  });

  SweepTable table;
  for (std::size_t ki = 0; ki < k_grid.size(); ++ki)
    for (std::size_t ri = 0; ri < r_grid.size(); ++ri) table.rows.push_back(std::move(cells[ri][ki]));
  return table;
}

const SweepRow& select_best(const SweepTable& table) {
  const SweepRow* best = nullptr;
  for (const auto& row : table.rows) {
    if (!row.connected || !row.silhouette) continue;
    const bool better = !best || *row.silhouette > *best->silhouette ||
                        (*row.silhouette == *best->silhouette &&
                         (row.k < best->k || (row.k == best->k && row.r < best->r)));
    if (better) best = &row;
  }
  if (!best) fail(ErrorCode::NoValidRow, "no connected, scored sweep cell");
  return *best;
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) fail(ErrorCode::DimensionMismatch, "labelings differ in length");
  const std::size_t n = a.size();
  if (n < 2) return 1.0;
  std::size_t ka = 0;
  std::size_t kb = 0;
  const auto ca = compact_labels(a, ka);
  const auto cb = compact_labels(b, kb);
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ka), static_cast<Eigen::Index>(kb));
  for (std::size_t i = 0; i < n; ++i) table(static_cast<Eigen::Index>(ca[i]), static_cast<Eigen::Index>(cb[i])) += 1.0;
  auto pairs = [](double m) { return m * (m - 1.0) / 2.0; };
  const double index = table.unaryExpr(pairs).sum();
  const double rows = table.rowwise().sum().unaryExpr(pairs).sum();
  const double cols = table.colwise().sum().unaryExpr(pairs).sum();
  const double expected = rows * cols / pairs(static_cast<double>(n));
  const double maximum = 0.5 * (rows + cols);
  if (maximum == expected) return 1.0;
  return (index - expected) / (maximum - expected);
}

}  // namespace terracut
