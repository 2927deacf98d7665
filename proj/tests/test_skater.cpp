#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "terracut/error.hpp"
#include "terracut/skater.hpp"
#include "terracut/spatial_graph.hpp"

using namespace terracut;

namespace {

std::vector<WeightedEdge> to_weighted(const oracle::EdgeList& edges, const Eigen::MatrixXd& x) {
  return edge_costs(ContiguityGraph(static_cast<std::size_t>(x.rows()), edges), x);
}

Eigen::MatrixXd integer_attributes(std::size_t n, std::size_t p, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> u(-5, 5);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = u(rng);
  return x;
}

}  // namespace

TEST_CASE("edge costs are squared attribute distances") {
  Eigen::MatrixXd x(3, 2);
  x << 0, 0, 3, 4, 3, 4;
  const auto edges = edge_costs(ContiguityGraph(3, {{0, 1}, {1, 2}}), x);
  REQUIRE(edges.size() == 2);
  CHECK(edges[0].cost == 25.0);
  CHECK(edges[1].cost == 0.0);
  CHECK_THROWS_AS(edge_costs(ContiguityGraph(4, {{0, 1}}), x), Error);

  std::mt19937_64 rng(3);
  const auto graph = oracle::random_connected_graph(6, 10, rng);
  const Eigen::MatrixXd y = Eigen::MatrixXd::Random(6, 3);
  for (const auto& e : to_weighted(graph, y)) {
    double naive = 0.0;
    for (int c = 0; c < 3; ++c) {
      const double d = y(static_cast<Eigen::Index>(e.i), c) - y(static_cast<Eigen::Index>(e.j), c);
      naive += d * d;
    }
    CHECK(e.cost == doctest::Approx(naive).epsilon(1e-14));
  }
}

TEST_CASE("minimum spanning tree") {
  SUBCASE("triangle") {
    const std::vector<WeightedEdge> tri{{0, 1, 1.0}, {1, 2, 2.0}, {0, 2, 3.0}};
    const SpanningTree t = minimum_spanning_tree(tri, 3);
    CHECK(t.total_cost == 3.0);
    CHECK(t.edges == std::vector<WeightedEdge>{{0, 1, 1.0}, {1, 2, 2.0}});
  }
  SUBCASE("a tree is returned unchanged") {
    const std::vector<WeightedEdge> path{{0, 1, 5.0}, {1, 2, 1.0}, {2, 3, 9.0}};
    CHECK(minimum_spanning_tree(path, 4).edges == path);
  }
  SUBCASE("ties go to the lowest edge index") {
    const std::vector<WeightedEdge> square{{2, 3, 1.0}, {0, 3, 1.0}, {1, 2, 1.0}, {0, 1, 1.0}};
    const SpanningTree t = minimum_spanning_tree(square, 4);
    CHECK(t.edges == std::vector<WeightedEdge>{{0, 1, 1.0}, {0, 3, 1.0}, {1, 2, 1.0}});
  }
  SUBCASE("disconnected input lists the components") {
    try {
      minimum_spanning_tree(std::vector<WeightedEdge>{{0, 1, 1.0}, {2, 3, 1.0}}, 4);
      FAIL("expected DisconnectedGraph");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DisconnectedGraph);
      CHECK(std::string(e.what()).find("components") != std::string::npos);
    }
  }
  SUBCASE("random graphs match exhaustive enumeration") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 40; ++trial) {
      const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 7)(rng);
      const auto graph = oracle::random_connected_graph(n, 12, rng);
      std::vector<WeightedEdge> edges;
      std::vector<oracle::CostEdge> plain;
      for (auto [i, j] : graph) {
        const double cost = std::uniform_int_distribution<int>(0, 12)(rng) / 4.0;
        edges.push_back({i, j, cost});
        plain.push_back({i, j, cost});
      }
      CHECK(minimum_spanning_tree(edges, n).total_cost == oracle::exhaustive_mst_cost(n, plain));
    }
  }
  SUBCASE("cost is invariant under relabeling nodes") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
      const std::size_t n = 9;
      const auto graph = oracle::random_connected_graph(n, 20, rng);
      std::vector<std::size_t> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      std::vector<WeightedEdge> a, b;
      for (auto [i, j] : graph) {
        const double cost = std::uniform_int_distribution<int>(0, 6)(rng);
        a.push_back({i, j, cost});
        b.push_back({std::min(perm[i], perm[j]), std::max(perm[i], perm[j]), cost});
      }
      CHECK(minimum_spanning_tree(a, n).total_cost == minimum_spanning_tree(b, n).total_cost);
    }
  }
}

TEST_CASE("cluster SSD") {
  Eigen::MatrixXd x(3, 2);
  x << 0, 0, 2, 0, 7, 7;
  const std::vector<std::size_t> pair{0, 1}, single{2};
  CHECK(cluster_ssd(pair, x) == 2.0);
  CHECK(cluster_ssd(single, x) == 0.0);
  CHECK_THROWS_AS(cluster_ssd(std::vector<std::size_t>{}, x), Error);

  const Eigen::MatrixXd y = Eigen::MatrixXd::Random(5, 3);
  const std::vector<std::size_t> all{0, 1, 2, 3, 4};
  CHECK(cluster_ssd(all, y) == doctest::Approx(oracle::total_ssd(y, {0, 0, 0, 0, 0})).epsilon(1e-13));
}

TEST_CASE("SKATER partitions") {
  // Path 0-1-2-3 with 1-D attributes 0, 0.1, 10, 10.1.
  Eigen::MatrixXd x(4, 1);
  x << 0, 0.1, 10, 10.1;
  const SpanningTree tree = minimum_spanning_tree(to_weighted({{0, 1}, {1, 2}, {2, 3}}, x), 4);

  const Partition two = skater_partition(tree, x, 2);
  CHECK(two.labels == std::vector<int>{1, 1, 2, 2});
  CHECK(two.total_ssd == doctest::Approx(0.01).epsilon(1e-12));
  REQUIRE(two.cuts.size() == 1);
  CHECK(two.cuts[0].i == 1);
  CHECK(two.cuts[0].j == 2);

  const Partition one = skater_partition(tree, x, 1);
  CHECK(one.cuts.empty());
  CHECK(one.total_ssd == doctest::Approx(cluster_ssd(std::vector<std::size_t>{0, 1, 2, 3}, x)));

  const Partition all = skater_partition(tree, x, 4);
  CHECK(all.total_ssd == 0.0);
  CHECK(all.labels == std::vector<int>{1, 2, 3, 4});

  CHECK_THROWS_AS(skater_partition(tree, x, 0), Error);
  CHECK_THROWS_AS(skater_partition(tree, x, 5), Error);
}

TEST_CASE("greedy cuts match a per-step exhaustive search") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(3, 10)(rng);
    const std::size_t p = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    const Eigen::MatrixXd x = integer_attributes(n, p, rng);
    const auto graph = oracle::random_connected_graph(n, n + 3, rng);
    const SpanningTree tree = minimum_spanning_tree(to_weighted(graph, x), n);
    oracle::EdgeList tree_edges;
    for (const auto& e : tree.edges) tree_edges.emplace_back(e.i, e.j);

    const auto cuts = skater_cuts(tree, x, n - 1);
    oracle::EdgeList made;
    for (const auto& cut : cuts) {
      const auto expected = oracle::best_cut(n, tree_edges, made, x, kCutTieTolerance);
      CHECK(std::make_pair(cut.i, cut.j) == expected);
      made.emplace_back(cut.i, cut.j);
    }
  }
}

TEST_CASE("partition invariants") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 15; ++trial) {
    const std::size_t n = 12;
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(12, 2);
    const auto graph = oracle::random_connected_graph(n, 20, rng);
    const ContiguityGraph g(n, graph);
    const SpanningTree tree = minimum_spanning_tree(edge_costs(g, x), n);
    double previous = std::numeric_limits<double>::infinity();
    std::vector<WeightedEdge> previous_cuts;
    for (std::size_t k = 1; k <= n; ++k) {
      const Partition part = skater_partition(tree, x, k);
      CHECK(part.cuts.size() == k - 1);
      CHECK(part.total_ssd <= previous + 1e-12);
      previous = part.total_ssd;
      // Nested: the k-cluster cuts extend the (k-1)-cluster cuts.
      CHECK(std::equal(previous_cuts.begin(), previous_cuts.end(), part.cuts.begin()));
      previous_cuts = part.cuts;
      CHECK(part.cluster_ssd.sum() == doctest::Approx(part.total_ssd).epsilon(1e-12));
      std::vector<std::size_t> group(n);
      for (std::size_t i = 0; i < n; ++i) group[i] = static_cast<std::size_t>(part.labels[i] - 1);
      CHECK(part.total_ssd == doctest::Approx(oracle::total_ssd(x, group)).epsilon(1e-10).scale(1.0));
      CHECK(clusters_connected(g, part.labels));
      CHECK(oracle::clusters_connected(n, graph, part.labels));
      // Labels are numbered by first appearance.
      int next = 1;
      for (int l : part.labels) {
        CHECK(l <= next);
        if (l == next) ++next;
      }
    }
  }
}
