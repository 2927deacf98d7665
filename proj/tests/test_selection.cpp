#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "terracut/error.hpp"
#include "terracut/ingest.hpp"
#include "terracut/selection.hpp"
#include "terracut/skater.hpp"
#include "terracut/spatial_graph.hpp"

using namespace terracut;

TEST_CASE("silhouette fixtures") {
  SUBCASE("two 1-D pairs") {
    Eigen::MatrixXd x(4, 1);
    x << 0, 1, 10, 11;
    const std::vector<int> labels{1, 1, 2, 2};
    const SilhouetteResult s = silhouette(x, labels);
    CHECK(s.values(0) == doctest::Approx(0.90476).epsilon(1e-4));
    CHECK(s.values(1) == doctest::Approx(0.89474).epsilon(1e-4));
    CHECK(s.values(2) == doctest::Approx(0.89474).epsilon(1e-4));
    CHECK(s.values(3) == doctest::Approx(0.90476).epsilon(1e-4));
    CHECK(std::abs(s.mean - 0.8998) < 1e-4);
  }
  SUBCASE("identical points in distant clusters") {
    Eigen::MatrixXd x(4, 2);
    x << 0, 0, 0, 0, 9, 9, 9, 9;
    const SilhouetteResult s = silhouette(x, std::vector<int>{3, 3, 7, 7});
    for (Eigen::Index i = 0; i < 4; ++i) CHECK(s.values(i) == 1.0);
  }
  SUBCASE("all singletons") {
    const SilhouetteResult s = silhouette(Eigen::MatrixXd::Random(5, 2), std::vector<int>{1, 2, 3, 4, 5});
    CHECK(s.values.cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.mean == 0.0);
  }
  SUBCASE("a single cluster is rejected") {
    try {
      silhouette(Eigen::MatrixXd::Random(3, 2), std::vector<int>{1, 1, 1});
      FAIL("expected SingleCluster");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SingleCluster);
    }
  }
}

TEST_CASE("silhouette matches the naive double loop and its invariances") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 25;
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(n, 3);
    std::vector<int> labels(static_cast<std::size_t>(n));
    const int k = std::uniform_int_distribution<int>(2, 6)(rng);
    for (auto& l : labels) l = std::uniform_int_distribution<int>(1, k)(rng);
    labels[0] = 1;
    labels[1] = 2;
    const SilhouetteResult s = silhouette(x, labels);
    const auto naive = oracle::silhouette(x, labels);
    for (Eigen::Index i = 0; i < n; ++i) {
      CHECK(std::abs(s.values(i) - naive[static_cast<std::size_t>(i)]) < 1e-10);
      CHECK(s.values(i) >= -1.0);
      CHECK(s.values(i) <= 1.0);
    }

    // Relabel clusters.
    std::vector<int> relabeled(labels);
    for (auto& l : relabeled) l = 100 - 7 * l;
    CHECK(std::abs(silhouette(x, relabeled).mean - s.mean) < 1e-12);

    // Reorder units.
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::MatrixXd xp(n, 3);
    std::vector<int> lp(labels.size());
    for (Eigen::Index i = 0; i < n; ++i) {
      xp.row(i) = x.row(perm[static_cast<std::size_t>(i)]);
      lp[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
    }
    CHECK(std::abs(silhouette(xp, lp).mean - s.mean) < 1e-12);
  }
}

TEST_CASE("sweep") {
  SynthOptions o;  // 40 units, 4 planted clusters
  const SynthResult synth = synth_dataset(o);
  const Standardized z = standardize(synth.dataset);
  const auto& centroids = synth.dataset.centroids;
  const double rmin = min_connecting_radius(centroids);

  SUBCASE("one large radius, three k values") {
    const SweepTable t = sweep(z.scaled, centroids, {2, 3, 4}, {1e9});
    REQUIRE(t.rows.size() == 3);
    for (const auto& row : t.rows) {
      CHECK(row.connected);
      CHECK(row.silhouette.has_value());
    }
  }
  SUBCASE("radius below the minimum is flagged") {
    const SweepTable t = sweep(z.scaled, centroids, {2, 3}, {0.5 * rmin, rmin});
    REQUIRE(t.rows.size() == 4);
    const SweepRow* low = t.find(2, 0.5 * rmin);
    REQUIRE(low != nullptr);
    CHECK_FALSE(low->connected);
    CHECK_FALSE(low->silhouette.has_value());
    CHECK(t.find(2, rmin)->connected);
  }
  SUBCASE("grid order does not matter") {
    const SweepTable a = sweep(z.scaled, centroids, {4, 2, 3}, {3 * rmin, rmin});
    const SweepTable b = sweep(z.scaled, centroids, {2, 3, 4}, {rmin, 3 * rmin});
    CHECK(a.csv() == b.csv());
  }
  SUBCASE("k outside 2..n carries a note") {
    const SweepTable t = sweep(z.scaled, centroids, {1, 41}, {rmin});
    for (const auto& row : t.rows) {
      CHECK_FALSE(row.silhouette.has_value());
      CHECK_FALSE(row.note.empty());
    }
    CHECK_THROWS_AS(select_best(t), Error);
  }
  SUBCASE("matches clustering each cell separately") {
    const SweepTable t = sweep(z.scaled, centroids, {3}, {rmin});
    const ContiguityGraph g = distance_adjacency(centroids, rmin);
    const SpanningTree tree = minimum_spanning_tree(edge_costs(g, z.scaled), 40);
    const Partition part = skater_partition(tree, z.scaled, 3);
    CHECK(*t.rows[0].silhouette == silhouette(z.scaled, part.labels).mean);
  }
}

TEST_CASE("select_best") {
  SweepTable t;
  t.rows.push_back({5, 1.0, true, 0.4, ""});
  t.rows.push_back({5, 2.0, true, 0.6, ""});
  t.rows.push_back({7, 1.0, true, 0.6, ""});
  t.rows.push_back({7, 2.0, false, std::nullopt, ""});
  const SweepRow& best = select_best(t);
  CHECK(best.k == 5);
  CHECK(best.r == 2.0);

  t.rows[1].silhouette = 0.1;
  CHECK(select_best(t).k == 7);

  SweepTable tie;
  tie.rows.push_back({6, 3.0, true, 0.5, ""});
  tie.rows.push_back({6, 1.0, true, 0.5, ""});
  CHECK(select_best(tie).r == 1.0);

  SweepTable empty;
  empty.rows.push_back({5, 1.0, false, std::nullopt, ""});
  try {
    select_best(empty);
    FAIL("expected NoValidRow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoValidRow);
  }
}

TEST_CASE("adjusted Rand index") {
  const std::vector<int> a{1, 1, 2, 2, 3, 3};
  CHECK(adjusted_rand_index(a, a) == doctest::Approx(1.0));
  CHECK(adjusted_rand_index(a, std::vector<int>{9, 9, 4, 4, 0, 0}) == doctest::Approx(1.0));
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> x(30), y(30);
    for (auto& v : x) v = std::uniform_int_distribution<int>(1, 4)(rng);
    for (auto& v : y) v = std::uniform_int_distribution<int>(1, 5)(rng);
    CHECK(adjusted_rand_index(x, y) == doctest::Approx(oracle::adjusted_rand(x, y)).epsilon(1e-12));
  }
}
