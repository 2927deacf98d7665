// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <string>

#include "oracles.hpp"
#include "support.hpp"
#include "terracut/config.hpp"
#include "terracut/error.hpp"
#include "terracut/ingest.hpp"
#include "terracut/io.hpp"
#include "terracut/multinomial_lasso.hpp"
#include "terracut/pipeline.hpp"
#include "terracut/selection.hpp"
#include "terracut/skater.hpp"
#include "terracut/spatial_graph.hpp"

using namespace terracut;

namespace {

int failures = 0;

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %2d %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* format, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, format, a);
  return buf;
}

// Partitions produced anywhere in this run, checked together by the contiguity criterion.
struct Produced {
  std::size_t n;
  oracle::EdgeList graph;
  std::vector<int> labels;
};
std::vector<Produced> produced;

void record(const ContiguityGraph& g, const std::vector<int>& labels) { produced.push_back({g.n(), g.edges(), labels}); }

Eigen::MatrixXd integer_matrix(std::size_t n, std::size_t p, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> u(-6, 6);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = u(rng);
  return x;
}

struct Labeled {
  Eigen::MatrixXd x;
  std::vector<int> y;
  std::vector<std::size_t> index;
};

Labeled classification_data(std::size_t n, std::size_t p, std::size_t K, double signal, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  for (;;) {
    Eigen::MatrixXd raw(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    for (Eigen::Index i = 0; i < raw.rows(); ++i)
      for (Eigen::Index j = 0; j < raw.cols(); ++j) raw(i, j) = normal(rng);
    Eigen::MatrixXd B(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(K));
    for (Eigen::Index j = 0; j < B.rows(); ++j)
      for (Eigen::Index k = 0; k < B.cols(); ++k) B(j, k) = signal * normal(rng);
    Labeled d;
    d.x = standardize(raw).scaled;
    const Eigen::MatrixXd P = oracle::softmax_probabilities(d.x, Eigen::VectorXd::Zero(B.cols()), B);
    std::vector<std::size_t> counts(K, 0);
    for (Eigen::Index i = 0; i < P.rows(); ++i) {
      std::vector<double> w(K);
      for (std::size_t k = 0; k < K; ++k) w[k] = P(i, static_cast<Eigen::Index>(k));
      const std::size_t c = std::discrete_distribution<std::size_t>(w.begin(), w.end())(rng);
      d.index.push_back(c);
      d.y.push_back(static_cast<int>(c) + 1);
      ++counts[c];
    }
    if (std::all_of(counts.begin(), counts.end(), [](std::size_t c) { return c >= 3; })) return d;
  }
}

void mst_oracle() {
  Stopwatch clock;
  std::mt19937_64 rng(1001);
  int mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 8)(rng);
    const auto graph = oracle::random_connected_graph(n, 14, rng);
    std::vector<WeightedEdge> edges;
    std::vector<oracle::CostEdge> plain;
    for (auto [i, j] : graph) {
      const double cost = std::uniform_int_distribution<int>(0, 40)(rng) / 8.0;  // exact binary fractions
      edges.push_back({i, j, cost});
      plain.push_back({i, j, cost});
    }
    if (minimum_spanning_tree(edges, n).total_cost != oracle::exhaustive_mst_cost(n, plain)) ++mismatches;
  }
  const double t = clock.seconds();
  report(1, "MST oracle", mismatches == 0 && t < 10.0,
         "200 graphs (n <= 8), " + std::to_string(mismatches) + " mismatches vs exhaustive enumeration, " +
             fmt("%.2f s (limit 10 s)", t));
}

void skater_step_optimality() {
  Stopwatch clock;
  std::mt19937_64 rng(2002);
  int steps = 0, mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 12)(rng);
    const std::size_t p = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    const Eigen::MatrixXd x = integer_matrix(n, p, rng);
    const auto tree_edges = oracle::random_connected_graph(n, n - 1, rng);
    const ContiguityGraph g(n, tree_edges);
    const SpanningTree tree = minimum_spanning_tree(edge_costs(g, x), n);
    oracle::EdgeList sorted;
    for (const auto& e : tree.edges) sorted.emplace_back(e.i, e.j);
    oracle::EdgeList made;
    for (const auto& cut : skater_cuts(tree, x, n - 1)) {
      ++steps;
      if (std::make_pair(cut.i, cut.j) != oracle::best_cut(n, sorted, made, x, kCutTieTolerance)) ++mismatches;
      made.emplace_back(cut.i, cut.j);
    }
    for (std::size_t k = 1; k <= n; ++k) record(g, skater_partition(tree, x, k).labels);
  }
  const double t = clock.seconds();
  report(2, "SKATER step optimality", mismatches == 0 && t < 30.0,
         "100 trees (n <= 12, p <= 3), " + std::to_string(steps) + " greedy steps, " + std::to_string(mismatches) +
             " differ from brute-force best cut, " + fmt("%.2f s (limit 30 s)", t));
}

void contiguity_guarantee() {
  std::mt19937_64 rng(3003);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(5, 40)(rng);
    std::vector<Point> c;
    for (std::size_t i = 0; i < n; ++i) c.emplace_back(u(rng), u(rng));
    const double r = min_connecting_radius(c) * (trial % 2 == 0 ? 1.0 : 1.6);
    const ContiguityGraph g = distance_adjacency(c, r);
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(static_cast<Eigen::Index>(n), 3);
    const SpanningTree tree = minimum_spanning_tree(edge_costs(g, x), n);
    for (std::size_t k = 1; k <= n; ++k) record(g, skater_partition(tree, x, k).labels);
  }
  std::size_t violations = 0;
  for (const auto& p : produced)
    if (!oracle::clusters_connected(p.n, p.graph, p.labels)) ++violations;
  report(3, "Contiguity guarantee", violations == 0,
         std::to_string(produced.size()) + " partitions checked by traversal, " + std::to_string(violations) +
             " clusters not connected");
}

void min_radius_oracle() {
  std::mt19937_64 rng(4004);
  std::uniform_real_distribution<double> u(0.0, 5000.0);
  int bad_value = 0, bad_connectivity = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 40)(rng);
    std::vector<Point> c;
    std::vector<std::pair<double, double>> raw;
    for (std::size_t i = 0; i < n; ++i) {
      c.emplace_back(u(rng), u(rng));
      raw.emplace_back(c.back().x(), c.back().y());
    }
    const double r = min_connecting_radius(c);
    if (r != oracle::bisection_radius(raw)) ++bad_value;
    // Connected at r; disconnected at the next-smaller pairwise distance.
    double below = -1.0;
    oracle::EdgeList at_r, at_below;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) {
        const double d = centroid_distance(c[a], c[b]);
        if (d < r) below = std::max(below, d);
      }
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) {
        const double d = centroid_distance(c[a], c[b]);
        if (d <= r) at_r.emplace_back(a, b);
        if (d <= below) at_below.emplace_back(a, b);
      }
    if (!oracle::connected(n, at_r) || !is_connected(distance_adjacency(c, r))) ++bad_connectivity;
    if (n > 1 && below >= 0.0 && (oracle::connected(n, at_below) || is_connected(distance_adjacency(c, below))))
      ++bad_connectivity;
    if (n == 2 && below >= 0.0) ++bad_connectivity;
  }
  report(4, "min_connecting_radius", bad_value == 0 && bad_connectivity == 0,
         "50 centroid sets (n <= 40), " + std::to_string(bad_value) + " differ from the bisection oracle, " +
             std::to_string(bad_connectivity) + " connectivity bracket failures");
}

void silhouette_oracle() {
  bool fixtures = true;
  {
    Eigen::MatrixXd x(4, 1);
    x << 0, 1, 10, 11;
    const SilhouetteResult s = silhouette(x, std::vector<int>{1, 1, 2, 2});
    const double expected[] = {0.90476, 0.89474, 0.89474, 0.90476};
    for (Eigen::Index i = 0; i < 4; ++i) fixtures = fixtures && std::abs(s.values(i) - expected[i]) <= 1e-4;
    fixtures = fixtures && std::abs(s.mean - 0.8998) <= 1e-4;
    Eigen::MatrixXd twin(4, 1);
    twin << 0, 0, 5, 5;
    const SilhouetteResult t = silhouette(twin, std::vector<int>{1, 1, 2, 2});
    fixtures = fixtures && (t.values.array() == 1.0).all();
    const SilhouetteResult singles = silhouette(x, std::vector<int>{1, 2, 3, 4});
    fixtures = fixtures && singles.mean == 0.0 && singles.values.cwiseAbs().maxCoeff() == 0.0;
  }
  std::mt19937_64 rng(5005);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(4, 60)(rng);
    const int k = std::uniform_int_distribution<int>(2, 7)(rng);
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(static_cast<Eigen::Index>(n), 3);
    std::vector<int> labels(n);
    for (auto& l : labels) l = std::uniform_int_distribution<int>(1, k)(rng);
    labels[0] = 1;
    labels[1] = 2;
    const SilhouetteResult s = silhouette(x, labels);
    const auto naive = oracle::silhouette(x, labels);
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(s.values(static_cast<Eigen::Index>(i)) - naive[i]));
  }
  report(5, "Silhouette oracle", fixtures && worst <= 1e-10,
         std::string("fixtures ") + (fixtures ? "match" : "DIFFER") + " (tol 1e-4); 50 random labelings, " +
             fmt("max |diff| vs naive double loop %.3g (tol 1e-10)", worst));
}

void lasso_kkt() {
  Stopwatch clock;
  std::mt19937_64 rng(6006);
  double worst = 0.0;
  int bracket_failures = 0, path_points = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(60, 200)(rng);
    const std::size_t p = std::uniform_int_distribution<std::size_t>(2, 10)(rng);
    const std::size_t K = std::uniform_int_distribution<std::size_t>(2, 5)(rng);
    const Labeled d = classification_data(n, p, K, 1.0, rng);
    const double lmax = lambda_max(d.x, d.y);
    const auto grid = lambda_grid(lmax, 100);
    const LassoFit fit = fit_multinomial_lasso(d.x, d.y, grid);
    for (const auto& c : fit.path) {
      worst = std::max(worst, oracle::kkt_residual(d.x, d.index, c.intercepts, c.slopes, c.lambda));
      ++path_points;
    }
    const double above[] = {1.01 * lmax};
    const double below[] = {0.99 * lmax};
    if ((fit_multinomial_lasso(d.x, d.y, above).path[0].slopes.array() != 0.0).any()) ++bracket_failures;
    if ((fit_multinomial_lasso(d.x, d.y, below).path[0].slopes.array() != 0.0).count() == 0) ++bracket_failures;
  }
  const double t = clock.seconds();
  report(6, "Lasso KKT", worst <= 1e-6 && bracket_failures == 0 && t < 60.0,
         "20 datasets, " + std::to_string(path_points) + fmt(" path points, max KKT residual %.3g (tol 1e-6), ", worst) +
             std::to_string(bracket_failures) + " lambda_max bracketing failures, " + fmt("%.2f s (limit 60 s)", t));
}

void binomial_reduction() {
  std::mt19937_64 rng(7007);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(50, 200)(rng);
    const std::size_t p = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
    const Labeled d = classification_data(n, p, 2, 1.0, rng);
    const double lambda = lambda_max(d.x, d.y) * (0.05 + 0.09 * trial);
    const double path[] = {lambda};
    const CoefficientMatrix c = fit_multinomial_lasso(d.x, d.y, path).path[0];
    std::vector<int> first;
    for (auto k : d.index) first.push_back(k == 0 ? 1 : 0);
    const auto [b0, beta] = oracle::binomial_lasso(d.x, first, lambda);
    for (Eigen::Index i = 0; i < d.x.rows(); ++i) {
      const double expected = 1.0 / (1.0 + std::exp(-(b0 + d.x.row(i).dot(beta))));
      worst = std::max(worst, std::abs(predict_proba(c, d.x.row(i).transpose())(0) - expected));
    }
  }
  report(7, "Binomial reduction", worst <= 1e-5,
         fmt("10 datasets, max fitted-probability gap vs proximal-gradient binomial lasso %.3g (tol 1e-5)", worst));
}

void planted_recovery() {
  SynthOptions o;
  o.seed = 1;
  o.n = 120;
  o.p = 4;
  o.clusters = 4;
  const SynthResult s = synth_dataset(o);
  const Standardized z = standardize(s.dataset);
  const double r = min_connecting_radius(s.dataset.centroids);
  const ContiguityGraph g = distance_adjacency(s.dataset.centroids, r);
  const SpanningTree tree = minimum_spanning_tree(edge_costs(g, z.scaled), s.dataset.n());
  const Partition part = skater_partition(tree, z.scaled, 4);
  const bool contiguous = oracle::clusters_connected(g.n(), g.edges(), part.labels);
  const double ari = adjusted_rand_index(part.labels, s.truth);
  const double ari_oracle = oracle::adjusted_rand(part.labels, s.truth);

  const SweepTable table = sweep(z.scaled, s.dataset.centroids, {2, 3, 4, 5, 6, 7, 8}, {r});
  const SweepRow& best = select_best(table);
  const bool pass = contiguous && ari >= 0.95 && std::abs(ari - ari_oracle) < 1e-12 && best.k == 4;
  report(8, "Planted-structure recovery", pass,
         fmt("n=120 p=4 seed=1: ARI at k=4 %.4f (min 0.95)", ari) + fmt(", oracle ARI %.4f", ari_oracle) +
             ", silhouette argmax over k=2..8 is k=" + std::to_string(best.k) + fmt(" (%.4f)", *best.silhouette));
}

void pipeline_checks() {
  RunConfig config;  // defaults throughout
  const RunConfig defaults;
  SynthOptions o;
  o.seed = 1;
  o.n = 606;
  o.p = 13;
  o.clusters = 15;
  config.synth = o;

  support::TempDir dir;
  config.output_dir = dir / "first";
  Stopwatch clock;
  PipelineResult first;
  std::string error;
  try {
    first = run_pipeline(config);
  } catch (const std::exception& e) {
    error = e.what();
  }
  const double t = clock.seconds();

  // Configuration fidelity.
  {
    bool grids = defaults.k_grid.size() == 16 && defaults.k_grid.front() == 5 && defaults.k_grid.back() == 20;
    for (std::size_t k = 0; k + 1 < defaults.k_grid.size(); ++k) grids = grids && defaults.k_grid[k + 1] == defaults.k_grid[k] + 1;
    const std::vector<double> expected_r{15.5e4, 55.5e4, 95.5e4, 175.5e4, 10e9};
    grids = grids && defaults.r_grid.size() == expected_r.size();
    for (std::size_t i = 0; grids && i < expected_r.size(); ++i) grids = defaults.r_grid[i] && *defaults.r_grid[i] == expected_r[i];
    const bool k15 = defaults.k == 15 && error.empty() && first.k == 15;
    const bool rmin = !defaults.radius && error.empty() && first.radius == first.min_radius;
    bool table_shape = false;
    std::string shape = "n/a";
    if (error.empty()) {
      const CoefficientTable table =
          parse_coefficient_table(io::read_text(dir / "first" / "coefficients.csv"), "coefficients.csv");
      const std::size_t rows = static_cast<std::size_t>(table.coefs.slopes.rows()) + 1;
      const std::size_t cols = static_cast<std::size_t>(table.coefs.slopes.cols());
      shape = std::to_string(rows) + " x " + std::to_string(cols);
      table_shape = rows == 14 && cols == 15 && table.covariates.size() == 13;
    }
    const std::string sweep_csv = error.empty() ? io::read_text(dir / "first" / "sweep.csv") : "";
    const auto sweep_rows = std::count(sweep_csv.begin(), sweep_csv.end(), '\n') - 1;
    report(9, "Configuration fidelity", grids && k15 && rmin && table_shape && sweep_rows == 80,
           std::string("k=15 ") + (k15 ? "yes" : "NO") + ", r=min_connecting_radius " + (rmin ? "yes" : "NO") +
               ", k grid 5..20 and 5 radii " + (grids ? "yes" : "NO") + ", sweep rows " + std::to_string(sweep_rows) +
               ", coefficient table " + shape + " (intercept + 13 covariates by K)");
  }

  // Determinism and scale.
  config.output_dir = dir / "second";
  std::string second_hash;
  try {
    second_hash = run_pipeline(config).manifest_hash;
  } catch (const std::exception& e) {
    if (error.empty()) error = e.what();
  }
  const bool pass = error.empty() && t < 60.0 && second_hash == first.manifest_hash;
  report(10, "Determinism & scale", pass,
         error.empty() ? fmt("606 x 13 pipeline (16 x 5 sweep + CV fit) in %.2f s (limit 60 s), ", t) +
                             "manifest hashes " + (second_hash == first.manifest_hash ? "identical" : "DIFFER") +
                             " (" + first.manifest_hash.substr(0, 16) + "...)"
                       : "pipeline failed: " + error);
}

}  // namespace

int main() {
  const std::pair<const char*, void (*)()> criteria[] = {
      {"MST oracle", mst_oracle},
      {"SKATER step optimality", skater_step_optimality},
      {"Contiguity guarantee", contiguity_guarantee},
      {"min_connecting_radius", min_radius_oracle},
      {"Silhouette oracle", silhouette_oracle},
      {"Lasso KKT", lasso_kkt},
      {"Binomial reduction", binomial_reduction},
      {"Planted-structure recovery", planted_recovery},
      {"Configuration fidelity / determinism & scale", pipeline_checks},
  };
  int id = 0;
  for (const auto& [name, body] : criteria) {
    ++id;
    try {
      body();
    } catch (const std::exception& e) {
      report(id, name, false, std::string("threw: ") + e.what());
    }
  }
  std::printf("%s\n", failures == 0 ? "all criteria passed" : (std::to_string(failures) + " criteria failed").c_str());
  return failures == 0 ? 0 : 1;
}
