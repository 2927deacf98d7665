#include "terracut/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>

#include <openssl/evp.h>

#include "terracut/error.hpp"
#include "terracut/io.hpp"
#include "terracut/loess.hpp"
#include "terracut/multinomial_lasso.hpp"
#include "terracut/report.hpp"
#include "terracut/selection.hpp"
#include "terracut/skater.hpp"
#include "terracut/spatial_graph.hpp"
#include "terracut/svg.hpp"

namespace terracut {

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    fail(ErrorCode::IoFailure, "sha256 failed");
  }
  std::string out;
  char byte[3];
  for (unsigned int i = 0; i < length; ++i) {
    std::snprintf(byte, sizeof(byte), "%02x", digest[i]);
    out += byte;
  }
  return out;
}

Dataset load_configured_dataset(const RunConfig& config) {
  if (!config.attributes.empty()) return load_dataset(config.attributes, config.geometry, config.attribute_mode);
  return synth_dataset(*config.synth).dataset;
}

namespace {

template <typename F>
auto stage(const std::string& name, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.code(), "stage " + name + ": " + e.what());
  }
}

class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path root) : root_(std::move(root)) {}

  void write(const std::string& relative, const std::string& content) {
    io::write_text_atomic(root_ / relative, content);
    entries_.push_back({{"path", relative}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
    paths_.emplace_back(relative);
  }

  const nlohmann::json& entries() const { return entries_; }
  const std::vector<std::filesystem::path>& paths() const { return paths_; }

 private:
  std::filesystem::path root_;
  nlohmann::json entries_ = nlohmann::json::array();
  std::vector<std::filesystem::path> paths_;
};

std::string safe_name(std::string s) {
  for (char& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') c = '_';
  return s;
}

int column_index(const Dataset& d, std::string_view name) {
  for (std::size_t j = 0; j < d.columns.size(); ++j)
    if (d.columns[j] == name) return static_cast<int>(j);
  return -1;
}

}  // namespace

PipelineResult run_pipeline(const RunConfig& config) {
  config.validate();
  PipelineResult result;
  ArtifactWriter out(config.output_dir);

  const Dataset dataset = stage("ingest", [&] { return load_configured_dataset(config); });
  const Standardized z = stage("ingest", [&] { return standardize(dataset); });
  out.write("dataset.csv", io::dataset_csv(dataset));
  out.write("dataset.geojson", io::dataset_geojson(dataset));

  // Graph.
  result.min_radius = stage("graph", [&] { return min_connecting_radius(dataset.centroids); });
  const ContiguityGraph graph = stage("graph", [&] {
    if (config.adjacency == AdjacencyMode::Queen) return queen_adjacency(dataset.geometry);
    result.radius = config.radius.value_or(result.min_radius);
    return distance_adjacency(dataset.centroids, result.radius);
  });
  out.write("graph_edges.csv", graph.edge_list_csv());
  if (graph.n() <= 200) out.write("graph_dense.csv", graph.dense_csv());

  // Silhouette sweep over (k, r).
  nlohmann::json selection = nullptr;
  if (config.run_sweep) {
    const SweepTable table = stage("sweep", [&] {
      std::vector<double> radii;
      for (const auto& r : config.r_grid) radii.push_back(r.value_or(result.min_radius));
      return sweep(z.scaled, dataset.centroids, config.k_grid, radii);
    });
    out.write("sweep.csv", table.csv());
    std::vector<double> radii;
    for (const auto& row : table.rows)
      if (std::find(radii.begin(), radii.end(), row.r) == radii.end()) radii.push_back(row.r);
    std::vector<svg::Series> series;
    for (double r : radii) {
      svg::Series s;
      s.name = "r = " + io::format_number(r);
      s.emphasized = r == result.radius;
      for (const auto& row : table.rows) {
        if (row.r != r) continue;
        s.x.push_back(static_cast<double>(row.k));
        s.y.push_back(row.silhouette.value_or(std::nan("")));
      }
      series.push_back(std::move(s));
    }
    out.write("sweep.svg", svg::line_chart(series, "Silhouette by number of clusters", "k", "silhouette"));
    try {
      const SweepRow& best = select_best(table);
      selection = {{"k", best.k}, {"r", best.r}, {"silhouette", *best.silhouette}};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoValidRow) throw;
    }
  }

  // Clustering.
  const Partition partition = stage("cluster", [&] {
    const auto edges = edge_costs(graph, z.scaled);
    const SpanningTree tree = minimum_spanning_tree(edges, dataset.n());
    return skater_partition(tree, z.scaled, config.k);
  });
  if (!clusters_connected(graph, partition.labels)) fail(ErrorCode::InvalidArgument, "stage cluster: disconnected cluster");
  result.k = partition.k;
  out.write("partition.csv", partition_csv(dataset, partition.labels));
  out.write("cuts.csv", cuts_csv(dataset, partition));
  out.write("ssd.json", ssd_json(partition).dump(2) + "\n");
  out.write("cluster_map.svg", stage("report", [&] {
              return svg::choropleth_categorical(dataset.geometry, partition.labels,
                                                 "SKATER clusters (k = " + std::to_string(partition.k) + ")");
            }));

  // Profiles and descriptive plots.
  const auto profiles = cluster_profiles(dataset, partition.labels, z.params);
  out.write("profiles.json", profiles_json(profiles, dataset.columns).dump(2) + "\n");
  for (const auto& p : profiles) {
    std::vector<double> means(p.scaled_means.data(), p.scaled_means.data() + p.scaled_means.size());
    out.write("profile_cluster_" + std::to_string(p.cluster) + ".svg",
              svg::bar_chart(dataset.columns, means, "Cluster " + std::to_string(p.cluster) + ": scaled means"));
  }
  {
    std::vector<double> first(dataset.values.col(0).data(), dataset.values.col(0).data() + dataset.n());
    out.write("map_" + safe_name(dataset.columns[0]) + ".svg",
              stage("report", [&] { return svg::choropleth_continuous(dataset.geometry, first, dataset.columns[0]); }));
  }
  if (dataset.p() >= 2 && dataset.n() >= 3) {
    int y_col = column_index(dataset, "coverage");
    std::vector<int> x_cols;
    for (std::string_view name : {"female_employment_rate", "grandparent_rate", "ivsm"}) {
      const int c = column_index(dataset, name);
      if (c >= 0) x_cols.push_back(c);
    }
    if (y_col < 0 || x_cols.empty()) {
      y_col = 0;
      x_cols = {1};
    }
    for (int xc : x_cols) {
      std::vector<std::size_t> order(dataset.n());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return dataset.values(a, xc) < dataset.values(b, xc); });
      std::vector<double> xs, ys;
      for (std::size_t i : order) {
        xs.push_back(dataset.values(static_cast<Eigen::Index>(i), xc));
        ys.push_back(dataset.values(static_cast<Eigen::Index>(i), y_col));
      }
      const LoessResult smooth = stage("report", [&] { return loess_fit(xs, ys, config.loess_span); });
      std::vector<double> fitted(smooth.fitted.data(), smooth.fitted.data() + smooth.fitted.size());
      out.write("scatter_" + safe_name(dataset.columns[y_col]) + "_vs_" + safe_name(dataset.columns[xc]) + ".svg",
                svg::scatter_with_curve(xs, ys, xs, fitted, dataset.columns[y_col] + " vs " + dataset.columns[xc],
                                        dataset.columns[xc], dataset.columns[y_col]));
    }
  }

  // Penalized multinomial model.
  if (partition.k >= 2) {
    const std::vector<int>& y = partition.labels;
    LassoOptions options;
    std::vector<double> path;
    nlohmann::json cv_json = nullptr;
    const double lmax = lambda_max(z.scaled, y);
    stage("fit", [&] {
      const std::vector<double> full = lambda_grid(lmax, config.path_length);
      if (config.lambda_policy == LambdaPolicy::CrossValidated) {
        // Small clusters cannot appear in every fold; use as many folds as the smallest allows.
        std::size_t smallest = y.size();
        for (const auto& profile : profiles) smallest = std::min(smallest, profile.members.size());
        const std::size_t folds = std::min(config.folds, smallest);
        if (folds < 2)
          fail(ErrorCode::FoldTooSmall, "a singleton cluster prevents cross-validation; set fit.lambda to a number");
        const CrossValidation cv = cv_lambda(z.scaled, y, folds, config.seed, config.path_length, options);
        path.assign(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(cv.selected_index) + 1);
        std::string csv = "lambda,mean_deviance\n";
        for (std::size_t l = 0; l < cv.lambdas.size(); ++l)
          csv += io::format_number(cv.lambdas[l]) + "," + io::format_number(cv.mean_deviance[l]) + "\n";
        out.write("cv.csv", csv);
        cv_json = {{"folds", config.folds}, {"folds_used", folds}, {"selected_index", cv.selected_index}, {"selected_lambda", cv.selected_lambda}};
      } else {
        for (double l : full)
          if (l > config.lambda) path.push_back(l);
        path.push_back(config.lambda);
      }
      return 0;
    });
    const LassoFit fit = stage("fit", [&] { return fit_multinomial_lasso(z.scaled, y, path, options); });
    const CoefficientMatrix& coefs = fit.path.back();
    const FitDiagnostics& diag = fit.diagnostics.back();
    result.lambda = coefs.lambda;

    std::size_t reference_index = 0;
    if (config.reference) {
      const auto it = std::find(fit.classes.begin(), fit.classes.end(), *config.reference);
      if (it == fit.classes.end()) fail(ErrorCode::BadReference, "stage fit: no cluster " + std::to_string(*config.reference));
      reference_index = static_cast<std::size_t>(it - fit.classes.begin());
    } else {
      reference_index = closest_to_national(profiles);
    }
    result.reference = fit.classes[reference_index];

    out.write("coefficients.csv", coefficient_table_csv(coefs, dataset.columns, fit.classes));
    out.write("coefficients_vs_reference.csv",
              coefficient_table_csv(contrasts_vs_reference(coefs, reference_index), dataset.columns, fit.classes));
    nlohmann::json fit_json = {{"lambda", coefs.lambda},
                               {"lambda_max", lmax},
                               {"deviance", diag.deviance},
                               {"objective", diag.objective},
                               {"iterations", diag.iterations},
                               {"objective_change", diag.objective_change},
                               {"reference_cluster", result.reference},
                               {"lambda_policy", config.lambda_policy == LambdaPolicy::Fixed ? "fixed" : "cv"}};
    if (!cv_json.is_null()) fit_json["cv"] = cv_json;
    out.write("fit.json", fit_json.dump(2) + "\n");

    std::vector<double> grid;
    for (int g = -30; g <= 30; ++g) grid.push_back(g / 10.0);
    for (std::size_t j = 0; j < dataset.p(); ++j) {
      const Eigen::MatrixXd curves = probability_curves(coefs, z.scaled, j, grid);
      const std::string name = safe_name(dataset.columns[j]);
      out.write("curves_" + name + ".csv", curves_csv(dataset.columns[j], grid, curves, fit.classes));
      std::vector<svg::Series> series;
      for (std::size_t k = 0; k < fit.classes.size(); ++k) {
        svg::Series s;
        s.name = "Cluster " + std::to_string(fit.classes[k]);
        s.color_label = fit.classes[k];
        s.x = grid;
        for (std::size_t g = 0; g < grid.size(); ++g) s.y.push_back(curves(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(k)));
        series.push_back(std::move(s));
      }
      out.write("curves_" + name + ".svg",
                svg::line_chart(series, "Predicted cluster probabilities", "scaled " + dataset.columns[j], "probability"));
    }
  }

  const nlohmann::json config_echo = config.to_json();
  nlohmann::json manifest = {{"tool", "terracut"},
                             {"version", TERRACUT_VERSION},
                             {"seed", config.seed},
                             {"config", config_echo},
                             {"config_hash", sha256_hex(config_echo.dump())},
                             {"n", dataset.n()},
                             {"p", dataset.p()},
                             {"clustering", {{"k", result.k}, {"radius", result.radius}, {"min_connecting_radius", result.min_radius}}},
                             {"sweep_best", selection},
                             {"artifacts", out.entries()}};
  if (partition.k >= 2) manifest["fit"] = {{"lambda", result.lambda}, {"reference_cluster", result.reference}};
  const std::string manifest_text = manifest.dump(2) + "\n";
  io::write_text_atomic(config.output_dir / "manifest.json", manifest_text);
  result.manifest_hash = sha256_hex(manifest_text);
  result.artifacts = out.paths();
  result.artifacts.emplace_back("manifest.json");
  return result;
}

}  // namespace terracut
