// terracut: regionalization and cluster-membership modelling from the command line.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "terracut/config.hpp"
#include "terracut/error.hpp"
#include "terracut/ingest.hpp"
#include "terracut/io.hpp"
#include "terracut/multinomial_lasso.hpp"
#include "terracut/pipeline.hpp"
#include "terracut/report.hpp"
#include "terracut/selection.hpp"
#include "terracut/skater.hpp"
#include "terracut/spatial_graph.hpp"
#include "terracut/svg.hpp"

namespace fs = std::filesystem;
using namespace terracut;

namespace {

// Flags are collected as config settings and applied after the config file, so flags win.
struct Settings {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value
  std::map<std::string, std::string> flags;

  RunConfig build() const {
    RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) fail(ErrorCode::InvalidArgument, "--set expects key=value, got " + kv);
      apply_setting(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    for (const auto& [key, value] : flags) apply_setting(config, key, value);
    return config;
  }
};

void add_flag(CLI::App* app, Settings& s, const std::string& flag, const std::string& key, const std::string& help) {
  app->add_option_function<std::string>(flag, [&s, key](const std::string& v) { s.flags[key] = v; }, help);
}

void add_common(CLI::App* app, Settings& s) {
  app->add_option("--config", s.config_path, "TOML-style run configuration");
  app->add_option("--set", s.overrides, "Override a setting, e.g. --set cluster.k=10");
  add_flag(app, s, "--attributes", "input.attributes", "Attribute CSV (unit_id + columns)");
  add_flag(app, s, "--geometry", "input.geometry", "GeoJSON FeatureCollection with unit_id properties");
  add_flag(app, s, "--mode", "input.mode", "Attribute mode: indicators | raw");
  add_flag(app, s, "--seed", "seed", "Seed for every random stream");
}

void add_graph_flags(CLI::App* app, Settings& s) {
  add_flag(app, s, "--adjacency", "graph.mode", "distance | queen");
  add_flag(app, s, "--radius", "graph.radius", "Contiguity radius in metres, or 'min'");
}

void print_json(const nlohmann::json& j) { std::cout << j.dump(2) << "\n"; }

Dataset dataset_of(const RunConfig& c) { return load_configured_dataset(c); }

ContiguityGraph graph_of(const RunConfig& c, const Dataset& d, double& radius) {
  if (c.adjacency == AdjacencyMode::Queen) {
    radius = 0.0;
    return queen_adjacency(d.geometry);
  }
  radius = c.radius.value_or(min_connecting_radius(d.centroids));
  return distance_adjacency(d.centroids, radius);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"terracut: contiguity-constrained clustering and penalized multinomial profiling"};
  app.require_subcommand(1);
  Settings s;
  std::string out_dir = ".";
  std::string out_file;
  std::string dense_file;
  std::string partition_path;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic planted-cluster dataset");
  SynthOptions synth_opts;
  synth->add_option("--seed", synth_opts.seed, "Seed");
  synth->add_option("--n", synth_opts.n, "Number of units");
  synth->add_option("--p", synth_opts.p, "Number of attributes");
  synth->add_option("--clusters", synth_opts.clusters, "Planted clusters");
  synth->add_option("--cell-size", synth_opts.cell_size, "Grid cell side in metres");
  synth->add_option("--separation", synth_opts.separation, "Spread of planted cluster means");
  synth->add_option("--out", out_dir, "Output directory");

  auto* ingest = app.add_subcommand("ingest", "Load, validate and dump a dataset");
  add_common(ingest, s);
  ingest->add_option("--out", out_dir, "Output directory");

  auto* graph = app.add_subcommand("graph", "Build the contiguity graph");
  add_common(graph, s);
  add_graph_flags(graph, s);
  graph->add_option("--out", out_file, "Edge-list CSV (i,j)")->required();
  graph->add_option("--dense", dense_file, "Also write a dense 0/1 matrix CSV");

  auto* cluster = app.add_subcommand("cluster", "SKATER partition into k contiguous clusters");
  add_common(cluster, s);
  add_graph_flags(cluster, s);
  add_flag(cluster, s, "--k", "cluster.k", "Number of clusters (default 15)");
  cluster->add_option("--out", out_dir, "Output directory");

  auto* sweep_cmd = app.add_subcommand("sweep", "Silhouette sweep over k and r");
  add_common(sweep_cmd, s);
  add_flag(sweep_cmd, s, "--k-grid", "sweep.k_grid", "e.g. 5:20 or 2,3,4");
  add_flag(sweep_cmd, s, "--r-grid", "sweep.r_grid", "Radii in metres; 'min' = minimum connecting radius");
  sweep_cmd->add_option("--out", out_dir, "Output directory");

  auto* fit_cmd = app.add_subcommand("fit", "Penalized multinomial model of cluster membership");
  add_common(fit_cmd, s);
  fit_cmd->add_option("--partition", partition_path, "Partition CSV (unit_id,cluster)")->required();
  add_flag(fit_cmd, s, "--lambda", "fit.lambda", "'cv' or a fixed penalty");
  add_flag(fit_cmd, s, "--folds", "fit.folds", "Cross-validation folds");
  add_flag(fit_cmd, s, "--reference", "fit.reference", "Reference cluster or 'auto'");
  fit_cmd->add_option("--out", out_dir, "Output directory");

  auto* report = app.add_subcommand("report", "Cluster profiles and maps for a partition");
  add_common(report, s);
  report->add_option("--partition", partition_path, "Partition CSV (unit_id,cluster)")->required();
  report->add_option("--out", out_dir, "Output directory");

  auto* pipeline = app.add_subcommand("pipeline", "Run every stage and write a manifest");
  add_common(pipeline, s);
  add_graph_flags(pipeline, s);
  add_flag(pipeline, s, "--k", "cluster.k", "Number of clusters (default 15)");
  add_flag(pipeline, s, "--lambda", "fit.lambda", "'cv' or a fixed penalty");
  add_flag(pipeline, s, "--out", "output.dir", "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*synth) {
      const SynthResult r = synth_dataset(synth_opts);
      io::write_dataset(r.dataset, out_dir);
      std::string truth = "unit_id,cluster\n";
      for (std::size_t i = 0; i < r.truth.size(); ++i) truth += r.dataset.ids[i] + "," + std::to_string(r.truth[i]) + "\n";
      io::write_text_atomic(fs::path(out_dir) / "truth.csv", truth);
      print_json({{"n", r.dataset.n()}, {"p", r.dataset.p()}, {"out", out_dir}});
      return 0;
    }

    const RunConfig config = s.build();
    if (*pipeline) {
      const PipelineResult r = run_pipeline(config);
      print_json({{"manifest_hash", r.manifest_hash},
                  {"artifacts", r.artifacts.size()},
                  {"k", r.k},
                  {"radius", r.radius},
                  {"lambda", r.lambda},
                  {"reference_cluster", r.reference}});
      return 0;
    }

    const Dataset d = dataset_of(config);
    const fs::path out = out_dir;

    if (*ingest) {
      io::write_dataset(d, out);
      print_json({{"n", d.n()}, {"p", d.p()}, {"columns", d.columns}});
    } else if (*graph) {
      double radius = 0.0;
      const ContiguityGraph g = graph_of(config, d, radius);
      io::write_text_atomic(out_file, g.edge_list_csv());
      if (!dense_file.empty()) io::write_text_atomic(dense_file, g.dense_csv());
      print_json({{"n", g.n()}, {"edges", g.edge_count()}, {"radius", radius}, {"connected", is_connected(g)}});
    } else if (*cluster) {
      double radius = 0.0;
      const ContiguityGraph g = graph_of(config, d, radius);
      const Standardized z = standardize(d);
      const SpanningTree tree = minimum_spanning_tree(edge_costs(g, z.scaled), d.n());
      const Partition part = skater_partition(tree, z.scaled, config.k);
      io::write_text_atomic(out / "partition.csv", partition_csv(d, part.labels));
      io::write_text_atomic(out / "cuts.csv", cuts_csv(d, part));
      io::write_text_atomic(out / "ssd.json", ssd_json(part).dump(2) + "\n");
      io::write_text_atomic(out / "cluster_map.svg", svg::choropleth_categorical(d.geometry, part.labels, "SKATER clusters"));
      print_json({{"k", part.k}, {"radius", radius}, {"total_ssd", part.total_ssd}});
    } else if (*sweep_cmd) {
      const Standardized z = standardize(d);
      const double rmin = min_connecting_radius(d.centroids);
      std::vector<double> radii;
      for (const auto& r : config.r_grid) radii.push_back(r.value_or(rmin));
      const SweepTable table = sweep(z.scaled, d.centroids, config.k_grid, radii);
      io::write_text_atomic(out / "sweep.csv", table.csv());
      std::vector<svg::Series> series;
      std::sort(radii.begin(), radii.end());
      radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
      for (double r : radii) {
        svg::Series line;
        line.name = "r = " + io::format_number(r);
        line.emphasized = r == rmin;
        for (const auto& row : table.rows) {
          if (row.r != r) continue;
          line.x.push_back(static_cast<double>(row.k));
          line.y.push_back(row.silhouette.value_or(std::nan("")));
        }
        series.push_back(std::move(line));
      }
      io::write_text_atomic(out / "sweep.svg", svg::line_chart(series, "Silhouette by number of clusters", "k", "silhouette"));
      const SweepRow& best = select_best(table);
      print_json({{"best_k", best.k}, {"best_r", best.r}, {"silhouette", *best.silhouette}, {"min_connecting_radius", rmin}});
    } else if (*fit_cmd) {
      const Standardized z = standardize(d);
      const std::vector<int> labels = read_partition_csv(d, io::read_text(partition_path), partition_path);
      std::vector<double> path = lambda_grid(lambda_max(z.scaled, labels), config.path_length);
      nlohmann::json info;
      if (config.lambda_policy == LambdaPolicy::CrossValidated) {
        const CrossValidation cv = cv_lambda(z.scaled, labels, config.folds, config.seed, config.path_length);
        path.resize(cv.selected_index + 1);
        info["cv_selected_lambda"] = cv.selected_lambda;
      } else {
        std::vector<double> trimmed;
        for (double l : path)
          if (l > config.lambda) trimmed.push_back(l);
        trimmed.push_back(config.lambda);
        path = trimmed;
      }
      const LassoFit fit = fit_multinomial_lasso(z.scaled, labels, path);
      const CoefficientMatrix& coefs = fit.path.back();
      std::size_t ref = 0;
      if (config.reference) {
        const auto it = std::find(fit.classes.begin(), fit.classes.end(), *config.reference);
        if (it == fit.classes.end()) fail(ErrorCode::BadReference, "no cluster " + std::to_string(*config.reference));
        ref = static_cast<std::size_t>(it - fit.classes.begin());
      } else {
        ref = closest_to_national(cluster_profiles(d, labels, z.params));
      }
      io::write_text_atomic(out / "coefficients.csv", coefficient_table_csv(coefs, d.columns, fit.classes));
      io::write_text_atomic(out / "coefficients_vs_reference.csv",
                            coefficient_table_csv(contrasts_vs_reference(coefs, ref), d.columns, fit.classes));
      std::vector<double> grid;
      for (int g = -30; g <= 30; ++g) grid.push_back(g / 10.0);
      std::string curves;
      for (std::size_t j = 0; j < d.p(); ++j) {
        std::string block = curves_csv(d.columns[j], grid, probability_curves(coefs, z.scaled, j, grid), fit.classes);
        curves += j == 0 ? block : block.substr(block.find('\n') + 1);
      }
      io::write_text_atomic(out / "curves.csv", curves);
      info["lambda"] = coefs.lambda;
      info["deviance"] = fit.diagnostics.back().deviance;
      info["iterations"] = fit.diagnostics.back().iterations;
      info["reference_cluster"] = fit.classes[ref];
      io::write_text_atomic(out / "fit.json", info.dump(2) + "\n");
      print_json(info);
    } else if (*report) {
      const Standardized z = standardize(d);
      const std::vector<int> labels = read_partition_csv(d, io::read_text(partition_path), partition_path);
      const auto profiles = cluster_profiles(d, labels, z.params);
      io::write_text_atomic(out / "profiles.json", profiles_json(profiles, d.columns).dump(2) + "\n");
      for (const auto& p : profiles) {
        std::vector<double> means(p.scaled_means.data(), p.scaled_means.data() + p.scaled_means.size());
        io::write_text_atomic(out / ("profile_cluster_" + std::to_string(p.cluster) + ".svg"),
                              svg::bar_chart(d.columns, means, "Cluster " + std::to_string(p.cluster) + ": scaled means"));
      }
      io::write_text_atomic(out / "cluster_map.svg", svg::choropleth_categorical(d.geometry, labels, "Clusters"));
      std::vector<double> first(d.values.col(0).data(), d.values.col(0).data() + d.n());
      io::write_text_atomic(out / "map.svg", svg::choropleth_continuous(d.geometry, first, d.columns[0]));
      print_json({{"clusters", profiles.size()}, {"reference_candidate", profiles[closest_to_national(profiles)].cluster}});
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "terracut: " << e.what() << "\n";
    return exit_status(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "terracut: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "terracut: " << e.what() << "\n";
    return 2;
  }
}
