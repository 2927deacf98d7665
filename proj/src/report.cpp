#include "terracut/report.hpp"

#include <cmath>
#include <map>
#include <unordered_map>

#include "terracut/error.hpp"
#include "terracut/io.hpp"

namespace terracut {

std::vector<ClusterProfile> cluster_profiles(const Dataset& dataset, std::span<const int> labels,
                                             const Standardization& params) {
  if (labels.size() != dataset.n()) fail(ErrorCode::DimensionMismatch, "partition misaligned with dataset");
  const Eigen::MatrixXd scaled = params.apply(dataset.values);
  const Eigen::VectorXd national = dataset.values.colwise().mean().transpose();
  std::map<int, std::vector<Eigen::Index>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(static_cast<Eigen::Index>(i));

  std::vector<ClusterProfile> out;
  for (const auto& [cluster, rows] : groups) {
    ClusterProfile profile;
    profile.cluster = cluster;
    profile.scaled_means = scaled(rows, Eigen::all).colwise().mean().transpose();
    profile.unscaled_means = dataset.values(rows, Eigen::all).colwise().mean().transpose();
    profile.national_means = national;
    for (auto r : rows) profile.members.push_back(dataset.ids[static_cast<std::size_t>(r)]);
    out.push_back(std::move(profile));
  }
  return out;
}

std::size_t closest_to_national(const std::vector<ClusterProfile>& profiles) {
  if (profiles.empty()) fail(ErrorCode::InvalidArgument, "no profiles");
  std::size_t best = 0;
  for (std::size_t c = 1; c < profiles.size(); ++c)
    if (profiles[c].scaled_means.squaredNorm() < profiles[best].scaled_means.squaredNorm()) best = c;
  return best;
}

nlohmann::json profiles_json(const std::vector<ClusterProfile>& profiles, const std::vector<std::string>& columns) {
  auto named = [&](const Eigen::VectorXd& v) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t j = 0; j < columns.size(); ++j) obj[columns[j]] = v(static_cast<Eigen::Index>(j));
    return obj;
  };
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : profiles) {
    out.push_back({{"cluster", p.cluster},
                   {"size", p.members.size()},
                   {"scaled_means", named(p.scaled_means)},
                   {"unscaled_means", named(p.unscaled_means)},
                   {"national_means", named(p.national_means)},
                   {"members", p.members}});
  }
  return out;
}

std::string partition_csv(const Dataset& dataset, std::span<const int> labels) {
  if (labels.size() != dataset.n()) fail(ErrorCode::DimensionMismatch, "partition misaligned with dataset");
  std::string out = "unit_id,cluster\n";
  for (std::size_t i = 0; i < labels.size(); ++i) out += dataset.ids[i] + "," + std::to_string(labels[i]) + "\n";
  return out;
}

std::vector<int> read_partition_csv(const Dataset& dataset, std::string_view csv, const std::string& source) {
  const io::CsvTable table = io::parse_csv(csv, source);
  const int id_col = table.column("unit_id");
  const int cluster_col = table.column("cluster");
  if (id_col < 0 || cluster_col < 0) fail(ErrorCode::ParseError, source + ": expected unit_id,cluster columns");
  std::unordered_map<std::string, int> by_id;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string context = source + ":" + std::to_string(table.line_numbers[r]);
    const double v = io::parse_number(table.rows[r][cluster_col], context);
    if (v != std::floor(v)) fail(ErrorCode::ParseError, context + ": cluster must be an integer");
    if (!by_id.emplace(table.rows[r][id_col], static_cast<int>(v)).second) {
      fail(ErrorCode::InvalidArgument, context + ": duplicate unit_id " + table.rows[r][id_col]);
    }
  }
  std::vector<int> labels;
  labels.reserve(dataset.n());
  for (const auto& id : dataset.ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) fail(ErrorCode::IdMismatch, source + ": no cluster for unit " + id);
    labels.push_back(it->second);
  }
  if (by_id.size() != dataset.n()) fail(ErrorCode::IdMismatch, source + ": partition lists units not in the dataset");
  return labels;
}

std::string cuts_csv(const Dataset& dataset, const Partition& partition) {
  std::string out = "order,i,j,unit_i,unit_j,cost\n";
  for (std::size_t c = 0; c < partition.cuts.size(); ++c) {
    const auto& e = partition.cuts[c];
    out += std::to_string(c + 1) + "," + std::to_string(e.i) + "," + std::to_string(e.j) + "," + dataset.ids[e.i] +
           "," + dataset.ids[e.j] + "," + io::format_number(e.cost) + "\n";
  }
  return out;
}

nlohmann::json ssd_json(const Partition& partition) {
  nlohmann::json clusters = nlohmann::json::array();
  for (Eigen::Index c = 0; c < partition.cluster_ssd.size(); ++c) {
    clusters.push_back({{"cluster", c + 1}, {"ssd", partition.cluster_ssd(c)}});
  }
  return {{"k", partition.k}, {"total_ssd", partition.total_ssd}, {"clusters", clusters}};
}

std::string curves_csv(const std::string& variable, std::span<const double> grid, const Eigen::MatrixXd& curves,
                       const std::vector<int>& classes) {
  if (static_cast<std::size_t>(curves.rows()) != grid.size() || static_cast<std::size_t>(curves.cols()) != classes.size()) {
    fail(ErrorCode::DimensionMismatch, "curve matrix does not match grid and classes");
  }
  std::string out = "var,grid_value,cluster,prob\n";
  for (std::size_t g = 0; g < grid.size(); ++g)
    for (std::size_t k = 0; k < classes.size(); ++k)
      out += variable + "," + io::format_number(grid[g]) + "," + std::to_string(classes[k]) + "," +
             io::format_number(curves(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(k))) + "\n";
  return out;
}

}  // namespace terracut
