#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "terracut/ingest.hpp"
#include "terracut/skater.hpp"

namespace terracut {

struct ClusterProfile {
  int cluster = 0;
  Eigen::VectorXd scaled_means;
  Eigen::VectorXd unscaled_means;
  Eigen::VectorXd national_means;
  std::vector<std::string> members;
};

/// Per-cluster means of the scaled and raw attributes plus the national
/// (all-unit) raw means, ordered by cluster id.
std::vector<ClusterProfile> cluster_profiles(const Dataset& dataset, std::span<const int> labels,
                                             const Standardization& params);

/// Index of the profile whose scaled means lie closest (Euclidean) to the
/// national average, i.e. to the origin of the scaled space.
std::size_t closest_to_national(const std::vector<ClusterProfile>& profiles);

nlohmann::json profiles_json(const std::vector<ClusterProfile>& profiles, const std::vector<std::string>& columns);

/// `unit_id,cluster`
std::string partition_csv(const Dataset& dataset, std::span<const int> labels);

/// Reads `unit_id,cluster` and returns labels aligned to the dataset order.
std::vector<int> read_partition_csv(const Dataset& dataset, std::string_view csv, const std::string& source);

/// `order,i,j,unit_i,unit_j,cost`
std::string cuts_csv(const Dataset& dataset, const Partition& partition);

nlohmann::json ssd_json(const Partition& partition);

/// `var,grid_value,cluster,prob`
std::string curves_csv(const std::string& variable, std::span<const double> grid, const Eigen::MatrixXd& curves,
                       const std::vector<int>& classes);

}  // namespace terracut
