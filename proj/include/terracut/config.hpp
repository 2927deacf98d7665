#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "terracut/ingest.hpp"

namespace terracut {

enum class AdjacencyMode { Distance, Queen };
enum class LambdaPolicy { Fixed, CrossValidated };

/// Sweep radii used by default (metres).
const std::vector<double>& default_radius_grid();

/// Everything one pipeline run depends on. Radii left unset mean "the
/// minimum connecting radius of the centroids".
struct RunConfig {
  std::filesystem::path attributes;
  std::filesystem::path geometry;
  AttributeMode attribute_mode = AttributeMode::Indicators;
  std::optional<SynthOptions> synth;  // used when no attribute file is given

  AdjacencyMode adjacency = AdjacencyMode::Distance;
  std::optional<double> radius;
  std::size_t k = 15;

  bool run_sweep = true;
  std::vector<std::size_t> k_grid;          // default 5..20
  std::vector<std::optional<double>> r_grid;  // nullopt entries = minimum connecting radius

  LambdaPolicy lambda_policy = LambdaPolicy::CrossValidated;
  double lambda = 0.0;
  std::size_t folds = 5;
  std::size_t path_length = 100;
  std::optional<int> reference;  // cluster label; unset = closest to the national average

  double loess_span = 0.75;
  std::filesystem::path output_dir = "terracut_out";
  std::uint64_t seed = 1;

  RunConfig();

  /// Throws InvalidArgument on inconsistent settings.
  void validate() const;

  /// Canonical echo of every setting that affects results (the output
  /// directory is excluded so reruns elsewhere hash identically).
  nlohmann::json to_json() const;
};

/// Applies one `key = value` setting; unknown keys throw InvalidArgument.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Parses `key = value` lines with optional `[section]` headers (keys become
/// `section.key`) and `#` comments.
std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text, const std::string& source);

RunConfig load_config(const std::filesystem::path& path);

}  // namespace terracut
