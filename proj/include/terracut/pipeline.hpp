#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "terracut/config.hpp"
#include "terracut/ingest.hpp"

namespace terracut {

struct PipelineResult {
  std::vector<std::filesystem::path> artifacts;  // relative to the output directory
  std::string manifest_hash;                     // sha256 of manifest.json
  double radius = 0.0;                           // contiguity radius used for clustering (0 for queen)
  double min_radius = 0.0;
  std::size_t k = 0;
  int reference = 0;
  double lambda = 0.0;
};

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

/// Dataset named by the config: the attribute/geometry files, or the
/// synthetic generator.
Dataset load_configured_dataset(const RunConfig& config);

/// Runs ingest, graph, sweep, cluster, report and fit in sequence and writes
/// every artifact plus manifest.json under config.output_dir. Module errors
/// are rethrown with the failing stage named.
PipelineResult run_pipeline(const RunConfig& config);

}  // namespace terracut
