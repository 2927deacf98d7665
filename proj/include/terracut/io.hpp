#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "terracut/geometry.hpp"
#include "terracut/ingest.hpp"

namespace terracut::io {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

/// Parses a full field as a double; throws ParseError mentioning `context`.
double parse_number(std::string_view text, const std::string& context);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line per row

  /// Index of a header column, or -1.
  int column(std::string_view name) const;
};

/// Plain comma-separated text: no quoting, blank lines skipped, header required.
CsvTable parse_csv(std::string_view text, const std::string& source);
CsvTable read_csv(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);

/// Writes through a temporary sibling and renames it into place.
void write_text_atomic(const std::filesystem::path& path, std::string_view content);

/// unit_id -> geometry from a FeatureCollection of Polygon/MultiPolygon features.
std::vector<std::pair<std::string, MultiPolygon>> parse_geojson(std::string_view text, const std::string& source);

nlohmann::json geometry_to_json(const MultiPolygon& geometry);
std::string dataset_geojson(const Dataset& dataset);

/// unit_id[,region],<columns...>
std::string dataset_csv(const Dataset& dataset);

/// Writes <stem>.csv and <stem>.geojson under `directory`; returns both paths.
std::vector<std::filesystem::path> write_dataset(const Dataset& dataset, const std::filesystem::path& directory,
                                                 std::string_view stem = "dataset");


}  // namespace terracut::io
