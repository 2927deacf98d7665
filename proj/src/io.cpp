#include "terracut/io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include "terracut/error.hpp"

namespace terracut::io {

std::string format_number(double value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) fail(ErrorCode::InvalidArgument, "cannot format number");
  return std::string(buffer, end);
}

double parse_number(std::string_view text, const std::string& context) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    fail(ErrorCode::ParseError, context + ": expected a number, got '" + std::string(text) + "'");
  }
  return value;
}

int CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

namespace {

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
    fields.emplace_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace

CsvTable parse_csv(std::string_view text, const std::string& source) {
  CsvTable table;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      if (eol == text.size()) break;
      continue;
    }
    auto fields = split_fields(line);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
    } else {
      if (fields.size() != table.header.size()) {
        fail(ErrorCode::ParseError, source + ":" + std::to_string(line_no) + ": expected " +
                                        std::to_string(table.header.size()) + " fields, found " +
                                        std::to_string(fields.size()));
      }
      table.rows.push_back(std::move(fields));
      table.line_numbers.push_back(line_no);
    }
    if (eol == text.size()) break;
  }
  if (!have_header) fail(ErrorCode::ParseError, source + ": missing header");
  return table;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_text(path), path.string()); }

void write_text_atomic(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoFailure, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) fail(ErrorCode::IoFailure, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::IoFailure, "cannot rename " + tmp.string() + ": " + ec.message());
}

namespace {

Ring parse_ring(const nlohmann::json& coords, const std::string& context) {
  if (!coords.is_array()) fail(ErrorCode::ParseError, context + ": ring is not an array");
  Ring ring;
  ring.reserve(coords.size());
  for (const auto& position : coords) {
    if (!position.is_array() || position.size() < 2 || !position[0].is_number() || !position[1].is_number()) {
      fail(ErrorCode::ParseError, context + ": malformed position");
    }
    ring.emplace_back(position[0].get<double>(), position[1].get<double>());
  }
  try {
    return normalize_ring(ring);
  } catch (const Error& e) {
    fail(ErrorCode::ParseError, context + ": " + e.what());
  }
}

Polygon parse_polygon(const nlohmann::json& rings, const std::string& context) {
  if (!rings.is_array() || rings.empty()) fail(ErrorCode::ParseError, context + ": polygon has no rings");
  Polygon polygon;
  polygon.outer = parse_ring(rings[0], context);
  for (std::size_t i = 1; i < rings.size(); ++i) polygon.holes.push_back(parse_ring(rings[i], context));
  return polygon;
}

std::string feature_id(const nlohmann::json& feature, const std::string& context) {
  const auto props = feature.find("properties");
  if (props == feature.end() || !props->is_object()) fail(ErrorCode::ParseError, context + ": missing properties");
  const auto id = props->find("unit_id");
  if (id == props->end()) fail(ErrorCode::ParseError, context + ": missing property unit_id");
  if (id->is_string()) return id->get<std::string>();
  if (id->is_number_integer()) return std::to_string(id->get<long long>());
  fail(ErrorCode::ParseError, context + ": unit_id must be a string or integer");
}

}  // namespace

std::vector<std::pair<std::string, MultiPolygon>> parse_geojson(std::string_view text, const std::string& source) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::ParseError, source + ": " + e.what());
  }
  if (doc.value("type", "") != "FeatureCollection" || !doc.contains("features") || !doc["features"].is_array()) {
    fail(ErrorCode::ParseError, source + ": expected a FeatureCollection");
  }
  std::vector<std::pair<std::string, MultiPolygon>> out;
  const auto& features = doc["features"];
  for (std::size_t f = 0; f < features.size(); ++f) {
    const std::string context = source + ": feature " + std::to_string(f);
    const auto& feature = features[f];
    std::string id = feature_id(feature, context);
    const auto geom = feature.find("geometry");
    if (geom == feature.end() || !geom->is_object()) fail(ErrorCode::ParseError, context + ": missing geometry");
    const std::string type = geom->value("type", "");
    const auto coords = geom->find("coordinates");
    if (coords == geom->end()) fail(ErrorCode::ParseError, context + ": missing coordinates");
    MultiPolygon parts;
    if (type == "Polygon") {
      parts.push_back(parse_polygon(*coords, context + " (" + id + ")"));
    } else if (type == "MultiPolygon") {
      if (!coords->is_array() || coords->empty()) fail(ErrorCode::ParseError, context + ": empty MultiPolygon");
      for (const auto& poly : *coords) parts.push_back(parse_polygon(poly, context + " (" + id + ")"));
    } else {
      fail(ErrorCode::ParseError, context + ": unsupported geometry type '" + type + "'");
    }
    out.emplace_back(std::move(id), std::move(parts));
  }
  return out;
}

namespace {

nlohmann::json ring_to_json(const Ring& ring) {
  nlohmann::json out = nlohmann::json::array();
  for (const Point& p : ring) out.push_back({p.x(), p.y()});
  out.push_back({ring.front().x(), ring.front().y()});
  return out;
}

}  // namespace

nlohmann::json geometry_to_json(const MultiPolygon& geometry) {
  auto polygon_json = [](const Polygon& polygon) {
    nlohmann::json rings = nlohmann::json::array();
    rings.push_back(ring_to_json(polygon.outer));
    for (const Ring& hole : polygon.holes) rings.push_back(ring_to_json(hole));
    return rings;
  };
  if (geometry.size() == 1) return {{"type", "Polygon"}, {"coordinates", polygon_json(geometry.front())}};
  nlohmann::json parts = nlohmann::json::array();
  for (const Polygon& polygon : geometry) parts.push_back(polygon_json(polygon));
  return {{"type", "MultiPolygon"}, {"coordinates", parts}};
}

std::string dataset_geojson(const Dataset& dataset) {
  nlohmann::json features = nlohmann::json::array();
  for (std::size_t i = 0; i < dataset.n(); ++i) {
    features.push_back({{"type", "Feature"},
                        {"properties", {{"unit_id", dataset.ids[i]}}},
                        {"geometry", geometry_to_json(dataset.geometry[i])}});
  }
  nlohmann::json doc = {{"type", "FeatureCollection"}, {"features", features}};
  return doc.dump() + "\n";
}

std::string dataset_csv(const Dataset& dataset) {
  std::string out = "unit_id";
  const bool with_region = !dataset.regions.empty();
  if (with_region) out += ",region";
  for (const auto& c : dataset.columns) out += "," + c;
  out += "\n";
  for (std::size_t i = 0; i < dataset.n(); ++i) {
    out += dataset.ids[i];
    if (with_region) out += "," + dataset.regions[i];
    for (Eigen::Index j = 0; j < dataset.values.cols(); ++j) {
      out += "," + format_number(dataset.values(static_cast<Eigen::Index>(i), j));
    }
    out += "\n";
  }
  return out;
}

std::vector<std::filesystem::path> write_dataset(const Dataset& dataset, const std::filesystem::path& directory,
                                                 std::string_view stem) {
  const auto csv = directory / (std::string(stem) + ".csv");
  const auto geo = directory / (std::string(stem) + ".geojson");
  write_text_atomic(csv, dataset_csv(dataset));
  write_text_atomic(geo, dataset_geojson(dataset));
  return {csv, geo};
}

}  // namespace terracut::io
