#include "terracut/config.hpp"

#include <algorithm>
#include <cmath>

#include "terracut/error.hpp"
#include "terracut/io.hpp"

namespace terracut {

const std::vector<double>& default_radius_grid() {
  static const std::vector<double> grid{15.5e4, 55.5e4, 95.5e4, 175.5e4, 10e9};
  return grid;
}

RunConfig::RunConfig() {
  for (std::size_t k = 5; k <= 20; ++k) k_grid.push_back(k);
  for (double r : default_radius_grid()) r_grid.emplace_back(r);
}

void RunConfig::validate() const {
  if (attributes.empty() && !synth) fail(ErrorCode::InvalidArgument, "no attribute file and no synthetic dataset configured");
  if (!attributes.empty() && geometry.empty()) fail(ErrorCode::InvalidArgument, "attribute file given without geometry");
  if (k < 1) fail(ErrorCode::InvalidArgument, "k must be >= 1");
  if (radius && !(*radius > 0.0)) fail(ErrorCode::InvalidArgument, "radius must be positive");
  if (run_sweep && (k_grid.empty() || r_grid.empty())) fail(ErrorCode::InvalidArgument, "sweep grids must be nonempty");
  for (const auto& r : r_grid)
    if (r && !(*r > 0.0)) fail(ErrorCode::InvalidArgument, "sweep radii must be positive");
  if (lambda_policy == LambdaPolicy::Fixed && !(lambda >= 0.0)) fail(ErrorCode::InvalidArgument, "lambda must be >= 0");
  if (lambda_policy == LambdaPolicy::CrossValidated && folds < 2) fail(ErrorCode::InvalidArgument, "folds must be >= 2");
  if (path_length < 1) fail(ErrorCode::InvalidArgument, "path_length must be >= 1");
  if (!(loess_span > 0.0 && loess_span <= 1.0)) fail(ErrorCode::InvalidArgument, "loess span must be in (0, 1]");
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  if (synth) {
    j["input"] = {{"synthetic", {{"seed", synth->seed}, {"n", synth->n}, {"p", synth->p}, {"clusters", synth->clusters},
                                 {"cell_size", synth->cell_size}, {"separation", synth->separation}}}};
  } else {
    j["input"] = {{"attributes", attributes.generic_string()},
                  {"geometry", geometry.generic_string()},
                  {"mode", attribute_mode == AttributeMode::RawCounts ? "raw" : "indicators"}};
  }
  j["graph"] = {{"mode", adjacency == AdjacencyMode::Queen ? "queen" : "distance"},
                {"radius", radius ? nlohmann::json(*radius) : nlohmann::json("min")}};
  j["cluster"] = {{"k", k}};
  nlohmann::json radii = nlohmann::json::array();
  for (const auto& r : r_grid) radii.push_back(r ? nlohmann::json(*r) : nlohmann::json("min"));
  j["sweep"] = {{"enabled", run_sweep}, {"k_grid", k_grid}, {"r_grid", radii}};
  j["fit"] = {{"lambda", lambda_policy == LambdaPolicy::Fixed ? nlohmann::json(lambda) : nlohmann::json("cv")},
              {"folds", folds},
              {"path_length", path_length},
              {"reference", reference ? nlohmann::json(*reference) : nlohmann::json("auto")}};
  j["report"] = {{"loess_span", loess_span}};
  j["seed"] = seed;
  return j;
}

namespace {

std::string unquote(std::string v) {
  if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') || (v.front() == '\'' && v.back() == '\''))) {
    return v.substr(1, v.size() - 2);
  }
  return v;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Accepts `[a, b]`, `a,b` and `lo:hi` (integer ranges).
std::vector<std::string> list_items(const std::string& value) {
  std::string body = trim(value);
  if (!body.empty() && body.front() == '[') {
    if (body.back() != ']') fail(ErrorCode::InvalidArgument, "unterminated list: " + value);
    body = body.substr(1, body.size() - 2);
  }
  std::vector<std::string> items;
  std::size_t start = 0;
  while (start <= body.size()) {
    const auto comma = body.find(',', start);
    const std::string item = unquote(trim(body.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (!item.empty()) items.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return items;
}

double number(const std::string& key, const std::string& value) { return io::parse_number(value, "setting " + key); }

std::size_t count(const std::string& key, const std::string& value) {
  const double v = number(key, value);
  if (v < 0 || v != std::floor(v)) fail(ErrorCode::InvalidArgument, "setting " + key + " must be a non-negative integer");
  return static_cast<std::size_t>(v);
}

bool boolean(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  fail(ErrorCode::InvalidArgument, "setting " + key + " must be true or false");
}

}  // namespace

void apply_setting(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string value = unquote(trim(raw));
  auto synth = [&]() -> SynthOptions& {
    if (!c.synth) c.synth = SynthOptions{};
    return *c.synth;
  };
  if (key == "input.attributes") {
    c.attributes = value;
  } else if (key == "input.geometry") {
    c.geometry = value;
  } else if (key == "input.mode") {
    if (value == "raw") c.attribute_mode = AttributeMode::RawCounts;
    else if (value == "indicators") c.attribute_mode = AttributeMode::Indicators;
    else fail(ErrorCode::InvalidArgument, "input.mode must be raw or indicators");
  } else if (key == "synth.seed") {
    synth().seed = count(key, value);
  } else if (key == "synth.n") {
    synth().n = count(key, value);
  } else if (key == "synth.p") {
    synth().p = count(key, value);
  } else if (key == "synth.clusters") {
    synth().clusters = count(key, value);
  } else if (key == "synth.cell_size") {
    synth().cell_size = number(key, value);
  } else if (key == "synth.separation") {
    synth().separation = number(key, value);
  } else if (key == "graph.mode") {
    if (value == "queen") c.adjacency = AdjacencyMode::Queen;
    else if (value == "distance") c.adjacency = AdjacencyMode::Distance;
    else fail(ErrorCode::InvalidArgument, "graph.mode must be distance or queen");
  } else if (key == "graph.radius") {
    if (value == "min") c.radius.reset();
    else c.radius = number(key, value);
  } else if (key == "cluster.k") {
    c.k = count(key, value);
  } else if (key == "sweep.enabled") {
    c.run_sweep = boolean(key, value);
  } else if (key == "sweep.k_grid") {
    c.k_grid.clear();
    for (const auto& item : list_items(value)) {
      const auto colon = item.find(':');
      if (colon != std::string::npos) {
        const std::size_t lo = count(key, item.substr(0, colon));
        const std::size_t hi = count(key, item.substr(colon + 1));
        for (std::size_t k = lo; k <= hi; ++k) c.k_grid.push_back(k);
      } else {
        c.k_grid.push_back(count(key, item));
      }
    }
  } else if (key == "sweep.r_grid") {
    c.r_grid.clear();
    for (const auto& item : list_items(value)) {
      if (item == "min") c.r_grid.emplace_back(std::nullopt);
      else c.r_grid.emplace_back(number(key, item));
    }
  } else if (key == "fit.lambda") {
    if (value == "cv") {
      c.lambda_policy = LambdaPolicy::CrossValidated;
    } else {
      c.lambda_policy = LambdaPolicy::Fixed;
      c.lambda = number(key, value);
    }
  } else if (key == "fit.folds") {
    c.folds = count(key, value);
  } else if (key == "fit.path_length") {
    c.path_length = count(key, value);
  } else if (key == "fit.reference") {
    if (value == "auto") c.reference.reset();
    else c.reference = static_cast<int>(number(key, value));
  } else if (key == "report.loess_span") {
    c.loess_span = number(key, value);
  } else if (key == "output.dir") {
    c.output_dir = value;
  } else if (key == "seed") {
    c.seed = count(key, value);
  } else {
    fail(ErrorCode::InvalidArgument, "unknown setting '" + key + "'");
  }
}

std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text, const std::string& source) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string line(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorCode::ParseError, source + ":" + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    out.emplace_back(section.empty() ? key : section + "." + key, trim(line.substr(eq + 1)));
  }
  return out;
}

RunConfig load_config(const std::filesystem::path& path) {
  RunConfig config;
  const auto base = path.parent_path();
  for (const auto& [key, value] : parse_config_text(io::read_text(path), path.string())) {
    apply_setting(config, key, value);
  }
  // Relative input paths are resolved against the config file's directory.
  if (!config.attributes.empty() && config.attributes.is_relative()) config.attributes = base / config.attributes;
  if (!config.geometry.empty() && config.geometry.is_relative()) config.geometry = base / config.geometry;
  return config;
}

}  // namespace terracut
