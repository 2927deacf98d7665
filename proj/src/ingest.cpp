#include "terracut/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "terracut/error.hpp"
#include "terracut/io.hpp"
#include "terracut/random.hpp"

namespace terracut {

const std::array<std::string_view, kIndicatorCount>& indicator_names() {
  static constexpr std::array<std::string_view, kIndicatorCount> names{
      "coverage",          "expenditure_rate",      "female_employment_rate",
      "female_house_rate", "commuter_rate",         "male_education_rate",
      "female_education_rate", "foreign_rate",      "grandparent_rate",
      "babysitter_rate",   "household_members",     "fertility_rate",
      "ivsm"};
  return names;
}

const std::array<std::string_view, kIndicatorCount>& indicator_labels() {
  static constexpr std::array<std::string_view, kIndicatorCount> labels{
      "Coverage",
      "Per capita expenditure rate",
      "Female employment rate",
      "Female house rate",
      "Commuter rate",
      "Male educational qualification rate",
      "Female educational qualification rate",
      "Foreign rate",
      "Grandparent rate",
      "Babysitter rate",
      "Number of members in the household",
      "Fertility rate",
      "IVSM"};
  return labels;
}

const std::array<std::string_view, 20>& raw_column_names() {
  static constexpr std::array<std::string_view, 20> names{
      "resident_children_0_2", "daycare_places",      "public_expenditure",
      "resident_females_20_64", "working_females_20_64", "females_at_home",
      "commuters",             "workers",             "males_over_20",
      "males_high_degree",     "females_over_20",     "females_high_degree",
      "foreign_residents",     "residents",           "retired_residents",
      "non_working_females_15_25", "household_members_avg", "children_age_0",
      "females_15_49",         "ivsm"};
  return names;
}

namespace {

using RawMember = double RawCensusRecord::*;

RawMember raw_member(std::string_view column) {
  static const std::unordered_map<std::string_view, double RawCensusRecord::*> fields{
      {"resident_children_0_2", &RawCensusRecord::resident_children_0_2},
      {"daycare_places", &RawCensusRecord::daycare_places},
      {"public_expenditure", &RawCensusRecord::public_expenditure},
      {"resident_females_20_64", &RawCensusRecord::resident_females_20_64},
      {"working_females_20_64", &RawCensusRecord::working_females_20_64},
      {"females_at_home", &RawCensusRecord::females_at_home},
      {"commuters", &RawCensusRecord::commuters},
      {"workers", &RawCensusRecord::workers},
      {"males_over_20", &RawCensusRecord::males_over_20},
      {"males_high_degree", &RawCensusRecord::males_high_degree},
      {"females_over_20", &RawCensusRecord::females_over_20},
      {"females_high_degree", &RawCensusRecord::females_high_degree},
      {"foreign_residents", &RawCensusRecord::foreign_residents},
      {"residents", &RawCensusRecord::residents},
      {"retired_residents", &RawCensusRecord::retired_residents},
      {"non_working_females_15_25", &RawCensusRecord::non_working_females_15_25},
      {"household_members_avg", &RawCensusRecord::household_members_avg},
      {"children_age_0", &RawCensusRecord::children_age_0},
      {"females_15_49", &RawCensusRecord::females_15_49},
      {"ivsm", &RawCensusRecord::ivsm},
  };
  const auto it = fields.find(column);
  return it == fields.end() ? nullptr : it->second;
}

}  // namespace

bool set_raw_field(RawCensusRecord& record, std::string_view column, double value) {
  const RawMember member = raw_member(column);
  if (!member) return false;
  record.*member = value;
  return true;
}

Vector compute_indicators(const RawCensusRecord& raw) {
  auto ratio = [&](double num, double den, std::size_t index) {
    if (!(den > 0.0)) {
      fail(ErrorCode::ZeroDenominator,
           "unit " + raw.unit_id + ", indicator " + std::string(indicator_names()[index]));
    }
    return num / den;
  };
  for (std::string_view column : raw_column_names()) {
    if (column == "ivsm") continue;
    const double v = raw.*raw_member(column);
    if (!std::isfinite(v) || v < 0.0) {
      fail(ErrorCode::InvalidArgument, "unit " + raw.unit_id + ": " + std::string(column) + " must be >= 0");
    }
  }
  if (!std::isfinite(raw.ivsm)) fail(ErrorCode::InvalidArgument, "unit " + raw.unit_id + ": ivsm is not finite");

  Vector x(kIndicatorCount);
  x(0) = ratio(raw.daycare_places, raw.resident_children_0_2, 0);
  x(1) = ratio(raw.public_expenditure, raw.resident_children_0_2, 1);
  x(2) = ratio(raw.working_females_20_64, raw.resident_females_20_64, 2);
  x(3) = ratio(raw.females_at_home, raw.resident_children_0_2, 3);
  x(4) = ratio(raw.commuters, raw.workers, 4);
  x(5) = ratio(raw.males_high_degree, raw.males_over_20, 5);
  x(6) = ratio(raw.females_high_degree, raw.females_over_20, 6);
  x(7) = ratio(raw.foreign_residents, raw.residents, 7);
  x(8) = ratio(raw.retired_residents, raw.resident_children_0_2, 8);
  x(9) = ratio(raw.non_working_females_15_25, raw.resident_children_0_2, 9);
  x(10) = raw.household_members_avg;
  x(11) = ratio(raw.children_age_0, raw.females_15_49, 11);
  x(12) = raw.ivsm;
  return x;
}

double national_coverage(const std::vector<RawCensusRecord>& records) {
  double places = 0.0;
  double children = 0.0;
  for (const auto& r : records) {
    places += r.daycare_places;
    children += r.resident_children_0_2;
  }
  if (!(children > 0.0)) fail(ErrorCode::ZeroDenominator, "national coverage: no resident children");
  return places / children;
}

void validate(const Dataset& d) {
  const std::size_t n = d.ids.size();
  if (d.geometry.size() != n || d.centroids.size() != n || static_cast<std::size_t>(d.values.rows()) != n) {
    fail(ErrorCode::DimensionMismatch, "dataset arrays disagree on the number of units");
  }
  if (!d.regions.empty() && d.regions.size() != n) fail(ErrorCode::DimensionMismatch, "region labels misaligned");
  if (static_cast<std::size_t>(d.values.cols()) != d.columns.size()) {
    fail(ErrorCode::DimensionMismatch, "column names misaligned with values");
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : d.ids) {
    if (!seen.insert(id).second) fail(ErrorCode::InvalidArgument, "duplicate unit_id " + id);
  }
  if (!d.values.allFinite()) fail(ErrorCode::InvalidArgument, "non-finite attribute value");
  for (std::size_t i = 0; i < n; ++i) {
    if (d.geometry[i].empty()) fail(ErrorCode::DegenerateGeometry, "unit " + d.ids[i] + " has no polygons");
    for (const auto& poly : d.geometry[i]) {
      normalize_ring(poly.outer);
      for (const auto& hole : poly.holes) normalize_ring(hole);
    }
  }
}

namespace detail {

void require_rows_for_standardize(Eigen::Index rows) {
  if (rows < 2) fail(ErrorCode::InvalidArgument, "standardize needs at least 2 rows");
}

void throw_constant_column(Eigen::Index col, const std::vector<std::string>& names) {
  const std::string name =
      static_cast<std::size_t>(col) < names.size() ? names[col] : "column " + std::to_string(col);
  fail(ErrorCode::ConstantColumn, name);
}

}  // namespace detail

Standardized standardize(const Dataset& dataset) { return standardize(dataset.values, dataset.columns); }

Dataset load_dataset(const std::filesystem::path& attributes, const std::filesystem::path& geometry,
                     AttributeMode mode) {
  const io::CsvTable table = io::read_csv(attributes);
  const std::string source = attributes.string();
  const int id_col = table.column("unit_id");
  if (id_col < 0) fail(ErrorCode::ParseError, source + ": missing unit_id column");
  const int region_col = table.column("region");

  std::vector<int> value_cols;
  std::vector<std::string> columns;
  if (mode == AttributeMode::Indicators) {
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (static_cast<int>(c) == id_col || static_cast<int>(c) == region_col) continue;
      value_cols.push_back(static_cast<int>(c));
      columns.push_back(table.header[c]);
    }
    if (columns.empty()) fail(ErrorCode::ParseError, source + ": no attribute columns");
  } else {
    for (std::string_view name : raw_column_names()) {
      const int c = table.column(name);
      if (c < 0) fail(ErrorCode::ParseError, source + ": missing raw column " + std::string(name));
      value_cols.push_back(c);
    }
    columns.assign(indicator_names().begin(), indicator_names().end());
  }

  struct Row {
    std::string id;
    std::string region;
    Vector values;
  };
  std::vector<Row> rows;
  rows.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& fields = table.rows[r];
    const std::string context = source + ":" + std::to_string(table.line_numbers[r]);
    Row row;
    row.id = fields[id_col];
    if (row.id.empty()) fail(ErrorCode::ParseError, context + ": empty unit_id");
    if (region_col >= 0) row.region = fields[region_col];
    Vector parsed(static_cast<Eigen::Index>(value_cols.size()));
    for (std::size_t c = 0; c < value_cols.size(); ++c) {
      const std::string& field = fields[value_cols[c]];
      const std::string name = table.header[value_cols[c]];
      if (field.empty() || field == "NA" || field == "NaN" || field == "nan") {
        fail(ErrorCode::ParseError, context + ": missing value in column " + name);
      }
      parsed(static_cast<Eigen::Index>(c)) = io::parse_number(field, context + " column " + name);
      if (!std::isfinite(parsed(static_cast<Eigen::Index>(c)))) {
        fail(ErrorCode::ParseError, context + ": non-finite value in column " + name);
      }
    }
    if (mode == AttributeMode::RawCounts) {
      RawCensusRecord raw;
      raw.unit_id = row.id;
      for (std::size_t c = 0; c < value_cols.size(); ++c) {
        set_raw_field(raw, raw_column_names()[c], parsed(static_cast<Eigen::Index>(c)));
      }
      row.values = compute_indicators(raw);
    } else {
      row.values = std::move(parsed);
    }
    rows.push_back(std::move(row));
  }

  auto features = io::parse_geojson(io::read_text(geometry), geometry.string());

  std::set<std::string> attr_ids;
  for (const auto& row : rows) {
    if (!attr_ids.insert(row.id).second) fail(ErrorCode::InvalidArgument, source + ": duplicate unit_id " + row.id);
  }
  std::set<std::string> geo_ids;
  for (const auto& [id, g] : features) {
    if (!geo_ids.insert(id).second) fail(ErrorCode::InvalidArgument, geometry.string() + ": duplicate unit_id " + id);
  }
  std::vector<std::string> only_attr;
  std::vector<std::string> only_geo;
  std::set_difference(attr_ids.begin(), attr_ids.end(), geo_ids.begin(), geo_ids.end(), std::back_inserter(only_attr));
  std::set_difference(geo_ids.begin(), geo_ids.end(), attr_ids.begin(), attr_ids.end(), std::back_inserter(only_geo));
  if (!only_attr.empty() || !only_geo.empty()) {
    std::string message;
    auto list = [](const std::vector<std::string>& ids) {
      std::string s;
      for (const auto& id : ids) s += (s.empty() ? "" : " ") + id;
      return s;
    };
    if (!only_attr.empty()) message += "missing from geometry: " + list(only_attr);
    if (!only_geo.empty()) message += std::string(message.empty() ? "" : "; ") + "missing from attributes: " + list(only_geo);
    fail(ErrorCode::IdMismatch, message);
  }

  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.id < b.id; });
  std::sort(features.begin(), features.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  Dataset d;
  d.columns = std::move(columns);
  d.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d.columns.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    d.ids.push_back(rows[i].id);
    if (region_col >= 0) d.regions.push_back(rows[i].region);
    d.values.row(static_cast<Eigen::Index>(i)) = rows[i].values.transpose();
    d.geometry.push_back(std::move(features[i].second));
    try {
      d.centroids.push_back(polygon_centroid(d.geometry.back()));
    } catch (const Error& e) {
      fail(ErrorCode::DegenerateGeometry, "unit " + rows[i].id + ": " + e.what());
    }
  }
  validate(d);
  return d;
}

SynthResult synth_dataset(const SynthOptions& o) {
  if (o.clusters < 1 || o.n < o.clusters) fail(ErrorCode::InvalidArgument, "synth requires n >= clusters >= 1");
  if (o.p < 1) fail(ErrorCode::InvalidArgument, "synth requires p >= 1");
  if (!(o.cell_size > 0.0)) fail(ErrorCode::InvalidArgument, "synth requires a positive cell size");

  const Rng root(o.seed);
  Rng means_rng = root.split(1);
  Rng noise_rng = root.split(2);
  Rng seed_rng = root.split(3);

  const std::size_t cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(o.n))));
  const std::size_t rows = (o.n + cols - 1) / cols;
  const std::size_t gcols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(o.clusters))));
  const std::size_t grows = (o.clusters + gcols - 1) / gcols;

  // Seeds sit on a coarse grid over the unit grid, jittered by a fraction of a block.
  std::vector<Point> seeds;
  for (std::size_t c = 0; c < o.clusters; ++c) {
    const double bx = static_cast<double>(cols) / static_cast<double>(gcols);
    const double by = static_cast<double>(rows) / static_cast<double>(grows);
    const double sx = (static_cast<double>(c % gcols) + 0.5 + seed_rng.uniform(-0.15, 0.15)) * bx;
    const double sy = (static_cast<double>(c / gcols) + 0.5 + seed_rng.uniform(-0.15, 0.15)) * by;
    seeds.emplace_back(sx, sy);
  }

  std::vector<Point> cells(o.n);
  std::vector<int> truth(o.n);
  for (std::size_t i = 0; i < o.n; ++i) {
    cells[i] = Point(static_cast<double>(i % cols) + 0.5, static_cast<double>(i / cols) + 0.5);
    std::size_t best = 0;
    for (std::size_t c = 1; c < o.clusters; ++c) {
      if ((cells[i] - seeds[c]).squaredNorm() < (cells[i] - seeds[best]).squaredNorm()) best = c;
    }
    truth[i] = static_cast<int>(best);
  }
  // Guarantee every planted cluster is non-empty by stealing the nearest unit
  // from a cluster that can spare one.
  for (std::size_t c = 0; c < o.clusters; ++c) {
    std::vector<std::size_t> sizes(o.clusters, 0);
    for (int t : truth) ++sizes[static_cast<std::size_t>(t)];
    if (sizes[c] > 0) continue;
    std::size_t pick = o.n;
    for (std::size_t i = 0; i < o.n; ++i) {
      if (sizes[static_cast<std::size_t>(truth[i])] < 2) continue;
      if (pick == o.n || (cells[i] - seeds[c]).squaredNorm() < (cells[pick] - seeds[c]).squaredNorm()) pick = i;
    }
    truth[pick] = static_cast<int>(c);
  }

  Matrix means(static_cast<Eigen::Index>(o.clusters), static_cast<Eigen::Index>(o.p));
  if (o.clusters == 1) {
    means.setZero();
  } else {
    for (Eigen::Index c = 0; c < means.rows(); ++c)
      for (Eigen::Index j = 0; j < means.cols(); ++j) means(c, j) = means_rng.normal(0.0, o.separation);
  }

  // With 13 columns the values are mapped onto plausible positive indicator scales.
  static constexpr std::array<double, kIndicatorCount> base{0.272, 1500.0, 0.5, 8.0, 0.35, 0.15, 0.18,
                                                            0.08,  25.0,   3.0, 2.3, 0.035, 99.0};
  const bool indicator_like = o.p == kIndicatorCount;

  const int width = static_cast<int>(std::to_string(o.n).size());
  SynthResult out;
  Dataset& d = out.dataset;
  d.values.resize(static_cast<Eigen::Index>(o.n), static_cast<Eigen::Index>(o.p));
  if (indicator_like) {
    d.columns.assign(indicator_names().begin(), indicator_names().end());
  } else {
    for (std::size_t j = 0; j < o.p; ++j) d.columns.push_back("x" + std::to_string(j + 1));
  }
  for (std::size_t i = 0; i < o.n; ++i) {
    std::string number = std::to_string(i + 1);
    d.ids.push_back("u" + std::string(static_cast<std::size_t>(width) - number.size(), '0') + number);
    d.geometry.push_back({square(cells[i] * o.cell_size, o.cell_size)});
    d.centroids.push_back(polygon_centroid(d.geometry.back()));
    for (std::size_t j = 0; j < o.p; ++j) {
      const double z = means(truth[i], static_cast<Eigen::Index>(j)) + noise_rng.normal();
      d.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          indicator_like ? base[j] * std::exp(0.1 * z) : z;
    }
    out.truth.push_back(truth[i] + 1);
  }
  return out;
}

std::map<std::string, std::size_t> region_counts(const Dataset& dataset) {
  std::map<std::string, std::size_t> counts;
  for (const auto& r : dataset.regions) ++counts[r];
  return counts;
}

const std::map<std::string, std::size_t>& italian_ats_per_region() {
  static const std::map<std::string, std::size_t> counts{
      {"Piemonte", 49},  {"Valle d'Aosta/Vallée d'Aoste", 5}, {"Lombardia", 88},
      {"Trentino-Alto Adige/Südtirol", 17}, {"Veneto", 21}, {"Friuli-Venezia Giulia", 18},
      {"Liguria", 18},   {"Emilia-Romagna", 38}, {"Toscana", 26}, {"Umbria", 12},
      {"Marche", 23},    {"Lazio", 37},   {"Abruzzo", 24}, {"Molise", 7},
      {"Campania", 57},  {"Puglia", 45},  {"Basilicata", 9}, {"Calabria", 32},
      {"Sicilia", 55},   {"Sardegna", 25}};
  return counts;
}

void check_region_counts(const Dataset& dataset, const std::map<std::string, std::size_t>& expected) {
  if (dataset.regions.empty()) fail(ErrorCode::InvalidArgument, "dataset has no region labels");
  const auto actual = region_counts(dataset);
  for (const auto& [region, count] : expected) {
    const auto it = actual.find(region);
    const std::size_t have = it == actual.end() ? 0 : it->second;
    if (have != count) {
      fail(ErrorCode::InvalidArgument,
           "region " + region + ": expected " + std::to_string(count) + " units, found " + std::to_string(have));
    }
  }
  for (const auto& [region, count] : actual) {
    if (!expected.contains(region)) fail(ErrorCode::InvalidArgument, "unexpected region " + region);
  }
}

}  // namespace terracut
