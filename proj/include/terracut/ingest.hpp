#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "terracut/geometry.hpp"

namespace terracut {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr std::size_t kIndicatorCount = 13;

/// Indicator column names in their frozen order (supply side first).
const std::array<std::string_view, kIndicatorCount>& indicator_names();

/// Human-readable labels for the same columns, used in report tables.
const std::array<std::string_view, kIndicatorCount>& indicator_labels();

/// Raw census and survey counts for one unit, from which the indicators are derived.
struct RawCensusRecord {
  std::string unit_id;
  double resident_children_0_2 = 0;
  double daycare_places = 0;
  double public_expenditure = 0;
  double resident_females_20_64 = 0;
  double working_females_20_64 = 0;
  double females_at_home = 0;
  double commuters = 0;
  double workers = 0;
  double males_over_20 = 0;
  double males_high_degree = 0;
  double females_over_20 = 0;
  double females_high_degree = 0;
  double foreign_residents = 0;
  double residents = 0;
  double retired_residents = 0;
  double non_working_females_15_25 = 0;
  double household_members_avg = 0;
  double children_age_0 = 0;
  double females_15_49 = 0;
  double ivsm = 0;
};

/// Raw CSV column names, in RawCensusRecord field order.
const std::array<std::string_view, 20>& raw_column_names();

/// Sets a raw field by its CSV column name; false if the name is unknown.
bool set_raw_field(RawCensusRecord& record, std::string_view column, double value);

/// The 13 indicators of one unit, in indicator_names() order. Throws
/// ZeroDenominator naming the unit and indicator when a denominator is 0.
Vector compute_indicators(const RawCensusRecord& raw);

/// Pooled coverage: total day-care places over total resident children 0-2.
double national_coverage(const std::vector<RawCensusRecord>& records);

/// Spatial units with their geometry and indicator matrix (rows = units,
/// sorted by unit id).
struct Dataset {
  std::vector<std::string> ids;
  std::vector<MultiPolygon> geometry;
  std::vector<Point> centroids;
  std::vector<std::string> regions;  // empty when the input has no region column
  std::vector<std::string> columns;
  Matrix values;

  std::size_t n() const { return ids.size(); }
  std::size_t p() const { return columns.size(); }
};

/// Throws on duplicate ids, ragged or non-finite values, bad rings, or
/// centroids that do not match the geometry count.
void validate(const Dataset& dataset);

/// Per-column mean and population standard deviation.
struct Standardization {
  Vector mean;
  Vector sd;

  template <typename Derived>
  Matrix apply(const Eigen::MatrixBase<Derived>& x) const {
    return (x.rowwise() - mean.transpose()).array().rowwise() / sd.transpose().array();
  }

  template <typename Derived>
  Matrix invert(const Eigen::MatrixBase<Derived>& z) const {
    return (z.array().rowwise() * sd.transpose().array()).matrix().rowwise() + mean.transpose();
  }
};

struct Standardized {
  Matrix scaled;
  Standardization params;
};

/// Column-wise z-scores with population (1/n) sd. Throws ConstantColumn for
/// a zero-variance column; `names` (optional) labels that error.
template <typename Derived>
Standardized standardize(const Eigen::MatrixBase<Derived>& x, const std::vector<std::string>& names = {});

Standardized standardize(const Dataset& dataset);

enum class AttributeMode { Indicators, RawCounts };

/// Joins an attribute CSV with a GeoJSON FeatureCollection on unit_id.
/// Throws IdMismatch listing ids present in only one file and ParseError
/// with line or feature context.
Dataset load_dataset(const std::filesystem::path& attributes, const std::filesystem::path& geometry,
                     AttributeMode mode = AttributeMode::Indicators);

/// Deterministic planted-cluster dataset: units tile a square grid of
/// `cell_size` metre squares, planted clusters are Voronoi blobs around seeds
/// spread over the grid, and attributes are Gaussian around a per-cluster mean.
struct SynthOptions {
  std::uint64_t seed = 1;
  std::size_t n = 40;
  std::size_t p = 3;
  std::size_t clusters = 4;
  double cell_size = 5.0e4;
  double separation = 4.0;  // sd of the per-cluster attribute means, in noise units
};

struct SynthResult {
  Dataset dataset;
  std::vector<int> truth;  // planted cluster per unit, 1-based
};

SynthResult synth_dataset(const SynthOptions& options);

/// Number of units per region label.
std::map<std::string, std::size_t> region_counts(const Dataset& dataset);

/// ATS counts per Italian region (20 regions, 606 units).
const std::map<std::string, std::size_t>& italian_ats_per_region();

/// Throws InvalidArgument describing the first region whose count differs.
void check_region_counts(const Dataset& dataset, const std::map<std::string, std::size_t>& expected);

// -- implementation -------------------------------------------------------

namespace detail {
void require_rows_for_standardize(Eigen::Index rows);
[[noreturn]] void throw_constant_column(Eigen::Index col, const std::vector<std::string>& names);
}  // namespace detail

template <typename Derived>
Standardized standardize(const Eigen::MatrixBase<Derived>& x, const std::vector<std::string>& names) {
  detail::require_rows_for_standardize(x.rows());
  const double n = static_cast<double>(x.rows());
  Standardized out;
  out.params.mean = x.colwise().mean().transpose();
  out.params.sd.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double var = (x.col(j).array() - out.params.mean(j)).square().sum() / n;
    if (!(var > 0.0)) detail::throw_constant_column(j, names);
    out.params.sd(j) = std::sqrt(var);
  }
  out.scaled = out.params.apply(x);
  return out;
}

}  // namespace terracut
