#pragma once

#include <limits>
#include <vector>

#include <Eigen/Core>

namespace terracut {

using Point = Eigen::Vector2d;
using Ring = std::vector<Point>;

/// Planar polygon in projected metres: one outer ring plus optional holes.
/// Rings are stored open (the closing vertex is dropped on construction).
struct Polygon {
  Ring outer;
  std::vector<Ring> holes;
};

/// Geometry of one spatial unit.
using MultiPolygon = std::vector<Polygon>;

struct BoundingBox {
  Point min{Point::Constant(std::numeric_limits<double>::infinity())};
  Point max{Point::Constant(-std::numeric_limits<double>::infinity())};

  void extend(const Point& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  void extend(const BoundingBox& b) {
    min = min.cwiseMin(b.min);
    max = max.cwiseMax(b.max);
  }
  bool intersects(const BoundingBox& other, double tolerance) const {
    return (min.array() <= other.max.array() + tolerance).all() &&
           (other.min.array() <= max.array() + tolerance).all();
  }
};

/// Drops a repeated closing vertex and consecutive duplicates; throws
/// DegenerateGeometry if fewer than three distinct vertices remain.
Ring normalize_ring(const Ring& ring);

/// Signed shoelace area (positive for counter-clockwise rings).
double signed_area(const Ring& ring);

/// Area of the outer ring minus the holes.
double polygon_area(const Polygon& polygon);

/// Area-weighted centroid of the outer ring minus holes.
Point polygon_centroid(const Polygon& polygon);

/// Area-weighted centroid over all parts.
Point polygon_centroid(const MultiPolygon& parts);

BoundingBox bounding_box(const Polygon& polygon);
BoundingBox bounding_box(const MultiPolygon& parts);

double point_segment_distance(const Point& p, const Point& a, const Point& b);
double segment_distance(const Point& a0, const Point& a1, const Point& b0, const Point& b1);

/// True if the two boundaries come within `tolerance` of each other, i.e.
/// they share a vertex or a stretch of edge (queen contiguity).
bool boundaries_touch(const MultiPolygon& a, const MultiPolygon& b, double tolerance);

/// Axis-aligned square centred on `centre`.
Polygon square(const Point& centre, double side);

}  // namespace terracut
