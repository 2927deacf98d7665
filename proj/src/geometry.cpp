#include "terracut/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "terracut/error.hpp"

namespace terracut {

Ring normalize_ring(const Ring& ring) {
  Ring out;
  out.reserve(ring.size());
  for (const Point& p : ring) {
    if (!p.allFinite()) fail(ErrorCode::DegenerateGeometry, "non-finite vertex");
    if (out.empty() || out.back() != p) out.push_back(p);
  }
  while (out.size() > 1 && out.front() == out.back()) out.pop_back();
  if (out.size() < 3) fail(ErrorCode::DegenerateGeometry, "ring has fewer than 3 distinct vertices");
  return out;
}

double signed_area(const Ring& ring) {
  double twice = 0.0;
  const std::size_t m = ring.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Point& a = ring[i];
    const Point& b = ring[(i + 1) % m];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * twice;
}

namespace {

// Returns |area| and sets the ring centroid.
double ring_moments(const Ring& ring, Point& centroid) {
  // Shift to the first vertex to limit cancellation with large projected coordinates.
  const Point origin = ring.front();
  double twice = 0.0;
  Point acc = Point::Zero();
  const std::size_t m = ring.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Point a = ring[i] - origin;
    const Point b = ring[(i + 1) % m] - origin;
    const double cross = a.x() * b.y() - b.x() * a.y();
    twice += cross;
    acc += (a + b) * cross;
  }
  if (twice == 0.0) {
    centroid = origin;
    return 0.0;
  }
  centroid = origin + acc / (3.0 * twice);
  return std::abs(0.5 * twice);
}

}  // namespace

double polygon_area(const Polygon& polygon) {
  double area = std::abs(signed_area(polygon.outer));
  for (const Ring& hole : polygon.holes) area -= std::abs(signed_area(hole));
  return area;
}

Point polygon_centroid(const Polygon& polygon) {
  Point c;
  double area = ring_moments(polygon.outer, c);
  Point weighted = c * area;
  for (const Ring& hole : polygon.holes) {
    Point hc;
    const double ha = ring_moments(hole, hc);
    weighted -= hc * ha;
    area -= ha;
  }
  if (!(area > 0.0)) fail(ErrorCode::DegenerateGeometry, "polygon has zero area");
  return weighted / area;
}

Point polygon_centroid(const MultiPolygon& parts) {
  if (parts.empty()) fail(ErrorCode::DegenerateGeometry, "empty geometry");
  double total = 0.0;
  Point weighted = Point::Zero();
  for (const Polygon& part : parts) {
    const double area = polygon_area(part);
    if (area > 0.0) {
      weighted += polygon_centroid(part) * area;
      total += area;
    }
  }
  if (!(total > 0.0)) fail(ErrorCode::DegenerateGeometry, "geometry has zero area");
  return weighted / total;
}

BoundingBox bounding_box(const Polygon& polygon) {
  BoundingBox box;
  for (const Point& p : polygon.outer) box.extend(p);
  return box;
}

BoundingBox bounding_box(const MultiPolygon& parts) {
  BoundingBox box;
  for (const Polygon& part : parts) box.extend(bounding_box(part));
  return box;
}

double point_segment_distance(const Point& p, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

namespace {

double orient(const Point& a, const Point& b, const Point& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

}  // namespace

double segment_distance(const Point& a0, const Point& a1, const Point& b0, const Point& b1) {
  const double d1 = orient(a0, a1, b0);
  const double d2 = orient(a0, a1, b1);
  const double d3 = orient(b0, b1, a0);
  const double d4 = orient(b0, b1, a1);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return 0.0;
  }
  return std::min({point_segment_distance(a0, b0, b1), point_segment_distance(a1, b0, b1),
                   point_segment_distance(b0, a0, a1), point_segment_distance(b1, a0, a1)});
}

namespace {

template <typename Visit>
void for_each_segment(const MultiPolygon& parts, Visit&& visit) {
  auto ring_segments = [&](const Ring& ring) {
    for (std::size_t i = 0; i < ring.size(); ++i) visit(ring[i], ring[(i + 1) % ring.size()]);
  };
  for (const Polygon& part : parts) {
    ring_segments(part.outer);
    for (const Ring& hole : part.holes) ring_segments(hole);
  }
}

}  // namespace

bool boundaries_touch(const MultiPolygon& a, const MultiPolygon& b, double tolerance) {
  if (!bounding_box(a).intersects(bounding_box(b), tolerance)) return false;
  bool touching = false;
  for_each_segment(a, [&](const Point& a0, const Point& a1) {
    if (touching) return;
    BoundingBox sa;
    sa.extend(a0);
    sa.extend(a1);
    for_each_segment(b, [&](const Point& b0, const Point& b1) {
      if (touching) return;
      BoundingBox sb;
      sb.extend(b0);
      sb.extend(b1);
      if (!sa.intersects(sb, tolerance)) return;
      if (segment_distance(a0, a1, b0, b1) <= tolerance) touching = true;
    });
  });
  return touching;
}

Polygon square(const Point& centre, double side) {
  const double h = 0.5 * side;
  return Polygon{{centre + Point(-h, -h), centre + Point(h, -h), centre + Point(h, h), centre + Point(-h, h)}, {}};
}

}  // namespace terracut
