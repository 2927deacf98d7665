#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "terracut/error.hpp"
#include "terracut/geometry.hpp"
#include "terracut/io.hpp"
#include "terracut/spatial_graph.hpp"

using namespace terracut;

namespace {

Polygon polygon(std::initializer_list<std::pair<double, double>> pts) {
  Polygon p;
  for (auto [x, y] : pts) p.outer.emplace_back(x, y);
  return p;
}

MultiPolygon unit_square_at(double x, double y) { return {polygon({{x, y}, {x + 1, y}, {x + 1, y + 1}, {x, y + 1}})}; }

std::vector<Point> random_points(std::size_t n, std::mt19937_64& rng, double scale = 100.0) {
  std::uniform_real_distribution<double> u(0.0, scale);
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i) pts.emplace_back(u(rng), u(rng));
  return pts;
}

}  // namespace

TEST_CASE("polygon centroids") {
  const Point sq = polygon_centroid(polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
  CHECK(sq.x() == doctest::Approx(0.5));
  CHECK(sq.y() == doctest::Approx(0.5));

  const Point l = polygon_centroid(polygon({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}));
  CHECK(l.x() == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  CHECK(l.y() == doctest::Approx(5.0 / 6.0).epsilon(1e-12));

  Polygon holed = polygon({{0, 0}, {4, 0}, {4, 4}, {0, 4}});
  holed.holes.push_back({{1, 1}, {1, 3}, {3, 3}, {3, 1}});
  const Point h = polygon_centroid(holed);
  CHECK(h.x() == doctest::Approx(2.0));
  CHECK(h.y() == doctest::Approx(2.0));
  CHECK(polygon_area(holed) == doctest::Approx(12.0));

  // Clockwise input and large projected offsets give the same answer.
  const Point cw = polygon_centroid(polygon({{5e5, 4e6}, {5e5, 4e6 + 1}, {5e5 + 1, 4e6 + 1}, {5e5 + 1, 4e6}}));
  CHECK(cw.x() == doctest::Approx(5e5 + 0.5).epsilon(1e-15));
  CHECK(cw.y() == doctest::Approx(4e6 + 0.5).epsilon(1e-15));

  try {
    polygon_centroid(polygon({{0, 0}, {1, 1}, {2, 2}}));
    FAIL("expected DegenerateGeometry");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateGeometry);
  }
}

TEST_CASE("distance adjacency includes the boundary") {
  const std::vector<Point> pts{{0, 0}, {3, 4}};
  CHECK(distance_adjacency(pts, 5.0).adjacent(0, 1));
  CHECK_FALSE(distance_adjacency(pts, 4.999).adjacent(0, 1));

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = random_points(5, rng);
    const double r = std::uniform_real_distribution<double>(10, 80)(rng);
    const ContiguityGraph g = distance_adjacency(c, r);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK_FALSE(g.adjacent(i, i));
      for (std::size_t j = 0; j < 5; ++j) {
        if (i == j) continue;
        const double dx = c[i].x() - c[j].x(), dy = c[i].y() - c[j].y();
        CHECK(g.adjacent(i, j) == (std::sqrt(dx * dx + dy * dy) <= r));
        CHECK(g.adjacent(i, j) == g.adjacent(j, i));
      }
    }
  }
}

TEST_CASE("distance adjacency is monotone in r") {
  std::mt19937_64 rng(5);
  const auto c = random_points(30, rng);
  const auto small = distance_adjacency(c, 15.0).edges();
  const auto large = distance_adjacency(c, 25.0).edges();
  for (const auto& e : small) CHECK(std::find(large.begin(), large.end(), e) != large.end());
}

TEST_CASE("queen adjacency") {
  SUBCASE("shared edge, shared corner, and a gap") {
    const std::vector<MultiPolygon> units{unit_square_at(0, 0), unit_square_at(1, 0), unit_square_at(2, 1),
                                          unit_square_at(4.1, 1)};
    const ContiguityGraph g = queen_adjacency(units);
    CHECK(g.adjacent(0, 1));      // edge
    CHECK(g.adjacent(1, 2));      // corner (2,1)
    CHECK_FALSE(g.adjacent(0, 2));
    CHECK_FALSE(g.adjacent(2, 3));  // gap 0.1
    CHECK(g.edge_count() == 2);
  }
  SUBCASE("partial edge overlap and sub-tolerance mismatch") {
    const std::vector<MultiPolygon> units{unit_square_at(0, 0), unit_square_at(1, 0.5),
                                          unit_square_at(2 + 1e-10, 0.5)};
    const ContiguityGraph g = queen_adjacency(units);
    CHECK(g.adjacent(0, 1));
    CHECK(g.adjacent(1, 2));
  }
  SUBCASE("translation invariance") {
    std::vector<MultiPolygon> grid, moved;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        grid.push_back(unit_square_at(c, r));
        moved.push_back(unit_square_at(c + 123.0, r - 77.0));
      }
    CHECK(queen_adjacency(grid).edges() == queen_adjacency(moved).edges());
    // Interior cells of a 4x4 grid have 8 queen neighbours.
    CHECK(queen_adjacency(grid).neighbors(5).size() == 8);
  }
}

TEST_CASE("connectivity") {
  CHECK(is_connected(ContiguityGraph(4, {{0, 1}, {1, 2}, {2, 3}})));
  const ContiguityGraph split(4, {{0, 1}, {2, 3}});
  CHECK_FALSE(is_connected(split));
  CHECK(connected_components(split) == std::vector<std::size_t>{0, 0, 1, 1});
  CHECK_THROWS_AS(ContiguityGraph(3, {{1, 1}}), Error);
  CHECK_THROWS_AS(ContiguityGraph(3, {{0, 3}}), Error);
}

TEST_CASE("minimum connecting radius") {
  const std::vector<Point> line{{0, 0}, {1, 0}, {3, 0}};
  CHECK(min_connecting_radius(line) == 2.0);
  CHECK(is_connected(distance_adjacency(line, 2.0)));
  CHECK_FALSE(is_connected(distance_adjacency(line, 1.999)));

  CHECK(min_connecting_radius(std::vector<Point>{{1, 1}, {4, 5}}) == 5.0);
  CHECK_THROWS_AS(min_connecting_radius(std::vector<Point>{{0, 0}}), Error);

  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    const auto c = random_points(30, rng);
    std::vector<std::pair<double, double>> raw;
    for (const auto& p : c) raw.emplace_back(p.x(), p.y());
    const double r = min_connecting_radius(c);
    CHECK(r == oracle::bisection_radius(raw));
    CHECK(is_connected(distance_adjacency(c, r)));
  }

  SUBCASE("synthetic 606-unit grid is connected at its radius") {
    std::vector<Point> cells;
    for (int i = 0; i < 606; ++i) cells.emplace_back((i % 25) * 5e4 + 2.5e4, (i / 25) * 5e4 + 2.5e4);
    const double r = min_connecting_radius(cells);
    CHECK(r == doctest::Approx(5e4));
    CHECK(is_connected(distance_adjacency(cells, r)));
  }
}

TEST_CASE("graph exports") {
  const ContiguityGraph g(3, {{1, 0}, {1, 2}, {0, 1}});
  CHECK(g.edge_count() == 2);
  CHECK(g.edge_list_csv() == "i,j\n0,1\n1,2\n");
  CHECK(g.dense_csv() == "0,1,0\n1,0,1\n0,1,0\n");
}
