//
// Copyright 2026 The locsynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//


#include "locsynth/geometry.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "gtest/gtest.h"
#include "testing.hpp"

namespace locsynth {
namespace {

using testing::chi_square_p;
using testing::grid_uniformity_p;

Polygon unit_square() { return Polygon::rectangle({0.0, 0.0, 1.0, 1.0}); }

Polygon regular_polygon(int n, double radius, Point2 c = {0.0, 0.0}) {
  Polygon p;
  for (int k = 0; k < n; ++k) {
    const double a = 2.0 * std::numbers::pi * k / n;
    p.vertices.push_back({c.x + radius * std::cos(a), c.y + radius * std::sin(a)});
  }
  return p;
}

TEST(ProjectionTest, OriginMapsToZero) {
  const LonLat o{116.39, 39.91};
  const Point2 p = project(o.lon, o.lat, o);
  EXPECT_EQ(p.x, 0.0);
  EXPECT_EQ(p.y, 0.0);
}

TEST(ProjectionTest, AlongParallel) {
  const LonLat o{-8.6, 41.15};
  const double dlon = 0.01;
  const Point2 p = project(o.lon + dlon, o.lat, o);
  EXPECT_NEAR(p.x,
              kEarthRadiusMeters * dlon * std::numbers::pi / 180.0 *
                  std::cos(o.lat * std::numbers::pi / 180.0),
              1e-9);
  EXPECT_EQ(p.y, 0.0);
}

TEST(ProjectionTest, RoundTrip) {
  const Projection proj({-73.98, 40.75});
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const LonLat ll{-73.98 + rng.uniform(-0.2, 0.2), 40.75 + rng.uniform(-0.2, 0.2)};
    const LonLat back = proj.unproject(proj.project(ll));
    ASSERT_NEAR(back.lon, ll.lon, 1e-9);
    ASSERT_NEAR(back.lat, ll.lat, 1e-9);
  }
  EXPECT_THROW(Projection({0.0, 89.5}), InvalidParameter);
}

TEST(TriangleSampleTest, R1ZeroGivesVertexA) {
  const Triangle t{{1.0, 2.0}, {5.0, 2.0}, {3.0, 7.0}};
  for (double r2 : {0.0, 0.3, 0.99}) {
    const Point2 p = triangle_point(t, 0.0, r2);
    EXPECT_EQ(p.x, 1.0);
    EXPECT_EQ(p.y, 2.0);
  }
}

TEST(TriangleSampleTest, CongruentSubTrianglesEquallyLikely) {
  // Midpoint subdivision of the unit right triangle into 4 congruent parts.
  const Triangle t{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  Rng rng(17);
  const int n = 100000;
  std::vector<double> obs(4, 0.0);
  for (int i = 0; i < n; ++i) {
    const Point2 p = triangle_sample(t, rng);
    ASSERT_GE(p.x, 0.0);
    ASSERT_GE(p.y, 0.0);
    ASSERT_LE(p.x + p.y, 1.0 + 1e-12);
    if (p.x >= 0.5) {
      obs[0] += 1;
    } else if (p.y >= 0.5) {
      obs[1] += 1;
    } else if (p.x + p.y <= 0.5) {
      obs[2] += 1;
    } else {
      obs[3] += 1;
    }
  }
  for (double o : obs) EXPECT_NEAR(o / n, 0.25, 0.01);
  const std::vector<double> expected(4, n / 4.0);
  EXPECT_GT(chi_square_p(obs, expected), 0.001);
}

TEST(TriangleSampleTest, CollinearStaysOnSegment) {
  const Triangle t{{0.0, 0.0}, {2.0, 1.0}, {4.0, 2.0}};
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Point2 p = triangle_sample(t, rng);
    ASSERT_LT(point_segment_distance(p, t.a, t.c), 1e-9);
  }
}

TEST(FanTriangulateTest, UnitSquare) {
  const auto tris = fan_triangulate(unit_square());
  ASSERT_EQ(tris.size(), 4u);
  for (const Triangle& t : tris) EXPECT_NEAR(t.area(), 0.25, 1e-15);
}

TEST(FanTriangulateTest, TriangleInput) {
  Polygon p{{{0.0, 0.0}, {3.0, 0.0}, {0.0, 4.0}}};
  const auto tris = fan_triangulate(p);
  ASSERT_EQ(tris.size(), 3u);
  double s = 0.0;
  for (const Triangle& t : tris) s += t.area();
  EXPECT_NEAR(s, 6.0, 1e-12);
}

TEST(FanTriangulateTest, RegularHexagon) {
  const auto tris = fan_triangulate(regular_polygon(6, 1.0));
  ASSERT_EQ(tris.size(), 6u);
  double s = 0.0;
  for (const Triangle& t : tris) {
    EXPECT_NEAR(t.area(), std::sqrt(3.0) / 4.0, 1e-12);
    s += t.area();
  }
  EXPECT_NEAR(s, 3.0 * std::sqrt(3.0) / 2.0, 1e-12);
}

TEST(FanTriangulateTest, RejectsFoldingFan) {
  // Thin "L" whose area centroid lies outside it.
  Polygon l{{{0, 0}, {10, 0}, {10, 0.1}, {0.1, 0.1}, {0.1, 10}, {0, 10}}};
  EXPECT_THROW(fan_triangulate(l), UnsupportedShape);
  EXPECT_THROW(fan_triangulate(Polygon{{{0, 0}, {1, 0}}}), UnsupportedShape);
}

TEST(PolygonSampleTest, UnitSquareUniform) {
  const PolygonSampler sampler(unit_square());
  Rng rng(11);
  std::vector<Point2> pts(100000);
  for (Point2& p : pts) p = sampler.sample(rng);
  for (const Point2& p : pts) ASSERT_TRUE(point_in_polygon(p, unit_square()));
  EXPECT_GT(grid_uniformity_p(pts, {0.0, 0.0, 1.0, 1.0}, 10, 10), 0.001);
}

TEST(PolygonSampleTest, ConvexPolygonInteriorCellsUniform) {
  const Polygon hex = regular_polygon(6, 50.0, {100.0, 100.0});
  const PolygonSampler sampler(hex);
  const BoundingBox box = bounding_box(hex);
  Rng rng(12);
  const int n = 100000;
  std::vector<double> counts(64, 0.0);
  const double cw = box.width() / 8.0, ch = box.height() / 8.0;
  for (int i = 0; i < n; ++i) {
    const Point2 p = sampler.sample(rng);
    ASSERT_TRUE(point_in_polygon(p, hex));
    const int c = std::min(7, static_cast<int>((p.x - box.min_x) / cw));
    const int r = std::min(7, static_cast<int>((p.y - box.min_y) / ch));
    counts[static_cast<size_t>(r * 8 + c)] += 1.0;
  }
  // Cells whose four corners lie inside the hexagon are fully interior.
  std::vector<double> obs;
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      const double x0 = box.min_x + c * cw, y0 = box.min_y + r * ch;
      if (point_in_polygon({x0, y0}, hex) && point_in_polygon({x0 + cw, y0}, hex) &&
          point_in_polygon({x0, y0 + ch}, hex) &&
          point_in_polygon({x0 + cw, y0 + ch}, hex)) {
        obs.push_back(counts[static_cast<size_t>(r * 8 + c)]);
      }
    }
  }
  ASSERT_GE(obs.size(), 20u);
  double total = 0.0;
  for (double o : obs) total += o;
  // Interior cells have equal area, so under uniformity equal expectations.
  const std::vector<double> expected(obs.size(), total / obs.size());
  EXPECT_GT(chi_square_p(obs, expected), 0.001);
  EXPECT_NEAR(total / n, obs.size() * cw * ch / area(hex), 0.01);
}

TEST(PolygonSampleTest, DegeneratePolygonStaysNearBoundary) {
  Polygon sliver{{{0.0, 0.0}, {10.0, 0.0}, {10.0, 1e-9}, {0.0, 1e-9}}};
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const Point2 p = polygon_sample(sliver, rng);
    ASSERT_LT(std::min(std::abs(p.y), std::abs(p.y - 1e-9)), 1e-6);
    ASSERT_GE(p.x, -1e-9);
    ASSERT_LE(p.x, 10.0 + 1e-9);
  }
}

TEST(PointInPolygonTest, Examples) {
  const Polygon hex = regular_polygon(6, 1.0, {3.0, 3.0});
  EXPECT_TRUE(point_in_polygon(centroid(hex), hex));
  EXPECT_FALSE(point_in_polygon({10.0, 10.0}, hex));
  EXPECT_TRUE(point_in_polygon(hex.vertices[2], hex));
  EXPECT_TRUE(point_in_polygon({0.5, 0.0}, unit_square()));
  EXPECT_FALSE(point_in_polygon({0.5, -1e-6}, unit_square()));
}

TEST(DiameterTest, Examples) {
  EXPECT_DOUBLE_EQ(polygon_diameter(unit_square()), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(polygon_diameter(Polygon{{{0, 0}, {3, 0}, {0, 4}}}), 5.0);
}

TEST(AreaTest, CentroidAndArea) {
  const Polygon r = Polygon::rectangle({1.0, 2.0, 4.0, 6.0});
  EXPECT_DOUBLE_EQ(area(r), 12.0);
  EXPECT_GT(signed_area(r), 0.0);
  const Point2 c = centroid(r);
  EXPECT_DOUBLE_EQ(c.x, 2.5);
  EXPECT_DOUBLE_EQ(c.y, 4.0);
}

TEST(ClipTest, HalfPlane) {
  const Polygon half = clip_half_plane(unit_square(), {0.5, 0.0}, {1.0, 0.0});
  EXPECT_NEAR(area(half), 0.5, 1e-15);
  for (const Point2& v : half.vertices) EXPECT_LE(v.x, 0.5);
}

TEST(VoronoiTest, OneSiteIsTheBox) {
  const BoundingBox box{0.0, 0.0, 10.0, 5.0};
  const std::vector<Point2> sites{{3.0, 3.0}};
  const auto cells = voronoi_cells(sites, box);
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_DOUBLE_EQ(area(cells[0]), 50.0);
  EXPECT_EQ(cells[0].size(), 4u);
}

TEST(VoronoiTest, SymmetricPairSplitsBox) {
  const BoundingBox box{0.0, 0.0, 10.0, 4.0};
  const std::vector<Point2> sites{{2.0, 2.0}, {8.0, 2.0}};
  const auto cells = voronoi_cells(sites, box);
  EXPECT_NEAR(area(cells[0]), 20.0, 1e-12);
  EXPECT_NEAR(area(cells[1]), 20.0, 1e-12);
  for (const Point2& v : cells[0].vertices) EXPECT_LE(v.x, 5.0 + 1e-12);
  for (const Point2& v : cells[1].vertices) EXPECT_GE(v.x, 5.0 - 1e-12);
  EXPECT_THROW(voronoi_cells(std::vector<Point2>{{1, 1}, {1, 1}}, box),
               InvalidParameter);
}

// Distance from p to the bisector of a and b.
double bisector_distance(Point2 p, Point2 a, Point2 b) {
  const Point2 n = b - a;
  return std::abs(dot(p - 0.5 * (a + b), n)) / norm(n);
}

TEST(VoronoiTest, MatchesNearestSiteOracle) {
  const BoundingBox box{0.0, 0.0, 1000.0, 700.0};
  const auto sites = testing::uniform_points(50, box, 21);
  const auto cells = voronoi_cells(sites, box);
  double total = 0.0;
  for (const Polygon& c : cells) total += area(c);
  EXPECT_NEAR(total, box.area(), 1e-6 * box.area());

  const auto queries = testing::uniform_points(10000, box, 22);
  int checked = 0;
  for (const Point2& q : queries) {
    size_t best = 0, second = 1;
    for (size_t k = 0; k < sites.size(); ++k) {
      if (squared_distance(q, sites[k]) < squared_distance(q, sites[best])) best = k;
    }
    second = best == 0 ? 1 : 0;
    for (size_t k = 0; k < sites.size(); ++k) {
      if (k != best &&
          squared_distance(q, sites[k]) < squared_distance(q, sites[second])) {
        second = k;
      }
    }
    if (bisector_distance(q, sites[best], sites[second]) < 1e-6) continue;
    ++checked;
    int containing = 0;
    for (size_t k = 0; k < cells.size(); ++k) {
      if (point_in_polygon(q, cells[k])) {
        ++containing;
        ASSERT_EQ(k, best);
      }
    }
    ASSERT_EQ(containing, 1);  // interior-disjoint
  }
  EXPECT_GT(checked, 9900);

  for (size_t k = 0; k < cells.size(); ++k) {
    double oracle = 0.0;
    const auto& v = cells[k].vertices;
    for (size_t i = 0; i < v.size(); ++i) {
      for (size_t j = 0; j < v.size(); ++j) oracle = std::max(oracle, distance(v[i], v[j]));
    }
    EXPECT_DOUBLE_EQ(polygon_diameter(cells[k]), oracle);
    const Point2 c = centroid(cells[k]);
    for (const Point2& vert : v) EXPECT_GE(polygon_diameter(cells[k]), distance(c, vert));
    EXPECT_NO_THROW(fan_triangulate(cells[k]));
    double fan = 0.0;
    for (const Triangle& t : fan_triangulate(cells[k])) fan += t.area();
    EXPECT_NEAR(fan, area(cells[k]), 1e-9 * area(cells[k]));
  }
}

}  // namespace
}  // namespace locsynth
