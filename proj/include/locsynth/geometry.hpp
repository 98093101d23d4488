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

// Planar geometry kernel. All coordinates are local meters produced by an
// equirectangular projection around a fixed origin.

#ifndef LOCSYNTH_GEOMETRY_HPP_
#define LOCSYNTH_GEOMETRY_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "locsynth/error.hpp"
#include "locsynth/random.hpp"

namespace locsynth {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline double squared_distance(Point2 a, Point2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

struct BoundingBox {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  double area() const { return width() * height(); }
  Point2 center() const {
    return {0.5 * (min_x + max_x), 0.5 * (min_y + max_y)};
  }
  bool valid() const { return max_x > min_x && max_y > min_y; }
  bool contains(Point2 p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
  BoundingBox expanded(double margin) const {
    return {min_x - margin, min_y - margin, max_x + margin, max_y + margin};
  }

  // Smallest box containing all points; invalid (zero extent) if fewer than
  // two distinct coordinates.
  static BoundingBox of(std::span<const Point2> pts) {
    BoundingBox b{std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity(),
                  -std::numeric_limits<double>::infinity(),
                  -std::numeric_limits<double>::infinity()};
    for (const Point2& p : pts) {
      b.min_x = std::min(b.min_x, p.x);
      b.min_y = std::min(b.min_y, p.y);
      b.max_x = std::max(b.max_x, p.x);
      b.max_y = std::max(b.max_y, p.y);
    }
    return b;
  }
};

// Counterclockwise ring; the closing edge is implicit.
struct Polygon {
  std::vector<Point2> vertices;

  size_t size() const { return vertices.size(); }
  const Point2& operator[](size_t i) const { return vertices[i]; }

  static Polygon rectangle(const BoundingBox& b) {
    return Polygon{{{b.min_x, b.min_y},
                    {b.max_x, b.min_y},
                    {b.max_x, b.max_y},
                    {b.min_x, b.max_y}}};
  }
};

struct Triangle {
  Point2 a;
  Point2 b;
  Point2 c;

  double signed_area() const { return 0.5 * cross(b - a, c - a); }
  double area() const { return std::abs(signed_area()); }
};

inline double signed_area(const Polygon& poly) {
  double twice = 0.0;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    twice += cross(poly[i], poly[(i + 1) % n]);
  }
  return 0.5 * twice;
}

inline double area(const Polygon& poly) { return std::abs(signed_area(poly)); }

// Area centroid; falls back to the vertex mean for degenerate rings.
inline Point2 centroid(const Polygon& poly) {
  const size_t n = poly.size();
  if (n == 0) return {};
  const Point2 o = poly[0];
  double a2 = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const Point2 p = poly[i] - o;
    const Point2 q = poly[(i + 1) % n] - o;
    const double w = cross(p, q);
    a2 += w;
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  double scale = 0.0;
  for (const Point2& v : poly.vertices) {
    scale = std::max(scale, squared_distance(v, o));
  }
  if (std::abs(a2) <= 1e-14 * scale || a2 == 0.0) {
    Point2 m{};
    for (const Point2& v : poly.vertices) m = m + v;
    return (1.0 / static_cast<double>(n)) * m;
  }
  return {o.x + cx / (3.0 * a2), o.y + cy / (3.0 * a2)};
}

inline BoundingBox bounding_box(const Polygon& poly) {
  return BoundingBox::of(poly.vertices);
}

// ---------------------------------------------------------------------------
// Projection

inline constexpr double kEarthRadiusMeters = 6371000.0;

struct LonLat {
  double lon = 0.0;
  double lat = 0.0;
};

// Equirectangular projection about a fixed origin.
class Projection {
 public:
  explicit Projection(LonLat origin) : origin_(origin) {
    check_latitude(origin.lat);
    cos_lat0_ = std::cos(origin.lat * kDegToRad);
  }

  const LonLat& origin() const { return origin_; }

  Point2 project(LonLat ll) const {
    check_latitude(ll.lat);
    return {kEarthRadiusMeters * (ll.lon - origin_.lon) * kDegToRad * cos_lat0_,
            kEarthRadiusMeters * (ll.lat - origin_.lat) * kDegToRad};
  }

  LonLat unproject(Point2 p) const {
    return {origin_.lon + p.x / (kEarthRadiusMeters * cos_lat0_) / kDegToRad,
            origin_.lat + p.y / kEarthRadiusMeters / kDegToRad};
  }

 private:
  static constexpr double kDegToRad = std::numbers::pi / 180.0;

  static void check_latitude(double lat) {
    if (!(std::abs(lat) < 89.0)) {
      throw InvalidParameter("latitude must satisfy |lat| < 89 degrees");
    }
  }

  LonLat origin_;
  double cos_lat0_;
};

inline Point2 project(double lon, double lat, LonLat origin) {
  return Projection(origin).project({lon, lat});
}

inline LonLat unproject(Point2 p, LonLat origin) {
  return Projection(origin).unproject(p);
}

// ---------------------------------------------------------------------------
// Sampling

// Triangle point picking: (1 - sqrt(r1)) a + sqrt(r1)(1 - r2) b + sqrt(r1) r2 c.
inline Point2 triangle_point(const Triangle& t, double r1, double r2) {
  const double s = std::sqrt(r1);
  const double wa = 1.0 - s;
  const double wb = s * (1.0 - r2);
  const double wc = s * r2;
  return {wa * t.a.x + wb * t.b.x + wc * t.c.x,
          wa * t.a.y + wb * t.b.y + wc * t.c.y};
}

inline Point2 triangle_sample(const Triangle& t, Rng& rng) {
  const double r1 = rng.uniform();
  const double r2 = rng.uniform();
  return triangle_point(t, r1, r2);
}

// One triangle (centroid, v_k, v_{k+1}) per polygon edge. Throws
// UnsupportedShape if the fan folds over, i.e. the polygon is not
// star-shaped about its centroid.
inline std::vector<Triangle> fan_triangulate(const Polygon& poly) {
  if (poly.size() < 3) {
    throw UnsupportedShape("polygon needs at least 3 vertices");
  }
  const Point2 c = centroid(poly);
  const double total = signed_area(poly);
  std::vector<Triangle> fan;
  fan.reserve(poly.size());
  const double tol = 1e-12 * std::max(std::abs(total), 1e-300);
  for (size_t k = 0; k < poly.size(); ++k) {
    Triangle t{c, poly[k], poly[(k + 1) % poly.size()]};
    if (t.signed_area() < -tol) {
      throw UnsupportedShape("centroid fan self-intersects");
    }
    fan.push_back(t);
  }
  return fan;
}

// Area-weighted sampler over a polygon's centroid fan.
class PolygonSampler {
 public:
  explicit PolygonSampler(const Polygon& poly)
      : triangles_(fan_triangulate(poly)) {
    cumulative_.reserve(triangles_.size());
    double acc = 0.0;
    for (const Triangle& t : triangles_) {
      acc += t.area();
      cumulative_.push_back(acc);
    }
  }

  double area() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  const std::vector<Triangle>& triangles() const { return triangles_; }

  Point2 sample(Rng& rng) const {
    const double total = area();
    size_t k;
    if (total > 0.0) {
      const double u = rng.uniform() * total;
      k = static_cast<size_t>(
          std::upper_bound(cumulative_.begin(), cumulative_.end(), u) -
          cumulative_.begin());
      k = std::min(k, triangles_.size() - 1);
    } else {
      k = rng.index(triangles_.size());
    }
    return triangle_sample(triangles_[k], rng);
  }

 private:
  std::vector<Triangle> triangles_;
  std::vector<double> cumulative_;
};

inline Point2 polygon_sample(const Polygon& poly, Rng& rng) {
  return PolygonSampler(poly).sample(rng);
}

// ---------------------------------------------------------------------------
// Predicates and measures

inline double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

// Crossing-number test; points within 1e-9 m of the boundary are inside.
inline bool point_in_polygon(Point2 p, const Polygon& poly) {
  constexpr double kBoundaryTol = 1e-9;
  const size_t n = poly.size();
  if (n == 0) return false;
  for (size_t i = 0; i < n; ++i) {
    if (point_segment_distance(p, poly[i], poly[(i + 1) % n]) <=
        kBoundaryTol) {
      return true;
    }
  }
  bool inside = false;
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2& a = poly[i];
    const Point2& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

// Maximum pairwise vertex distance; exact for convex polygons.
inline double polygon_diameter(const Polygon& poly) {
  double best = 0.0;
  for (size_t i = 0; i < poly.size(); ++i) {
    for (size_t j = i + 1; j < poly.size(); ++j) {
      best = std::max(best, squared_distance(poly[i], poly[j]));
    }
  }
  return std::sqrt(best);
}

// ---------------------------------------------------------------------------
// Voronoi cells by half-plane clipping

// Drops consecutive near-duplicate vertices and collinear interior vertices.
inline Polygon clean_ring(const Polygon& poly, double tol = 1e-9) {
  std::vector<Point2> v;
  v.reserve(poly.size());
  for (const Point2& p : poly.vertices) {
    if (v.empty() || distance(v.back(), p) > tol) v.push_back(p);
  }
  while (v.size() > 1 && distance(v.front(), v.back()) <= tol) v.pop_back();
  bool changed = true;
  while (changed && v.size() > 3) {
    changed = false;
    for (size_t i = 0; i < v.size() && v.size() > 3; ++i) {
      const Point2& prev = v[(i + v.size() - 1) % v.size()];
      const Point2& next = v[(i + 1) % v.size()];
      const double base = distance(prev, next);
      if (base > 0.0 &&
          std::abs(cross(v[i] - prev, next - prev)) / base <= tol) {
        v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  return Polygon{std::move(v)};
}

// Keeps the part of a convex polygon with dot(x - origin, normal) <= 0.
inline Polygon clip_half_plane(const Polygon& poly, Point2 origin,
                               Point2 normal) {
  std::vector<Point2> out;
  const size_t n = poly.size();
  if (n == 0) return {};
  out.reserve(n + 1);
  for (size_t i = 0; i < n; ++i) {
    const Point2& a = poly[i];
    const Point2& b = poly[(i + 1) % n];
    const double sa = dot(a - origin, normal);
    const double sb = dot(b - origin, normal);
    if (sa <= 0.0) out.push_back(a);
    if ((sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0)) {
      const double t = sa / (sa - sb);
      out.push_back(a + t * (b - a));
    }
  }
  return Polygon{std::move(out)};
}

// Cell k is the clip box intersected with {x : |x - c_k| <= |x - c_j|}.
inline std::vector<Polygon> voronoi_cells(std::span<const Point2> sites,
                                          const BoundingBox& clip) {
  if (sites.empty()) {
    throw InvalidParameter("voronoi_cells needs at least one site");
  }
  if (!clip.valid()) throw InvalidParameter("invalid clip box");
  constexpr double kMinSeparation = 1e-6;
  const size_t k_sites = sites.size();

  std::vector<size_t> by_x(k_sites);
  std::iota(by_x.begin(), by_x.end(), size_t{0});
  std::sort(by_x.begin(), by_x.end(),
            [&](size_t a, size_t b) { return sites[a].x < sites[b].x; });
  for (size_t i = 0; i < k_sites; ++i) {
    for (size_t j = i + 1; j < k_sites; ++j) {
      if (sites[by_x[j]].x - sites[by_x[i]].x >= kMinSeparation) break;
      if (distance(sites[by_x[i]], sites[by_x[j]]) < kMinSeparation) {
        throw InvalidParameter("duplicate Voronoi sites");
      }
    }
  }

  const Polygon box = Polygon::rectangle(clip);
  std::vector<Polygon> cells;
  cells.reserve(k_sites);
  std::vector<std::pair<double, size_t>> others;
  others.reserve(k_sites);
  for (size_t k = 0; k < k_sites; ++k) {
    const Point2 c = sites[k];
    others.clear();
    for (size_t j = 0; j < k_sites; ++j) {
      if (j != k) others.emplace_back(squared_distance(c, sites[j]), j);
    }
    std::sort(others.begin(), others.end());
    Polygon cell = box;
    double reach2 = 0.0;
    for (const Point2& v : cell.vertices) {
      reach2 = std::max(reach2, squared_distance(c, v));
    }
    for (const auto& [d2, j] : others) {
      // Sites farther than twice the cell's reach cannot cut it.
      if (d2 > 4.0 * reach2) break;
      const Point2 mid = 0.5 * (c + sites[j]);
      cell = clip_half_plane(cell, mid, sites[j] - c);
      if (cell.size() < 3) break;
      reach2 = 0.0;
      for (const Point2& v : cell.vertices) {
        reach2 = std::max(reach2, squared_distance(c, v));
      }
    }
    cells.push_back(clean_ring(cell));
  }
  return cells;
}

}  // namespace locsynth

#endif  // LOCSYNTH_GEOMETRY_HPP_
