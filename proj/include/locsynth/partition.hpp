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

// Private spatial partitioning. Each builder returns a RegionSet whose
// regions carry a noised, post-processed point count:
//
//   * build_ugrid   - data-independent m x m grid, one noise stage (eps1).
//   * build_agrid   - two-level adaptive grid; level-1 noisy counts (eps1)
//                     size the level-2 split, level-2 counts are noised
//                     with eps2.
//   * build_cluster - expanded-uniform-grid K-means: sphere-packed initial
//                     centroids, weighted K-means over a noisy grid (eps1),
//                     Voronoi regions, then region counts noised with eps2.
//
// True counts and member indices stay inside the library; the KDE generator
// is the only consumer of member indices.

#ifndef LOCSYNTH_PARTITION_HPP_
#define LOCSYNTH_PARTITION_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "locsynth/dp.hpp"
#include "locsynth/error.hpp"
#include "locsynth/geometry.hpp"
#include "locsynth/random.hpp"

namespace locsynth {

// Equal-size cells over a box. Cells are half-open [x0, x1) x [y0, y1) except
// the last column and row, which are closed, so every point of the box falls
// in exactly one cell.
class UniformGrid {
 public:
  UniformGrid() = default;
  UniformGrid(const BoundingBox& box, int cols, int rows)
      : box_(box), cols_(cols), rows_(rows) {
    if (cols < 1 || rows < 1) throw InvalidParameter("grid needs >= 1 cell");
  }

  const BoundingBox& box() const { return box_; }
  int cols() const { return cols_; }
  int rows() const { return rows_; }
  size_t cell_count() const {
    return static_cast<size_t>(cols_) * static_cast<size_t>(rows_);
  }

  double edge_x(int i) const {
    return i >= cols_ ? box_.max_x : box_.min_x + box_.width() * i / cols_;
  }
  double edge_y(int j) const {
    return j >= rows_ ? box_.max_y : box_.min_y + box_.height() * j / rows_;
  }

  int col_of(double x) const { return locate_1d(x, box_.min_x, box_.width(), cols_, true); }
  int row_of(double y) const { return locate_1d(y, box_.min_y, box_.height(), rows_, false); }

  size_t cell_of(Point2 p) const {
    return static_cast<size_t>(row_of(p.y)) * static_cast<size_t>(cols_) +
           static_cast<size_t>(col_of(p.x));
  }

  BoundingBox cell_box(size_t cell) const {
    const int ix = static_cast<int>(cell % static_cast<size_t>(cols_));
    const int iy = static_cast<int>(cell / static_cast<size_t>(cols_));
    return {edge_x(ix), edge_y(iy), edge_x(ix + 1), edge_y(iy + 1)};
  }

  Point2 cell_center(size_t cell) const { return cell_box(cell).center(); }

 private:
  int locate_1d(double v, double lo, double extent, int n, bool is_x) const {
    int i = static_cast<int>(std::floor((v - lo) / extent * n));
    i = std::clamp(i, 0, n - 1);
    auto edge = [&](int k) { return is_x ? edge_x(k) : edge_y(k); };
    while (i > 0 && v < edge(i)) --i;
    while (i < n - 1 && v >= edge(i + 1)) ++i;
    return i;
  }

  BoundingBox box_{};
  int cols_ = 1;
  int rows_ = 1;
};

struct Region {
  int64_t id = 0;
  Polygon polygon;
  int64_t true_count = 0;
  int64_t noisy_count = 0;
  double diameter = 0.0;
  // Indices of the real points inside this region.
  std::vector<size_t> members;
  // Voronoi generator for cluster regions, cell center for grid regions.
  Point2 site;
  // Grid regions are axis-aligned rectangles (vertex order as
  // Polygon::rectangle).
  bool is_rectangle = false;
};

struct RegionSet {
  std::vector<Region> regions;
  BoundingBox bounds;
  PartitionKind method = PartitionKind::kUniformGrid;

  // Lookup structure; which members are used depends on `method`.
  UniformGrid top_grid;
  std::vector<UniformGrid> sub_grids;
  std::vector<size_t> sub_offsets;
  std::vector<Point2> sites;

  // Region containing p, or nullopt if p is outside the bounds. Voronoi ties
  // go to the lower region index.
  std::optional<size_t> locate(Point2 p) const {
    if (!bounds.contains(p)) return std::nullopt;
    switch (method) {
      case PartitionKind::kUniformGrid:
        return top_grid.cell_of(p);
      case PartitionKind::kAdaptiveGrid: {
        const size_t c = top_grid.cell_of(p);
        return sub_offsets[c] + sub_grids[c].cell_of(p);
      }
      case PartitionKind::kCluster: {
        size_t best = 0;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (size_t k = 0; k < sites.size(); ++k) {
          const double d2 = squared_distance(p, sites[k]);
          if (d2 < best_d2) {
            best_d2 = d2;
            best = k;
          }
        }
        return best;
      }
      case PartitionKind::kNone:
        break;
    }
    return std::nullopt;
  }

  int64_t total_true_count() const {
    int64_t s = 0;
    for (const Region& r : regions) s += r.true_count;
    return s;
  }
  int64_t total_noisy_count() const {
    int64_t s = 0;
    for (const Region& r : regions) s += r.noisy_count;
    return s;
  }
};

// Cells per side of a uniform grid: max(1, ceil(sqrt(N * eps / 10))).
inline int ugrid_dims(int64_t n, double eps1) {
  if (n < 0) throw InvalidParameter("N must be nonnegative");
  if (!(eps1 > 0.0)) throw InvalidParameter("eps1 must be positive");
  const double v = std::sqrt(static_cast<double>(n) * eps1 / 10.0);
  return std::max(1, static_cast<int>(std::ceil(v * (1.0 - 1e-12))));
}

// Level-1 cells per side of an adaptive grid:
// max(10, ceil(sqrt(N * eps1 / 10) / 4)).
inline int agrid_level1_dims(int64_t n, double eps1) {
  if (n < 0) throw InvalidParameter("N must be nonnegative");
  if (!(eps1 > 0.0)) throw InvalidParameter("eps1 must be positive");
  const double v = 0.25 * std::sqrt(static_cast<double>(n) * eps1 / 10.0);
  return std::max(10, static_cast<int>(std::ceil(v * (1.0 - 1e-12))));
}

// Level-2 split of a level-1 cell: max(1, ceil(sqrt(n' * eps2 / 5))).
inline int agrid_level2_dims(int64_t noisy_count, double eps2) {
  if (!(eps2 > 0.0)) throw InvalidParameter("eps2 must be positive");
  const double v =
      std::sqrt(static_cast<double>(std::max<int64_t>(0, noisy_count)) * eps2 /
                5.0);
  return std::max(1, static_cast<int>(std::ceil(v * (1.0 - 1e-12))));
}

namespace internal {

inline void require_within(std::span<const Point2> points,
                           const BoundingBox& bounds) {
  if (!bounds.valid()) throw InvalidParameter("bounds have zero extent");
  for (size_t i = 0; i < points.size(); ++i) {
    if (!bounds.contains(points[i])) {
      throw InputError("point " + std::to_string(i) +
                       " lies outside the partition bounds");
    }
  }
}

inline Region make_grid_region(int64_t id, const BoundingBox& cell) {
  Region r;
  r.id = id;
  r.polygon = Polygon::rectangle(cell);
  r.diameter = polygon_diameter(r.polygon);
  r.site = cell.center();
  r.is_rectangle = true;
  return r;
}

inline void assign_members(std::span<const Point2> points, RegionSet& set) {
  for (size_t i = 0; i < points.size(); ++i) {
    const auto idx = set.locate(points[i]);
    Region& r = set.regions[*idx];
    r.members.push_back(i);
    ++r.true_count;
  }
}

}  // namespace internal

template <NoiseSource Noise = LaplaceNoise>
RegionSet build_ugrid(std::span<const Point2> points, const BoundingBox& bounds,
                      double eps1, const StreamFactory& streams,
                      const Noise& noise = {}) {
  internal::require_within(points, bounds);
  const int m = ugrid_dims(static_cast<int64_t>(points.size()), eps1);
  RegionSet set;
  set.bounds = bounds;
  set.method = PartitionKind::kUniformGrid;
  set.top_grid = UniformGrid(bounds, m, m);
  set.regions.reserve(set.top_grid.cell_count());
  for (size_t c = 0; c < set.top_grid.cell_count(); ++c) {
    set.regions.push_back(internal::make_grid_region(
        static_cast<int64_t>(c), set.top_grid.cell_box(c)));
  }
  internal::assign_members(points, set);
  for (Region& r : set.regions) {
    Rng rng = streams.stream("ugrid.count", static_cast<uint64_t>(r.id));
    r.noisy_count = noisy_count(r.true_count, eps1, noise, rng);
  }
  return set;
}

template <NoiseSource Noise = LaplaceNoise>
RegionSet build_agrid(std::span<const Point2> points, const BoundingBox& bounds,
                      double eps1, double eps2, const StreamFactory& streams,
                      const Noise& noise = {}) {
  internal::require_within(points, bounds);
  if (!(eps2 > 0.0)) throw InvalidParameter("eps2 must be positive");
  const int m1 = agrid_level1_dims(static_cast<int64_t>(points.size()), eps1);
  RegionSet set;
  set.bounds = bounds;
  set.method = PartitionKind::kAdaptiveGrid;
  set.top_grid = UniformGrid(bounds, m1, m1);

  std::vector<int64_t> level1(set.top_grid.cell_count(), 0);
  for (const Point2& p : points) ++level1[set.top_grid.cell_of(p)];

  for (size_t c = 0; c < level1.size(); ++c) {
    Rng rng = streams.stream("agrid.level1", c);
    const int64_t n1 = noisy_count(level1[c], eps1, noise, rng);
    const int m2 = agrid_level2_dims(n1, eps2);
    set.sub_offsets.push_back(set.regions.size());
    set.sub_grids.emplace_back(set.top_grid.cell_box(c), m2, m2);
    const UniformGrid& sub = set.sub_grids.back();
    for (size_t s = 0; s < sub.cell_count(); ++s) {
      set.regions.push_back(internal::make_grid_region(
          static_cast<int64_t>(set.regions.size()), sub.cell_box(s)));
    }
  }
  internal::assign_members(points, set);
  for (Region& r : set.regions) {
    Rng rng = streams.stream("agrid.level2", static_cast<uint64_t>(r.id));
    r.noisy_count = noisy_count(r.true_count, eps2, noise, rng);
  }
  return set;
}

struct SpherePacking {
  std::vector<Point2> points;
  // Separation radius in force when the last point was accepted.
  double radius = 0.0;
  double initial_radius = 0.0;
};

// Dart throwing with a decaying separation radius: start at
// 0.7 * sqrt(area / (pi K)) and shrink by 5% after 200 consecutive
// rejections, until K points are placed.
inline SpherePacking sphere_pack_init(const BoundingBox& bounds, int64_t k,
                                      Rng& rng) {
  if (k < 1) throw InvalidParameter("K must be at least 1");
  if (!bounds.valid()) throw InvalidParameter("bounds have zero extent");
  constexpr double kDensity = 0.7;
  constexpr double kDecay = 0.95;
  constexpr int kRejectionsBeforeDecay = 200;

  SpherePacking out;
  out.initial_radius =
      kDensity * std::sqrt(bounds.area() / (std::numbers::pi * k));
  double r = out.initial_radius;

  // Hash grid with cell size r0 >= r, so a 3x3 neighborhood suffices.
  const double cell = out.initial_radius;
  const auto key = [&](Point2 p) {
    const auto ix = static_cast<int64_t>(std::floor((p.x - bounds.min_x) / cell));
    const auto iy = static_cast<int64_t>(std::floor((p.y - bounds.min_y) / cell));
    return std::pair{ix, iy};
  };
  std::unordered_map<uint64_t, std::vector<size_t>> buckets;
  const auto pack = [](int64_t ix, int64_t iy) {
    return (static_cast<uint64_t>(ix) << 32) ^ static_cast<uint64_t>(iy & 0xffffffff);
  };

  int rejections = 0;
  out.points.reserve(static_cast<size_t>(k));
  while (static_cast<int64_t>(out.points.size()) < k) {
    const Point2 cand{rng.uniform(bounds.min_x, bounds.max_x),
                      rng.uniform(bounds.min_y, bounds.max_y)};
    const auto [cx, cy] = key(cand);
    bool ok = true;
    for (int64_t dx = -1; dx <= 1 && ok; ++dx) {
      for (int64_t dy = -1; dy <= 1 && ok; ++dy) {
        auto it = buckets.find(pack(cx + dx, cy + dy));
        if (it == buckets.end()) continue;
        for (size_t j : it->second) {
          if (distance(cand, out.points[j]) < r) {
            ok = false;
            break;
          }
        }
      }
    }
    if (ok) {
      buckets[pack(cx, cy)].push_back(out.points.size());
      out.points.push_back(cand);
      out.radius = r;
      rejections = 0;
    } else if (++rejections >= kRejectionsBeforeDecay) {
      r *= kDecay;
      rejections = 0;
    }
  }
  return out;
}

struct KMeansOptions {
  double tolerance_m = 0.1;
  int max_iterations = 100;
};

struct KMeansResult {
  std::vector<Point2> centroids;
  int iterations = 0;
};

// Weighted K-means (Lloyd). Centroids that receive no weight keep their
// previous position. Ties in assignment go to the lower centroid index.
inline KMeansResult weighted_kmeans(std::span<const Point2> samples,
                                    std::span<const double> weights,
                                    std::vector<Point2> centroids,
                                    const KMeansOptions& opts = {}) {
  const size_t k = centroids.size();
  std::vector<double> wsum(k);
  std::vector<Point2> acc(k);
  KMeansResult res;
  for (int it = 0; it < opts.max_iterations; ++it) {
    std::fill(wsum.begin(), wsum.end(), 0.0);
    std::fill(acc.begin(), acc.end(), Point2{});
    for (size_t i = 0; i < samples.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      size_t best = 0;
      double best_d2 = std::numeric_limits<double>::infinity();
      for (size_t c = 0; c < k; ++c) {
        const double d2 = squared_distance(samples[i], centroids[c]);
        if (d2 < best_d2) {
          best_d2 = d2;
          best = c;
        }
      }
      wsum[best] += weights[i];
      acc[best] = acc[best] + weights[i] * samples[i];
    }
    double moved = 0.0;
    for (size_t c = 0; c < k; ++c) {
      if (wsum[c] <= 0.0) continue;
      const Point2 next = (1.0 / wsum[c]) * acc[c];
      moved = std::max(moved, distance(next, centroids[c]));
      centroids[c] = next;
    }
    res.iterations = it + 1;
    if (moved < opts.tolerance_m) break;
  }
  res.centroids = std::move(centroids);
  return res;
}

template <NoiseSource Noise = LaplaceNoise>
RegionSet build_cluster(std::span<const Point2> points,
                        const BoundingBox& bounds, int64_t k, double eps1,
                        double eps2, const StreamFactory& streams,
                        const Noise& noise = {},
                        const KMeansOptions& kmeans = {}) {
  internal::require_within(points, bounds);
  if (k < 1) throw InvalidParameter("K must be at least 1");
  if (!(eps1 > 0.0) || !(eps2 > 0.0)) {
    throw InvalidParameter("eps1 and eps2 must be positive");
  }

  const int m = ugrid_dims(static_cast<int64_t>(points.size()), eps1);
  const UniformGrid grid(bounds, m, m);
  if (static_cast<size_t>(k) > grid.cell_count()) {
    throw InvalidParameter("K = " + std::to_string(k) + " exceeds the " +
                           std::to_string(grid.cell_count()) +
                           " grid cells available at this eps1");
  }

  Rng init_rng = streams.stream("cluster.init");
  SpherePacking init = sphere_pack_init(bounds, k, init_rng);

  std::vector<int64_t> counts(grid.cell_count(), 0);
  for (const Point2& p : points) ++counts[grid.cell_of(p)];
  std::vector<Point2> centers(grid.cell_count());
  std::vector<double> weights(grid.cell_count());
  for (size_t c = 0; c < grid.cell_count(); ++c) {
    Rng rng = streams.stream("cluster.grid", c);
    centers[c] = grid.cell_center(c);
    weights[c] = static_cast<double>(noisy_count(counts[c], eps1, noise, rng));
  }

  std::vector<Point2> sites =
      weighted_kmeans(centers, weights, std::move(init.points), kmeans)
          .centroids;
  // Two centroids can only coincide in degenerate inputs; nudge the later
  // one so the Voronoi diagram stays defined.
  for (size_t i = 0; i < sites.size(); ++i) {
    for (size_t j = 0; j < i; ++j) {
      if (distance(sites[i], sites[j]) < 1e-6) {
        sites[i].x = std::min(sites[i].x + 1e-3, bounds.max_x);
        sites[i].y = std::min(sites[i].y + 1e-3, bounds.max_y);
        j = static_cast<size_t>(-1);
      }
    }
  }

  RegionSet set;
  set.bounds = bounds;
  set.method = PartitionKind::kCluster;
  set.sites = sites;
  std::vector<Polygon> cells = voronoi_cells(sites, bounds);
  set.regions.reserve(cells.size());
  for (size_t i = 0; i < cells.size(); ++i) {
    Region r;
    r.id = static_cast<int64_t>(i);
    r.polygon = std::move(cells[i]);
    r.diameter = polygon_diameter(r.polygon);
    r.site = sites[i];
    set.regions.push_back(std::move(r));
  }
  internal::assign_members(points, set);
  for (Region& r : set.regions) {
    Rng rng = streams.stream("cluster.count", static_cast<uint64_t>(r.id));
    r.noisy_count = noisy_count(r.true_count, eps2, noise, rng);
  }
  return set;
}

}  // namespace locsynth

#endif  // LOCSYNTH_PARTITION_HPP_
