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

// In-region synthetic point generation. Each region of a private RegionSet
// receives exactly its noisy count of points (minus any that cannot be
// placed outside the out-of-bounds polygons):
//
//   Uniform  area-weighted triangle picking over the centroid fan.
//   WUD      the region is split into sub-regions whose share blends area
//            and the noisy counts of the neighbors across each sub-region's
//            outer boundary. Post-processing only.
//   KDE      polar Laplace kernel around a uniformly chosen real member,
//            with bandwidth h = diameter / (eps3 / lambda) and each real
//            point charged at most lambda kernel draws.

#ifndef LOCSYNTH_REGION_GEN_HPP_
#define LOCSYNTH_REGION_GEN_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "locsynth/dp.hpp"
#include "locsynth/error.hpp"
#include "locsynth/geometry.hpp"
#include "locsynth/parallel.hpp"
#include "locsynth/partition.hpp"
#include "locsynth/random.hpp"

namespace locsynth {

// Public polygons (water, restricted land) in which no point may lie.
class OobFilter {
 public:
  OobFilter() = default;
  explicit OobFilter(std::vector<Polygon> polygons)
      : polygons_(std::move(polygons)) {
    boxes_.reserve(polygons_.size());
    for (const Polygon& p : polygons_) boxes_.push_back(bounding_box(p));
  }

  bool empty() const { return polygons_.empty(); }
  const std::vector<Polygon>& polygons() const { return polygons_; }

  bool blocked(Point2 p) const {
    for (size_t i = 0; i < polygons_.size(); ++i) {
      if (boxes_[i].contains(p) && point_in_polygon(p, polygons_[i])) {
        return true;
      }
    }
    return false;
  }

 private:
  std::vector<Polygon> polygons_;
  std::vector<BoundingBox> boxes_;
};

inline constexpr int kMaxUniformAttempts = 1000;
inline constexpr int kMaxKernelAttempts = 50;

struct RegionOutput {
  std::vector<Point2> points;
  int64_t skipped = 0;
  int64_t kernel_points = 0;
  int64_t kernel_draws = 0;
  int64_t fallback_points = 0;
  int max_counter = 0;
};

// Uniform point in the sampler's polygon outside every oob polygon, or
// nullopt after kMaxUniformAttempts rejections.
inline std::optional<Point2> sample_outside_oob(const PolygonSampler& sampler,
                                                const OobFilter& oob,
                                                Rng& rng) {
  for (int a = 0; a < kMaxUniformAttempts; ++a) {
    const Point2 p = sampler.sample(rng);
    if (!oob.blocked(p)) return p;
  }
  return std::nullopt;
}

inline RegionOutput gen_uniform(const Region& region, const OobFilter& oob,
                                Rng& rng) {
  RegionOutput out;
  if (region.noisy_count <= 0) return out;
  const PolygonSampler sampler(region.polygon);
  out.points.reserve(static_cast<size_t>(region.noisy_count));
  for (int64_t i = 0; i < region.noisy_count; ++i) {
    if (auto p = sample_outside_oob(sampler, oob, rng)) {
      out.points.push_back(*p);
    } else {
      ++out.skipped;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Weighted uniform distribution

struct SubRegion {
  Polygon polygon;
  double area = 0.0;
  // Noisy count of the region(s) across this sub-region's outer boundary.
  double neighbor_count = 0.0;
  int64_t allocated = 0;
};

struct WudAllocation {
  std::vector<SubRegion> sub_regions;
  double omega = 0.5;
};

// n'_ij = n'_i (omega A_ij / A_i + (1 - omega) x'_ij / x'_i), made integral
// by largest remainder (ties to the lower index) so the parts sum to n'_i.
// With x'_i = 0 the neighbor term is dropped (omega treated as 1).
inline std::vector<int64_t> wud_allocate(int64_t n,
                                         std::span<const double> areas,
                                         std::span<const double> neighbor,
                                         double omega) {
  if (areas.size() != neighbor.size() || areas.empty()) {
    throw InvalidParameter("WUD needs matching, nonempty area and count lists");
  }
  if (!(omega >= 0.0 && omega <= 1.0)) {
    throw InvalidParameter("omega must lie in [0, 1]");
  }
  const size_t parts = areas.size();
  double area_total = 0.0;
  double neighbor_total = 0.0;
  for (size_t j = 0; j < parts; ++j) {
    if (areas[j] < 0.0 || neighbor[j] < 0.0) {
      throw InvalidParameter("WUD areas and counts must be nonnegative");
    }
    area_total += areas[j];
    neighbor_total += neighbor[j];
  }
  const double w = neighbor_total > 0.0 ? omega : 1.0;

  std::vector<int64_t> alloc(parts, 0);
  if (n <= 0) return alloc;
  std::vector<double> remainder(parts, 0.0);
  int64_t assigned = 0;
  for (size_t j = 0; j < parts; ++j) {
    const double area_share = area_total > 0.0
                                  ? areas[j] / area_total
                                  : 1.0 / static_cast<double>(parts);
    const double neighbor_share =
        neighbor_total > 0.0 ? neighbor[j] / neighbor_total : 0.0;
    const double f =
        static_cast<double>(n) * (w * area_share + (1.0 - w) * neighbor_share);
    const double fl = std::floor(f);
    alloc[j] = static_cast<int64_t>(fl);
    remainder[j] = f - fl;
    assigned += alloc[j];
  }
  std::vector<size_t> order(parts);
  for (size_t j = 0; j < parts; ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return remainder[a] > remainder[b];
  });
  // The floors sum to at most n; hand out the shortfall by remainder.
  for (size_t i = 0; assigned < n; i = (i + 1) % parts) {
    ++alloc[order[i]];
    ++assigned;
  }
  return alloc;
}

// Splits a region for WUD. Rectangles become quadrants (SW, SE, NW, NE);
// their neighbors are the regions just across the two outer half-edges.
// Other polygons become centroid-fan triangles; the neighbor of a triangle
// is the region whose site is nearest to its outer-edge midpoint. Boundaries
// on the dataset bounds have no neighbor.
inline std::vector<SubRegion> wud_subdivide(const Region& region,
                                            const RegionSet& set) {
  std::vector<SubRegion> subs;
  const BoundingBox& bounds = set.bounds;
  const double scale = std::max(bounds.width(), bounds.height());
  const double on_bounds_tol = 1e-9 * scale;

  if (region.is_rectangle) {
    const BoundingBox b = bounding_box(region.polygon);
    const Point2 c = b.center();
    const double probe = 1e-7 * scale;
    auto across = [&](Point2 p) -> double {
      const auto idx = set.locate(p);
      if (!idx || *idx == static_cast<size_t>(region.id)) return 0.0;
      return static_cast<double>(set.regions[*idx].noisy_count);
    };
    const double mx0 = 0.5 * (b.min_x + c.x);
    const double mx1 = 0.5 * (c.x + b.max_x);
    const double my0 = 0.5 * (b.min_y + c.y);
    const double my1 = 0.5 * (c.y + b.max_y);
    const Point2 below_w{mx0, b.min_y - probe};
    const Point2 below_e{mx1, b.min_y - probe};
    const Point2 above_w{mx0, b.max_y + probe};
    const Point2 above_e{mx1, b.max_y + probe};
    const Point2 left_s{b.min_x - probe, my0};
    const Point2 left_n{b.min_x - probe, my1};
    const Point2 right_s{b.max_x + probe, my0};
    const Point2 right_n{b.max_x + probe, my1};
    const BoundingBox quads[4] = {{b.min_x, b.min_y, c.x, c.y},
                                  {c.x, b.min_y, b.max_x, c.y},
                                  {b.min_x, c.y, c.x, b.max_y},
                                  {c.x, c.y, b.max_x, b.max_y}};
    const double nb[4] = {across(below_w) + across(left_s),
                          across(below_e) + across(right_s),
                          across(above_w) + across(left_n),
                          across(above_e) + across(right_n)};
    for (int q = 0; q < 4; ++q) {
      SubRegion s;
      s.polygon = Polygon::rectangle(quads[q]);
      s.area = quads[q].area();
      s.neighbor_count = nb[q];
      subs.push_back(std::move(s));
    }
    return subs;
  }

  const std::vector<Triangle> fan = fan_triangulate(region.polygon);
  for (const Triangle& t : fan) {
    SubRegion s;
    s.polygon = Polygon{{t.a, t.b, t.c}};
    s.area = t.area();
    const Point2 mid = 0.5 * (t.b + t.c);
    const bool on_bounds = std::abs(mid.x - bounds.min_x) <= on_bounds_tol ||
                           std::abs(mid.x - bounds.max_x) <= on_bounds_tol ||
                           std::abs(mid.y - bounds.min_y) <= on_bounds_tol ||
                           std::abs(mid.y - bounds.max_y) <= on_bounds_tol;
    if (!on_bounds && set.regions.size() > 1) {
      size_t best = 0;
      double best_d2 = std::numeric_limits<double>::infinity();
      for (size_t k = 0; k < set.regions.size(); ++k) {
        if (k == static_cast<size_t>(region.id)) continue;
        const double d2 = squared_distance(mid, set.regions[k].site);
        if (d2 < best_d2) {
          best_d2 = d2;
          best = k;
        }
      }
      s.neighbor_count = static_cast<double>(set.regions[best].noisy_count);
    }
    subs.push_back(std::move(s));
  }
  return subs;
}

inline WudAllocation wud_allocate(const Region& region,
                                  std::vector<SubRegion> subs, double omega) {
  std::vector<double> areas;
  std::vector<double> neighbor;
  for (const SubRegion& s : subs) {
    areas.push_back(s.area);
    neighbor.push_back(s.neighbor_count);
  }
  const std::vector<int64_t> alloc =
      wud_allocate(region.noisy_count, areas, neighbor, omega);
  for (size_t j = 0; j < subs.size(); ++j) subs[j].allocated = alloc[j];
  return WudAllocation{std::move(subs), omega};
}

inline RegionOutput gen_wud(const Region& region, const RegionSet& set,
                            const OobFilter& oob, double omega, Rng& rng) {
  RegionOutput out;
  if (region.noisy_count <= 0) return out;
  const WudAllocation alloc =
      wud_allocate(region, wud_subdivide(region, set), omega);
  out.points.reserve(static_cast<size_t>(region.noisy_count));
  for (const SubRegion& s : alloc.sub_regions) {
    if (s.allocated == 0) continue;
    const PolygonSampler sampler(s.polygon);
    for (int64_t i = 0; i < s.allocated; ++i) {
      if (auto p = sample_outside_oob(sampler, oob, rng)) {
        out.points.push_back(*p);
      } else {
        ++out.skipped;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Private KDE

struct KdeRegionState {
  double h = 0.0;
  double eps_star = 0.0;
  int lambda = 2;
  // counters[k] counts kernel draws charged to region.members[k].
  std::vector<int> counters;
  // Positions in `counters` still below lambda.
  std::vector<size_t> uncapped;
};

inline KdeRegionState kde_smoothing(const Region& region, double eps3,
                                    int lambda) {
  if (!(eps3 > 0.0)) throw InvalidParameter("KDE requires eps3 > 0");
  if (lambda < 1) throw InvalidParameter("lambda must be a positive integer");
  if (!(region.diameter > 0.0)) {
    throw InvalidParameter("region " + std::to_string(region.id) +
                           " has zero diameter");
  }
  KdeRegionState s;
  s.lambda = lambda;
  s.eps_star = eps3 / lambda;
  s.h = region.diameter / s.eps_star;
  s.counters.assign(region.members.size(), 0);
  s.uncapped.resize(region.members.size());
  for (size_t k = 0; k < s.uncapped.size(); ++k) s.uncapped[k] = k;
  return s;
}

// Displacement drawn from the polar Laplace kernel exp(-r/h) / (2 pi h):
// r ~ Exponential(mean h), theta ~ Uniform(0, 2 pi].
inline Point2 kernel_offset(double h, Rng& rng) {
  const double r = rng.exponential(h);
  const double theta = 2.0 * std::numbers::pi * (1.0 - rng.uniform());
  return {r * std::cos(theta), r * std::sin(theta)};
}

struct KdeDraw {
  std::optional<Point2> point;
  bool from_kernel = false;
  int kernel_draws = 0;
};

// One synthetic point for a KDE region. Kernel draws are attempted around
// uncapped real members (every attempt is charged, accepted or not); points
// outside the region or inside an oob polygon are redrawn, and after
// kMaxKernelAttempts or once every member is capped the point is drawn
// uniformly from the region instead.
inline KdeDraw kde_sample(const Region& region, KdeRegionState& state,
                          std::span<const Point2> real_points,
                          const PolygonSampler& fallback, const OobFilter& oob,
                          Rng& rng) {
  KdeDraw draw;
  for (int attempt = 0; attempt < kMaxKernelAttempts; ++attempt) {
    if (state.uncapped.empty()) break;
    const size_t slot = rng.index(state.uncapped.size());
    const size_t k = state.uncapped[slot];
    if (++state.counters[k] >= state.lambda) {
      state.uncapped[slot] = state.uncapped.back();
      state.uncapped.pop_back();
    }
    ++draw.kernel_draws;
    const Point2 s = real_points[region.members[k]] + kernel_offset(state.h, rng);
    if (point_in_polygon(s, region.polygon) && !oob.blocked(s)) {
      draw.point = s;
      draw.from_kernel = true;
      return draw;
    }
  }
  draw.point = sample_outside_oob(fallback, oob, rng);
  return draw;
}

inline RegionOutput gen_kde(const Region& region, KdeRegionState& state,
                            std::span<const Point2> real_points,
                            const OobFilter& oob, Rng& rng) {
  RegionOutput out;
  if (region.noisy_count > 0) {
    const PolygonSampler fallback(region.polygon);
    out.points.reserve(static_cast<size_t>(region.noisy_count));
    for (int64_t i = 0; i < region.noisy_count; ++i) {
      const KdeDraw d =
          kde_sample(region, state, real_points, fallback, oob, rng);
      out.kernel_draws += d.kernel_draws;
      if (!d.point) {
        ++out.skipped;
        continue;
      }
      out.points.push_back(*d.point);
      if (d.from_kernel) {
        ++out.kernel_points;
      } else {
        ++out.fallback_points;
      }
    }
  }
  for (int c : state.counters) out.max_counter = std::max(out.max_counter, c);
  return out;
}

// Checks that the kernel's pdf ratio between the two most distant points of
// the region, exp(diameter / h), equals exp(eps3 / lambda) and that lambda
// draws compose to eps3.
inline void check_kernel_privacy(const Region& region,
                                 const KdeRegionState& state, double eps3) {
  const double ratio = region.diameter / state.h;
  if (std::abs(ratio - state.eps_star) > 1e-12 * state.eps_star ||
      std::abs(state.lambda * state.eps_star - eps3) > 1e-12 * eps3) {
    throw InvariantViolation("kernel privacy ratio violated in region " +
                             std::to_string(region.id));
  }
}

struct GenOptions {
  double omega = 0.5;
  int lambda = 2;
  int workers = 1;
};

struct GenerationResult {
  std::vector<Point2> points;
  int64_t skipped = 0;
  int64_t kernel_points = 0;
  int64_t kernel_draws = 0;
  int64_t fallback_points = 0;
  // Largest per-real-point kernel draw count over all regions.
  int max_counter = 0;
  // Largest diameter / h over all KDE regions (equals eps3 / lambda).
  double max_kernel_log_ratio = 0.0;
  std::vector<std::string> warnings;
};

inline GenerationResult generate_regions(const RegionSet& set,
                                         GeneratorKind method,
                                         const Budget& budget,
                                         const OobFilter& oob,
                                         std::span<const Point2> real_points,
                                         const StreamFactory& streams,
                                         const GenOptions& opts = {}) {
  if (method == GeneratorKind::kRoad) {
    throw InvalidParameter("generate_regions does not handle Road");
  }
  if (method == GeneratorKind::kKde && !(budget.eps3 > 0.0)) {
    throw InvalidParameter("KDE generation needs eps3 > 0");
  }
  const size_t n = set.regions.size();
  std::vector<RegionOutput> outputs(n);
  std::vector<double> log_ratio(n, 0.0);
  parallel_for(n, opts.workers, [&](size_t i) {
    const Region& region = set.regions[i];
    Rng rng = streams.stream("generate", static_cast<uint64_t>(region.id));
    switch (method) {
      case GeneratorKind::kUniform:
        outputs[i] = gen_uniform(region, oob, rng);
        break;
      case GeneratorKind::kWud:
        outputs[i] = gen_wud(region, set, oob, opts.omega, rng);
        break;
      case GeneratorKind::kKde: {
        KdeRegionState state = kde_smoothing(region, budget.eps3, opts.lambda);
        check_kernel_privacy(region, state, budget.eps3);
        log_ratio[i] = region.diameter / state.h;
        outputs[i] = gen_kde(region, state, real_points, oob, rng);
        break;
      }
      case GeneratorKind::kRoad:
        break;
    }
  });

  GenerationResult res;
  size_t total = 0;
  for (const RegionOutput& o : outputs) total += o.points.size();
  res.points.reserve(total);
  for (size_t i = 0; i < n; ++i) {
    const RegionOutput& o = outputs[i];
    res.points.insert(res.points.end(), o.points.begin(), o.points.end());
    res.skipped += o.skipped;
    res.kernel_points += o.kernel_points;
    res.kernel_draws += o.kernel_draws;
    res.fallback_points += o.fallback_points;
    res.max_counter = std::max(res.max_counter, o.max_counter);
    res.max_kernel_log_ratio = std::max(res.max_kernel_log_ratio, log_ratio[i]);
    if (o.skipped > 0) {
      res.warnings.push_back("region " + std::to_string(set.regions[i].id) +
                             ": skipped " + std::to_string(o.skipped) +
                             " point(s) that could not avoid out-of-bounds "
                             "areas");
    }
  }
  if (method == GeneratorKind::kKde && res.max_counter > opts.lambda) {
    throw InvariantViolation("kernel draw counter exceeded lambda");
  }
  return res;
}

}  // namespace locsynth

#endif  // LOCSYNTH_REGION_GEN_HPP_
