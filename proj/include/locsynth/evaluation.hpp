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

// Utility metrics comparing a real and a synthetic point set.

#ifndef LOCSYNTH_EVALUATION_HPP_
#define LOCSYNTH_EVALUATION_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "locsynth/error.hpp"
#include "locsynth/geometry.hpp"
#include "locsynth/parallel.hpp"
#include "locsynth/partition.hpp"
#include "locsynth/random.hpp"
#include "locsynth/roadnet.hpp"

namespace locsynth {

// Normalized cell error: sum over cells of |c_real - c_synth| / |real|.
// Cells are cell_size squares anchored at the bounds' lower-left corner;
// points outside the bounds count toward the nearest border cell.
inline double nce(std::span<const Point2> real, std::span<const Point2> synth,
                  const BoundingBox& bounds, double cell_size = 100.0) {
  if (real.empty()) throw UndefinedMetric("NCE needs a nonempty real set");
  if (!(cell_size > 0.0)) throw InvalidParameter("cell_size must be positive");
  const auto nx = static_cast<int64_t>(
      std::max(1.0, std::ceil(bounds.width() / cell_size)));
  const auto ny = static_cast<int64_t>(
      std::max(1.0, std::ceil(bounds.height() / cell_size)));
  auto cell = [&](Point2 p) {
    const auto ix = std::clamp<int64_t>(
        static_cast<int64_t>(std::floor((p.x - bounds.min_x) / cell_size)), 0,
        nx - 1);
    const auto iy = std::clamp<int64_t>(
        static_cast<int64_t>(std::floor((p.y - bounds.min_y) / cell_size)), 0,
        ny - 1);
    return static_cast<size_t>(iy * nx + ix);
  };
  std::vector<int64_t> diff(static_cast<size_t>(nx * ny), 0);
  for (const Point2& p : real) ++diff[cell(p)];
  for (const Point2& p : synth) --diff[cell(p)];
  int64_t l1 = 0;
  for (int64_t d : diff) l1 += d < 0 ? -d : d;
  return static_cast<double>(l1) / static_cast<double>(real.size());
}

inline double mean_edge_distance(std::span<const Point2> pts,
                                 const RoadGraph& graph, int workers = 1) {
  const std::vector<MatchResult> m = map_match_all(pts, graph, workers);
  double s = 0.0;
  for (const MatchResult& r : m) s += r.d;
  return s / static_cast<double>(pts.size());
}

// Mean edge distance difference.
inline double medd(std::span<const Point2> real, std::span<const Point2> synth,
                   const RoadGraph& graph, int workers = 1) {
  if (real.empty() || synth.empty()) {
    throw UndefinedMetric("MEDD needs nonempty real and synthetic sets");
  }
  if (graph.empty()) throw InputError("MEDD needs a nonempty road graph");
  return std::abs(mean_edge_distance(real, graph, workers) -
                  mean_edge_distance(synth, graph, workers));
}

// Bucketed point index for disc counting.
class PointGridIndex {
 public:
  PointGridIndex(std::span<const Point2> pts, double cell_size)
      : cell_(cell_size) {
    if (!pts.empty()) box_ = BoundingBox::of(pts);
    nx_ = std::max<int64_t>(1, static_cast<int64_t>(std::floor(box_.width() / cell_)) + 1);
    ny_ = std::max<int64_t>(1, static_cast<int64_t>(std::floor(box_.height() / cell_)) + 1);
    buckets_.assign(static_cast<size_t>(nx_ * ny_), {});
    for (const Point2& p : pts) {
      buckets_[static_cast<size_t>(row(p.y) * nx_ + col(p.x))].push_back(p);
    }
    empty_ = pts.empty();
  }

  // Points with squared distance <= r^2 from c.
  int64_t count_within(Point2 c, double r) const {
    if (empty_) return 0;
    const double r2 = r * r;
    const int64_t x0 = col(c.x - r), x1 = col(c.x + r);
    const int64_t y0 = row(c.y - r), y1 = row(c.y + r);
    int64_t n = 0;
    for (int64_t iy = y0; iy <= y1; ++iy) {
      for (int64_t ix = x0; ix <= x1; ++ix) {
        for (const Point2& p : buckets_[static_cast<size_t>(iy * nx_ + ix)]) {
          const double dx = p.x - c.x;
          const double dy = p.y - c.y;
          if (dx * dx + dy * dy <= r2) ++n;
        }
      }
    }
    return n;
  }

 private:
  int64_t col(double x) const {
    return std::clamp<int64_t>(
        static_cast<int64_t>(std::floor((x - box_.min_x) / cell_)), 0, nx_ - 1);
  }
  int64_t row(double y) const {
    return std::clamp<int64_t>(
        static_cast<int64_t>(std::floor((y - box_.min_y) / cell_)), 0, ny_ - 1);
  }

  double cell_;
  BoundingBox box_{0.0, 0.0, 0.0, 0.0};
  int64_t nx_ = 1;
  int64_t ny_ = 1;
  std::vector<std::vector<Point2>> buckets_;
  bool empty_ = true;
};

// Mean over locations of |#real within r - #synth within r|.
inline double range_mae(std::span<const Point2> real,
                        std::span<const Point2> synth,
                        std::span<const Point2> locations, double r) {
  if (locations.empty()) throw InvalidParameter("range_mae needs locations");
  if (!(r > 0.0)) throw InvalidParameter("range radius must be positive");
  const PointGridIndex ri(real, r);
  const PointGridIndex si(synth, r);
  double total = 0.0;
  for (const Point2& c : locations) {
    total += static_cast<double>(
        std::abs(ri.count_within(c, r) - si.count_within(c, r)));
  }
  return total / static_cast<double>(locations.size());
}

// ---------------------------------------------------------------------------
// Hotspots

struct HotspotSet {
  int g = 0;
  // Row-major cell indices, ascending.
  std::vector<size_t> cells;
};

// Linear-interpolation percentile (q in [0, 100]) of unsorted values.
inline double percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// g x g counts smoothed by a truncated (3 sigma) discrete Gaussian with zero
// padding.
inline std::vector<double> smoothed_density(std::span<const Point2> pts,
                                            const BoundingBox& bounds, int g,
                                            double sigma_cells) {
  const UniformGrid grid(bounds, g, g);
  const auto gs = static_cast<size_t>(g);
  std::vector<double> counts(gs * gs, 0.0);
  for (const Point2& p : pts) {
    const Point2 q{std::clamp(p.x, bounds.min_x, bounds.max_x),
                   std::clamp(p.y, bounds.min_y, bounds.max_y)};
    counts[grid.cell_of(q)] += 1.0;
  }
  if (!(sigma_cells > 0.0)) return counts;
  const int radius = static_cast<int>(std::ceil(3.0 * sigma_cells));
  std::vector<double> w(static_cast<size_t>(2 * radius + 1));
  double wsum = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    w[static_cast<size_t>(k + radius)] =
        std::exp(-0.5 * k * k / (sigma_cells * sigma_cells));
    wsum += w[static_cast<size_t>(k + radius)];
  }
  for (double& x : w) x /= wsum;
  std::vector<double> tmp(gs * gs, 0.0);
  for (int y = 0; y < g; ++y) {
    for (int x = 0; x < g; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        const int xx = x + k;
        if (xx < 0 || xx >= g) continue;
        acc += w[static_cast<size_t>(k + radius)] *
               counts[static_cast<size_t>(y) * gs + static_cast<size_t>(xx)];
      }
      tmp[static_cast<size_t>(y) * gs + static_cast<size_t>(x)] = acc;
    }
  }
  std::vector<double> out(gs * gs, 0.0);
  for (int y = 0; y < g; ++y) {
    for (int x = 0; x < g; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        const int yy = y + k;
        if (yy < 0 || yy >= g) continue;
        acc += w[static_cast<size_t>(k + radius)] *
               tmp[static_cast<size_t>(yy) * gs + static_cast<size_t>(x)];
      }
      out[static_cast<size_t>(y) * gs + static_cast<size_t>(x)] = acc;
    }
  }
  return out;
}

// Cells whose smoothed density strictly exceeds the 95th percentile of all
// g^2 cell densities.
inline HotspotSet hotspots(std::span<const Point2> pts,
                           const BoundingBox& bounds, int g,
                           double sigma_cells = 2.0) {
  if (g < 2) throw InvalidParameter("hotspot grid needs g >= 2");
  const std::vector<double> density =
      smoothed_density(pts, bounds, g, sigma_cells);
  const double p95 = percentile(density, 95.0);
  HotspotSet out{g, {}};
  for (size_t i = 0; i < density.size(); ++i) {
    if (density[i] > p95) out.cells.push_back(i);
  }
  return out;
}

// Sorensen-Dice coefficient of two index sets; 1 when both are empty.
inline double sdc(std::vector<size_t> a, std::vector<size_t> b) {
  if (a.empty() && b.empty()) return 1.0;
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  std::vector<size_t> both;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(both));
  return 2.0 * static_cast<double>(both.size()) /
         static_cast<double>(a.size() + b.size());
}

inline double hotspot_sdc(std::span<const Point2> real,
                          std::span<const Point2> synth,
                          const BoundingBox& bounds, int g,
                          double sigma_cells = 2.0) {
  return sdc(hotspots(real, bounds, g, sigma_cells).cells,
             hotspots(synth, bounds, g, sigma_cells).cells);
}

// ---------------------------------------------------------------------------
// Facility location

enum class FlqVariant { kMaxInf, kMinDist };

inline std::string to_string(FlqVariant v) {
  return v == FlqVariant::kMaxInf ? "MaxInf" : "MinDist";
}

// Selected candidate indices in selection order.
//   MaxInf:  rank by number of points whose nearest candidate (among all
//            candidates) it is; top B, ties to the lower index.
//   MinDist: greedy; each round adds the candidate that most reduces the
//            total point-to-nearest-selected distance, ties to the lower
//            index.
inline std::vector<size_t> flq(std::span<const Point2> pts,
                               std::span<const Point2> candidates, size_t b,
                               FlqVariant variant, int workers = 1) {
  if (b > candidates.size()) {
    throw InvalidParameter("B exceeds the number of candidates");
  }
  const size_t nc = candidates.size();
  std::vector<size_t> chosen;
  if (b == 0) return chosen;

  if (variant == FlqVariant::kMaxInf) {
    std::vector<int64_t> influence(nc, 0);
    for (const Point2& p : pts) {
      size_t best = 0;
      double best_d2 = std::numeric_limits<double>::infinity();
      for (size_t c = 0; c < nc; ++c) {
        const double d2 = squared_distance(p, candidates[c]);
        if (d2 < best_d2) {
          best_d2 = d2;
          best = c;
        }
      }
      ++influence[best];
    }
    std::vector<size_t> order(nc);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t x, size_t y) {
      return influence[x] > influence[y];
    });
    chosen.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(b));
    return chosen;
  }

  const size_t np = pts.size();
  std::vector<double> dist(nc * np);
  parallel_for(nc, workers, [&](size_t c) {
    for (size_t i = 0; i < np; ++i) {
      dist[c * np + i] = distance(pts[i], candidates[c]);
    }
  });
  std::vector<double> current(np, std::numeric_limits<double>::infinity());
  std::vector<bool> used(nc, false);
  std::vector<double> cost(nc);
  for (size_t round = 0; round < b; ++round) {
    parallel_for(nc, workers, [&](size_t c) {
      if (used[c]) return;
      double s = 0.0;
      const double* row = &dist[c * np];
      for (size_t i = 0; i < np; ++i) s += std::min(current[i], row[i]);
      cost[c] = s;
    });
    size_t best = nc;
    for (size_t c = 0; c < nc; ++c) {
      if (used[c]) continue;
      if (best == nc || cost[c] < cost[best]) best = c;
    }
    used[best] = true;
    chosen.push_back(best);
    const double* row = &dist[best * np];
    for (size_t i = 0; i < np; ++i) current[i] = std::min(current[i], row[i]);
  }
  return chosen;
}

inline double flq_sdc(std::span<const Point2> real,
                      std::span<const Point2> synth,
                      std::span<const Point2> candidates, size_t b,
                      FlqVariant variant, int workers = 1) {
  return sdc(flq(real, candidates, b, variant, workers),
             flq(synth, candidates, b, variant, workers));
}

// ---------------------------------------------------------------------------
// Report

struct MetricReport {
  double nce = 0.0;
  std::optional<double> medd;
  std::map<double, double> range_mae;
  std::map<int, double> hotspot_sdc;
  std::map<std::string, double> flq_sdc;
  double runtime_seconds = 0.0;
};

struct EvalOptions {
  double cell_size = 100.0;
  std::vector<double> radii = {100.0, 250.0, 500.0, 1000.0};
  std::vector<int> granularities = {64, 128, 256};
  double sigma_cells = 2.0;
  size_t facilities = 20;
  size_t locations = 100;
  int workers = 1;
};

// Query locations: a seeded sample (without replacement) of graph nodes, or
// uniform points in the bounds when no graph is available.
inline std::vector<Point2> sample_locations(const RoadGraph* graph,
                                            const BoundingBox& bounds,
                                            size_t count, Rng& rng) {
  std::vector<Point2> out;
  if (graph != nullptr && !graph->nodes().empty()) {
    std::vector<size_t> idx(graph->nodes().size());
    std::iota(idx.begin(), idx.end(), size_t{0});
    const size_t take = std::min(count, idx.size());
    for (size_t i = 0; i < take; ++i) {
      std::swap(idx[i], idx[i + rng.index(idx.size() - i)]);
      out.push_back(graph->nodes()[idx[i]].position);
    }
    return out;
  }
  for (size_t i = 0; i < count; ++i) {
    out.push_back({rng.uniform(bounds.min_x, bounds.max_x),
                   rng.uniform(bounds.min_y, bounds.max_y)});
  }
  return out;
}

inline MetricReport evaluate(std::span<const Point2> real,
                             std::span<const Point2> synth,
                             const RoadGraph* graph, const BoundingBox& bounds,
                             const StreamFactory& streams,
                             const EvalOptions& opts = {}) {
  MetricReport rep;
  rep.nce = nce(real, synth, bounds, opts.cell_size);
  if (graph != nullptr && !graph->empty() && !synth.empty()) {
    rep.medd = medd(real, synth, *graph, opts.workers);
  }
  Rng loc_rng = streams.stream("eval.locations");
  const std::vector<Point2> locations =
      sample_locations(graph, bounds, opts.locations, loc_rng);
  for (double r : opts.radii) {
    rep.range_mae[r] = range_mae(real, synth, locations, r);
  }
  for (int g : opts.granularities) {
    rep.hotspot_sdc[g] = hotspot_sdc(real, synth, bounds, g, opts.sigma_cells);
  }
  const size_t b = std::min(opts.facilities, locations.size());
  for (FlqVariant v : {FlqVariant::kMaxInf, FlqVariant::kMinDist}) {
    rep.flq_sdc[to_string(v)] =
        flq_sdc(real, synth, locations, b, v, opts.workers);
  }
  return rep;
}

}  // namespace locsynth

#endif  // LOCSYNTH_EVALUATION_HPP_
