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

// Road-network-constrained generation.
//
// Real points are map-matched to their nearest edge, giving a perpendicular
// offset d and an along-edge position l. Per-edge counts are noised with
// eps1, renormalized to the true total and thresholded at a Laplace
// quantile. Each surviving edge is summarized by two noisy micro-histograms
// (l with eps2, d with eps3) with about sqrt(n'_e) bins, from which n'_e
// synthetic points are drawn on a uniformly chosen side of the edge.

#ifndef LOCSYNTH_ROADNET_HPP_
#define LOCSYNTH_ROADNET_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "locsynth/dp.hpp"
#include "locsynth/error.hpp"
#include "locsynth/geometry.hpp"
#include "locsynth/parallel.hpp"
#include "locsynth/random.hpp"
#include "locsynth/region_gen.hpp"

namespace locsynth {

struct RoadNode {
  int64_t id = 0;
  Point2 position;
};

struct Edge {
  int64_t id = 0;
  std::vector<int64_t> node_ids;
  std::vector<Point2> polyline;
  // cumulative[k] is the arc length at polyline[k].
  std::vector<double> cumulative;
  double length = 0.0;

  static Edge make(int64_t id, std::vector<int64_t> node_ids,
                   std::vector<Point2> polyline) {
    if (polyline.size() < 2) {
      throw InputError("edge " + std::to_string(id) + " has no segment");
    }
    Edge e;
    e.id = id;
    e.node_ids = std::move(node_ids);
    e.polyline = std::move(polyline);
    e.cumulative.reserve(e.polyline.size());
    e.cumulative.push_back(0.0);
    for (size_t k = 1; k < e.polyline.size(); ++k) {
      e.cumulative.push_back(e.cumulative.back() +
                             distance(e.polyline[k - 1], e.polyline[k]));
    }
    e.length = e.cumulative.back();
    if (!(e.length > 0.0)) {
      throw InputError("edge " + std::to_string(id) + " has zero length");
    }
    return e;
  }

  size_t segment_count() const { return polyline.size() - 1; }

  // Segment holding arc length l; at an interior vertex, the earlier one.
  size_t segment_at(double l) const {
    auto it = std::lower_bound(cumulative.begin() + 1, cumulative.end(), l);
    if (it == cumulative.end()) return segment_count() - 1;
    return static_cast<size_t>(it - cumulative.begin()) - 1;
  }

  // Point at arc length l (clamped to [0, length]) and the left unit normal
  // of its segment.
  std::pair<Point2, Point2> point_and_normal(double l) const {
    l = std::clamp(l, 0.0, length);
    size_t k = segment_at(l);
    // Skip zero-length segments for the normal.
    while (k + 1 < segment_count() &&
           cumulative[k + 1] - cumulative[k] == 0.0) {
      ++k;
    }
    const Point2 a = polyline[k];
    const Point2 b = polyline[k + 1];
    const double seg = cumulative[k + 1] - cumulative[k];
    const Point2 dir = seg > 0.0 ? (1.0 / seg) * (b - a) : Point2{1.0, 0.0};
    const double t = seg > 0.0 ? (l - cumulative[k]) / seg : 0.0;
    return {a + std::clamp(t, 0.0, 1.0) * (b - a), Point2{-dir.y, dir.x}};
  }
};

struct MatchResult {
  // Index into RoadGraph::edges(), which is sorted by edge id.
  size_t edge = 0;
  double d = 0.0;
  double l = 0.0;
};

struct EdgeProjection {
  double d = std::numeric_limits<double>::infinity();
  double l = 0.0;
};

// Distance from p to the polyline and the arc length of the closest point.
// The earliest segment wins ties.
inline EdgeProjection project_onto_edge(Point2 p, const Edge& e) {
  EdgeProjection best;
  for (size_t k = 0; k < e.segment_count(); ++k) {
    const Point2 a = e.polyline[k];
    const Point2 ab = e.polyline[k + 1] - a;
    const double len2 = dot(ab, ab);
    const double t =
        len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
    const double d = distance(p, a + t * ab);
    if (d < best.d) {
      best.d = d;
      best.l = e.cumulative[k] + t * (e.cumulative[k + 1] - e.cumulative[k]);
    }
  }
  return best;
}

class RoadGraph {
 public:
  RoadGraph() = default;

  RoadGraph(std::vector<RoadNode> nodes, std::vector<Edge> edges)
      : nodes_(std::move(nodes)), edges_(std::move(edges)) {
    std::sort(nodes_.begin(), nodes_.end(),
              [](const RoadNode& a, const RoadNode& b) { return a.id < b.id; });
    for (size_t i = 1; i < nodes_.size(); ++i) {
      if (nodes_[i].id == nodes_[i - 1].id) {
        throw InputError("duplicate node id " + std::to_string(nodes_[i].id));
      }
    }
    std::sort(edges_.begin(), edges_.end(),
              [](const Edge& a, const Edge& b) { return a.id < b.id; });
    for (size_t i = 0; i < edges_.size(); ++i) {
      if (i > 0 && edges_[i].id == edges_[i - 1].id) {
        throw InputError("duplicate edge id " + std::to_string(edges_[i].id));
      }
      for (int64_t nid : edges_[i].node_ids) {
        if (!find_node(nid)) {
          throw InputError("edge " + std::to_string(edges_[i].id) +
                           " references unknown node " + std::to_string(nid));
        }
      }
    }
    build_index();
  }

  const std::vector<RoadNode>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  bool empty() const { return edges_.empty(); }

  const RoadNode* find_node(int64_t id) const {
    auto it = std::lower_bound(
        nodes_.begin(), nodes_.end(), id,
        [](const RoadNode& n, int64_t v) { return n.id < v; });
    if (it == nodes_.end() || it->id != id) return nullptr;
    return &*it;
  }

  // Box around all polylines and nodes.
  BoundingBox bounds() const {
    std::vector<Point2> pts;
    for (const RoadNode& n : nodes_) pts.push_back(n.position);
    for (const Edge& e : edges_) {
      pts.insert(pts.end(), e.polyline.begin(), e.polyline.end());
    }
    return BoundingBox::of(pts);
  }

  // Nearest edge by point-to-polyline distance, ties to the lower edge id.
  MatchResult match(Point2 p) const {
    if (edges_.empty()) throw InputError("cannot map-match on an empty graph");
    MatchResult best{0, std::numeric_limits<double>::infinity(), 0.0};
    const int cx = std::clamp(cell_coord(p.x, grid_.min_x), 0, nx_ - 1);
    const int cy = std::clamp(cell_coord(p.y, grid_.min_y), 0, ny_ - 1);
    auto visit = [&](int ix, int iy) {
      const auto& bucket = cells_[static_cast<size_t>(iy) * nx_ + ix];
      for (size_t e : bucket) {
        const EdgeProjection pr = project_onto_edge(p, edges_[e]);
        if (pr.d < best.d || (pr.d == best.d && e < best.edge)) {
          best = {e, pr.d, pr.l};
        }
      }
    };
    for (int k = 0;; ++k) {
      const int x0 = cx - k, x1 = cx + k, y0 = cy - k, y1 = cy + k;
      for (int ix = std::max(x0, 0); ix <= std::min(x1, nx_ - 1); ++ix) {
        if (y0 >= 0) visit(ix, y0);
        if (y1 < ny_ && y1 != y0) visit(ix, y1);
      }
      for (int iy = std::max(y0 + 1, 0); iy <= std::min(y1 - 1, ny_ - 1);
           ++iy) {
        if (x0 >= 0) visit(x0, iy);
        if (x1 < nx_ && x1 != x0) visit(x1, iy);
      }
      // Any edge not yet seen lies entirely in cells outside the searched
      // block, hence beyond one of the block's interior sides.
      double unseen = std::numeric_limits<double>::infinity();
      if (x0 > 0) unseen = std::min(unseen, std::max(0.0, p.x - (grid_.min_x + x0 * cell_)));
      if (x1 < nx_ - 1) unseen = std::min(unseen, std::max(0.0, grid_.min_x + (x1 + 1) * cell_ - p.x));
      if (y0 > 0) unseen = std::min(unseen, std::max(0.0, p.y - (grid_.min_y + y0 * cell_)));
      if (y1 < ny_ - 1) unseen = std::min(unseen, std::max(0.0, grid_.min_y + (y1 + 1) * cell_ - p.y));
      if (best.d < unseen || std::isinf(unseen)) break;
    }
    return best;
  }

 private:
  int cell_coord(double v, double lo) const {
    const double c = std::floor((v - lo) / cell_);
    if (c < -1e9) return -1000000000;
    if (c > 1e9) return 1000000000;
    return static_cast<int>(c);
  }

  void build_index() {
    if (edges_.empty()) return;
    std::vector<Point2> pts;
    for (const Edge& e : edges_) {
      pts.insert(pts.end(), e.polyline.begin(), e.polyline.end());
    }
    grid_ = BoundingBox::of(pts);
    const double extent = std::max({grid_.width(), grid_.height(), 1e-3});
    const double target_cells = 2.0 * static_cast<double>(edges_.size());
    const double w = std::max(grid_.width(), extent * 1e-3);
    const double h = std::max(grid_.height(), extent * 1e-3);
    cell_ = std::max(std::sqrt(w * h / target_cells), 1e-3);
    nx_ = std::max(1, static_cast<int>(std::ceil(grid_.width() / cell_)) + 1);
    ny_ = std::max(1, static_cast<int>(std::ceil(grid_.height() / cell_)) + 1);
    cells_.assign(static_cast<size_t>(nx_) * ny_, {});
    for (size_t e = 0; e < edges_.size(); ++e) {
      const Edge& edge = edges_[e];
      for (size_t k = 0; k < edge.segment_count(); ++k) {
        const Point2 a = edge.polyline[k];
        const Point2 b = edge.polyline[k + 1];
        const int ix0 = std::clamp(cell_coord(std::min(a.x, b.x), grid_.min_x), 0, nx_ - 1);
        const int ix1 = std::clamp(cell_coord(std::max(a.x, b.x), grid_.min_x), 0, nx_ - 1);
        const int iy0 = std::clamp(cell_coord(std::min(a.y, b.y), grid_.min_y), 0, ny_ - 1);
        const int iy1 = std::clamp(cell_coord(std::max(a.y, b.y), grid_.min_y), 0, ny_ - 1);
        for (int iy = iy0; iy <= iy1; ++iy) {
          for (int ix = ix0; ix <= ix1; ++ix) {
            cells_[static_cast<size_t>(iy) * nx_ + ix].push_back(e);
          }
        }
      }
    }
    for (auto& bucket : cells_) {
      std::sort(bucket.begin(), bucket.end());
      bucket.erase(std::unique(bucket.begin(), bucket.end()), bucket.end());
    }
  }

  std::vector<RoadNode> nodes_;
  std::vector<Edge> edges_;
  BoundingBox grid_{};
  double cell_ = 1.0;
  int nx_ = 1;
  int ny_ = 1;
  std::vector<std::vector<size_t>> cells_;
};

inline MatchResult map_match(Point2 p, const RoadGraph& graph) {
  return graph.match(p);
}

inline std::vector<MatchResult> map_match_all(std::span<const Point2> points,
                                              const RoadGraph& graph,
                                              int workers = 1) {
  std::vector<MatchResult> out(points.size());
  constexpr size_t kChunk = 1024;
  const size_t chunks = (points.size() + kChunk - 1) / kChunk;
  parallel_for(chunks, workers, [&](size_t c) {
    const size_t end = std::min(points.size(), (c + 1) * kChunk);
    for (size_t i = c * kChunk; i < end; ++i) out[i] = graph.match(points[i]);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Edge counts

// theta = min(-ln(2 - 2F) / eps1, 10).
inline double threshold(double eps1, double F) {
  if (!(F >= 0.5 && F < 1.0)) {
    throw InvalidParameter("threshold F must lie in [0.5, 1)");
  }
  if (!(eps1 > 0.0)) throw InvalidParameter("eps1 must be positive");
  return std::min(std::max(0.0, -std::log(2.0 - 2.0 * F) / eps1), 10.0);
}

struct EdgeCountState {
  std::vector<int64_t> true_counts;
  // n*_e = n_e + Lap(1 / eps1)
  std::vector<double> intermediate;
  // Normalized, sanitized counts before thresholding.
  std::vector<int64_t> pre_threshold;
  std::vector<int64_t> noisy;
  double theta = 0.0;
};

inline std::vector<int64_t> count_per_edge(std::span<const MatchResult> matches,
                                           size_t edge_count) {
  std::vector<int64_t> counts(edge_count, 0);
  for (const MatchResult& m : matches) ++counts[m.edge];
  return counts;
}

// n'_e = sanitize(N n*_e / N*) with N* = sum n*_e, then zeroed where
// n'_e <= theta. Falls back to sanitize(n*_e) if N* <= 0.
template <NoiseSource Noise = LaplaceNoise>
EdgeCountState noisy_edge_counts(std::span<const int64_t> true_counts,
                                 int64_t total, double eps1, double F,
                                 const StreamFactory& streams,
                                 const Noise& noise = {}) {
  EdgeCountState s;
  s.theta = threshold(eps1, F);
  s.true_counts.assign(true_counts.begin(), true_counts.end());
  const size_t n = true_counts.size();
  s.intermediate.resize(n);
  double n_star = 0.0;
  for (size_t e = 0; e < n; ++e) {
    Rng rng = streams.stream("road.edge_count", e);
    s.intermediate[e] =
        static_cast<double>(true_counts[e]) + noise.sample(1.0 / eps1, rng);
    n_star += s.intermediate[e];
  }
  s.pre_threshold.resize(n);
  s.noisy.resize(n);
  for (size_t e = 0; e < n; ++e) {
    s.pre_threshold[e] =
        n_star > 0.0
            ? sanitize_count(static_cast<double>(total) * s.intermediate[e] /
                             n_star)
            : sanitize_count(s.intermediate[e]);
    s.noisy[e] = static_cast<double>(s.pre_threshold[e]) <= s.theta
                     ? 0
                     : s.pre_threshold[e];
  }
  return s;
}

// ---------------------------------------------------------------------------
// Micro-histograms

// max(1, round(sqrt(n))).
inline int bins_for(int64_t n) {
  if (n <= 0) return 1;
  return std::max(1, static_cast<int>(std::llround(std::sqrt(static_cast<double>(n)))));
}

struct NoisyHistogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<int64_t> counts;

  int alpha() const { return static_cast<int>(counts.size()); }
  double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
  int64_t total() const {
    int64_t t = 0;
    for (int64_t c : counts) t += c;
    return t;
  }
  // Values are clipped into [lo, hi]; hi belongs to the last bin.
  int bin_of(double v) const {
    const double t = (std::clamp(v, lo, hi) - lo) / (hi - lo);
    return std::min(alpha() - 1, static_cast<int>(std::floor(t * alpha())));
  }
};

template <NoiseSource Noise = LaplaceNoise>
NoisyHistogram build_noisy_histogram(std::span<const double> values, double lo,
                                     double hi, int alpha, double eps, Rng& rng,
                                     const Noise& noise = {}) {
  if (!(hi > lo)) throw InvalidParameter("histogram needs hi > lo");
  if (alpha < 1) throw InvalidParameter("histogram needs alpha >= 1");
  if (!(eps > 0.0)) throw InvalidParameter("histogram eps must be positive");
  NoisyHistogram h{lo, hi, std::vector<int64_t>(static_cast<size_t>(alpha), 0)};
  for (double v : values) ++h.counts[static_cast<size_t>(h.bin_of(v))];
  for (int64_t& c : h.counts) c = noisy_count(c, eps, noise, rng);
  return h;
}

// Bin chosen proportionally to its noisy count, then uniform within the bin;
// uniform over [lo, hi] when every count is zero.
inline double histogram_sample(const NoisyHistogram& h, Rng& rng) {
  const int64_t total = h.total();
  if (total <= 0) return rng.uniform(h.lo, h.hi);
  int64_t r = static_cast<int64_t>(rng.index(static_cast<size_t>(total)));
  size_t b = 0;
  while (r >= h.counts[b]) {
    r -= h.counts[b];
    ++b;
  }
  const double w = h.bin_width();
  const double lo = h.lo + w * static_cast<double>(b);
  const double hi = b + 1 == h.counts.size() ? h.hi : lo + w;
  return rng.uniform(lo, hi);
}

// Estimated count in [a, b] assuming uniform mass within each bin.
inline double histogram_range_count(const NoisyHistogram& h, double a,
                                    double b) {
  if (b < a) std::swap(a, b);
  const double w = h.bin_width();
  double est = 0.0;
  for (size_t i = 0; i < h.counts.size(); ++i) {
    const double lo = h.lo + w * static_cast<double>(i);
    const double hi = lo + w;
    const double overlap = std::min(b, hi) - std::max(a, lo);
    if (overlap > 0.0) est += static_cast<double>(h.counts[i]) * overlap / w;
  }
  return est;
}

// ---------------------------------------------------------------------------
// Generation

inline constexpr int kMaxEdgeAttempts = 100;
// Public width of the single off-edge bin used when every real offset on an
// edge is zero.
inline constexpr double kDegenerateOffsetWidth = 0.5;
// Offsets at or below this count as zero; covers the ~1 mm quantization of
// coordinates stored with 8 decimal degrees.
inline constexpr double kZeroOffsetTolerance = 0.01;
// Off-edge range for edges that received points only through noise.
inline constexpr double kEmptyEdgeOffsetRange = 10.0;

struct EdgeSample {
  double l = 0.0;
  double d = 0.0;
  bool left = true;
};

struct EdgeOutput {
  std::vector<Point2> points;
  std::vector<EdgeSample> samples;
  int64_t skipped = 0;
};

inline EdgeOutput generate_edge(const Edge& edge, int64_t count,
                                const NoisyHistogram& l_hist,
                                const NoisyHistogram& d_hist,
                                const OobFilter& oob, Rng& rng) {
  EdgeOutput out;
  if (count <= 0) return out;
  out.points.reserve(static_cast<size_t>(count));
  out.samples.reserve(static_cast<size_t>(count));
  for (int64_t i = 0; i < count; ++i) {
    bool placed = false;
    for (int a = 0; a < kMaxEdgeAttempts && !placed; ++a) {
      EdgeSample s;
      s.l = std::clamp(histogram_sample(l_hist, rng), 0.0, edge.length);
      s.d = histogram_sample(d_hist, rng);
      s.left = rng.coin();
      const auto [base, normal] = edge.point_and_normal(s.l);
      const Point2 p = base + (s.left ? s.d : -s.d) * normal;
      if (oob.blocked(p)) continue;
      out.points.push_back(p);
      out.samples.push_back(s);
      placed = true;
    }
    if (!placed) ++out.skipped;
  }
  return out;
}

struct RoadOptions {
  double threshold_f = 0.9;
  double d_max = 50.0;
  int workers = 1;
};

struct RoadResult {
  std::vector<Point2> points;
  EdgeCountState counts;
  // Synthetic points actually emitted per edge.
  std::vector<int64_t> generated;
  int64_t skipped = 0;
  std::vector<std::string> warnings;
};

template <NoiseSource Noise = LaplaceNoise>
RoadResult generate_road(const RoadGraph& graph, std::span<const Point2> points,
                         const Budget& budget, const OobFilter& oob,
                         const StreamFactory& streams,
                         const RoadOptions& opts = {},
                         const Noise& noise = {}) {
  if (graph.empty()) throw InputError("Road generation needs a road graph");
  if (!(budget.eps1 > 0.0 && budget.eps2 > 0.0 && budget.eps3 > 0.0)) {
    throw InvalidParameter("Road needs eps1, eps2 and eps3 all positive");
  }
  if (!(opts.d_max > 0.0)) throw InvalidParameter("d_max must be positive");

  const size_t n_edges = graph.edges().size();
  const std::vector<MatchResult> matches =
      map_match_all(points, graph, opts.workers);
  std::vector<std::vector<double>> ls(n_edges);
  std::vector<std::vector<double>> ds(n_edges);
  for (const MatchResult& m : matches) {
    ls[m.edge].push_back(m.l);
    ds[m.edge].push_back(m.d);
  }

  RoadResult res;
  res.counts = noisy_edge_counts(count_per_edge(matches, n_edges),
                                 static_cast<int64_t>(points.size()),
                                 budget.eps1, opts.threshold_f, streams, noise);

  std::vector<EdgeOutput> outputs(n_edges);
  parallel_for(n_edges, opts.workers, [&](size_t e) {
    const int64_t target = res.counts.noisy[e];
    if (target <= 0) return;
    const Edge& edge = graph.edges()[e];
    const int alpha = bins_for(target);
    NoisyHistogram l_hist;
    NoisyHistogram d_hist;
    if (res.counts.true_counts[e] == 0) {
      l_hist = {0.0, edge.length, {1}};
      d_hist = {0.0, std::min(kEmptyEdgeOffsetRange, opts.d_max), {1}};
    } else {
      Rng l_rng = streams.stream("road.l_hist", e);
      l_hist = build_noisy_histogram(ls[e], 0.0, edge.length, alpha,
                                     budget.eps2, l_rng, noise);
      Rng d_rng = streams.stream("road.d_hist", e);
      const double max_d = *std::max_element(ds[e].begin(), ds[e].end());
      if (max_d <= kZeroOffsetTolerance) {
        d_hist = build_noisy_histogram(
            ds[e], 0.0, std::min(kDegenerateOffsetWidth, opts.d_max), 1,
            budget.eps3, d_rng, noise);
      } else {
        d_hist = build_noisy_histogram(ds[e], 0.0, opts.d_max, alpha,
                                       budget.eps3, d_rng, noise);
      }
    }
    Rng gen_rng = streams.stream("road.generate", e);
    outputs[e] = generate_edge(edge, target, l_hist, d_hist, oob, gen_rng);
  });

  res.generated.assign(n_edges, 0);
  size_t total = 0;
  for (const EdgeOutput& o : outputs) total += o.points.size();
  res.points.reserve(total);
  for (size_t e = 0; e < n_edges; ++e) {
    const EdgeOutput& o = outputs[e];
    res.points.insert(res.points.end(), o.points.begin(), o.points.end());
    res.generated[e] = static_cast<int64_t>(o.points.size());
    res.skipped += o.skipped;
    if (o.skipped > 0) {
      res.warnings.push_back("edge " + std::to_string(graph.edges()[e].id) +
                             ": skipped " + std::to_string(o.skipped) +
                             " point(s) that could not avoid out-of-bounds "
                             "areas");
    }
  }
  return res;
}

}  // namespace locsynth

#endif  // LOCSYNTH_ROADNET_HPP_
