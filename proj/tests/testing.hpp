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


// Shared helpers for the test binaries: a zero-noise hook, brute-force
// oracles and a chi-square p-value.

#ifndef LOCSYNTH_TESTS_TESTING_HPP_
#define LOCSYNTH_TESTS_TESTING_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "locsynth/locsynth.hpp"

namespace locsynth::testing {

// Noise hook that adds nothing; turns every noised count into the exact
// count so results can be compared with brute-force oracles.
struct ZeroNoise {
  double sample(double, Rng&) const { return 0.0; }
};
static_assert(NoiseSource<ZeroNoise>);

// Analytic Laplace(0, b) CDF.
inline double laplace_cdf(double x, double b) {
  return x < 0.0 ? 0.5 * std::exp(x / b) : 1.0 - 0.5 * std::exp(-x / b);
}

// Upper-tail p-value of Pearson's statistic for observed vs expected counts.
inline double chi_square_p(std::span<const double> observed,
                           std::span<const double> expected) {
  double stat = 0.0;
  for (size_t i = 0; i < observed.size(); ++i) {
    const double d = observed[i] - expected[i];
    stat += d * d / expected[i];
  }
  const boost::math::chi_squared dist(static_cast<double>(observed.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

// Chi-square p-value of uniformity over a cols x rows occupancy grid.
inline double grid_uniformity_p(std::span<const Point2> pts,
                                const BoundingBox& box, int cols, int rows) {
  std::vector<double> obs(static_cast<size_t>(cols * rows), 0.0);
  for (const Point2& p : pts) {
    const int c = std::clamp(
        static_cast<int>((p.x - box.min_x) / box.width() * cols), 0, cols - 1);
    const int r = std::clamp(
        static_cast<int>((p.y - box.min_y) / box.height() * rows), 0, rows - 1);
    obs[static_cast<size_t>(r * cols + c)] += 1.0;
  }
  std::vector<double> exp(obs.size(),
                          static_cast<double>(pts.size()) / obs.size());
  return chi_square_p(obs, exp);
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline std::vector<Point2> uniform_points(size_t n, const BoundingBox& box,
                                          uint64_t seed) {
  Rng rng(seed);
  std::vector<Point2> out(n);
  for (Point2& p : out) {
    p = {rng.uniform(box.min_x, box.max_x), rng.uniform(box.min_y, box.max_y)};
  }
  return out;
}

// Index of the first grid cell whose closed-open box holds p, scanning all
// cells (last row/column closed).
inline size_t brute_force_cell(Point2 p, const UniformGrid& grid) {
  for (size_t c = 0; c < grid.cell_count(); ++c) {
    const BoundingBox b = grid.cell_box(c);
    const int col = static_cast<int>(c % static_cast<size_t>(grid.cols()));
    const int row = static_cast<int>(c / static_cast<size_t>(grid.cols()));
    const bool in_x = p.x >= b.min_x &&
                      (p.x < b.max_x || (col == grid.cols() - 1 && p.x <= b.max_x));
    const bool in_y = p.y >= b.min_y &&
                      (p.y < b.max_y || (row == grid.rows() - 1 && p.y <= b.max_y));
    if (in_x && in_y) return c;
  }
  return std::numeric_limits<size_t>::max();
}

// Nearest edge by scanning every segment of every edge; ties to the lower
// edge index, then the earlier segment.
inline MatchResult brute_force_match(Point2 p, const RoadGraph& graph) {
  MatchResult best;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t e = 0; e < graph.edges().size(); ++e) {
    const Edge& edge = graph.edges()[e];
    for (size_t k = 0; k + 1 < edge.polyline.size(); ++k) {
      const Point2 a = edge.polyline[k];
      const Point2 b = edge.polyline[k + 1];
      const double len2 = squared_distance(a, b);
      double t = len2 > 0.0 ? dot(p - a, b - a) / len2 : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      const double d = distance(p, a + t * (b - a));
      if (d < best_d) {
        best_d = d;
        best.edge = e;
        best.d = d;
        best.l = edge.cumulative[k] + t * distance(a, b);
      }
    }
  }
  return best;
}

}  // namespace locsynth::testing

#endif  // LOCSYNTH_TESTS_TESTING_HPP_
