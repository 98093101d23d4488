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

// Deterministic synthetic cities and point clouds used as ground truth by
// the tests, the acceptance suite and the `fixture` CLI command.

#ifndef LOCSYNTH_TESTBED_HPP_
#define LOCSYNTH_TESTBED_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "locsynth/error.hpp"
#include "locsynth/geometry.hpp"
#include "locsynth/random.hpp"
#include "locsynth/roadnet.hpp"

namespace locsynth {

enum class AlongEdgeProfile { kUniform, kClustered };

struct CitySpec {
  int rows = 10;
  int cols = 10;
  double spacing = 100.0;
  double points_per_edge = 20.0;
  // Half-normal perpendicular jitter; 0 puts every point on its edge.
  double offset_sigma = 0.0;
  AlongEdgeProfile along_edge_profile = AlongEdgeProfile::kUniform;
  uint64_t seed = 1;
};

struct City {
  RoadGraph graph;
  std::vector<Point2> points;
  // Node box padded by max(spacing / 2, 6 sigma); contains every point.
  BoundingBox bounds;
};

// Manhattan grid: node (ix, iy) has id iy * cols + ix and sits at
// (ix * spacing, iy * spacing). Horizontal edges come first, then vertical.
inline City generate_city(const CitySpec& spec) {
  if (spec.rows < 2 || spec.cols < 2) {
    throw InvalidParameter("city needs at least 2 rows and 2 columns");
  }
  if (!(spec.spacing > 0.0)) throw InvalidParameter("spacing must be positive");
  if (spec.offset_sigma < 0.0) {
    throw InvalidParameter("offset_sigma must be nonnegative");
  }
  std::vector<RoadNode> nodes;
  for (int iy = 0; iy < spec.rows; ++iy) {
    for (int ix = 0; ix < spec.cols; ++ix) {
      nodes.push_back({static_cast<int64_t>(iy) * spec.cols + ix,
                       {ix * spec.spacing, iy * spec.spacing}});
    }
  }
  auto node_id = [&](int ix, int iy) {
    return static_cast<int64_t>(iy) * spec.cols + ix;
  };
  std::vector<Edge> edges;
  int64_t next_id = 0;
  for (int iy = 0; iy < spec.rows; ++iy) {
    for (int ix = 0; ix + 1 < spec.cols; ++ix) {
      edges.push_back(Edge::make(
          next_id++, {node_id(ix, iy), node_id(ix + 1, iy)},
          {{ix * spec.spacing, iy * spec.spacing},
           {(ix + 1) * spec.spacing, iy * spec.spacing}}));
    }
  }
  for (int ix = 0; ix < spec.cols; ++ix) {
    for (int iy = 0; iy + 1 < spec.rows; ++iy) {
      edges.push_back(Edge::make(
          next_id++, {node_id(ix, iy), node_id(ix, iy + 1)},
          {{ix * spec.spacing, iy * spec.spacing},
           {ix * spec.spacing, (iy + 1) * spec.spacing}}));
    }
  }

  const double max_offset = 6.0 * spec.offset_sigma;
  City city;
  Rng rng(spec.seed);
  for (const Edge& e : edges) {
    const int64_t n = rng.poisson(spec.points_per_edge);
    for (int64_t i = 0; i < n; ++i) {
      double l;
      if (spec.along_edge_profile == AlongEdgeProfile::kUniform) {
        l = rng.uniform() * e.length;
      } else {
        const double center = rng.coin() ? 0.25 : 0.75;
        l = std::clamp((center + 0.08 * rng.normal()) * e.length, 0.0,
                       e.length);
      }
      const double d =
          std::min(std::abs(rng.normal()) * spec.offset_sigma, max_offset);
      const bool left = rng.coin();
      const auto [base, normal] = e.point_and_normal(l);
      city.points.push_back(base + (left ? d : -d) * normal);
    }
  }
  city.graph = RoadGraph(std::move(nodes), std::move(edges));
  city.bounds = BoundingBox{0.0, 0.0, (spec.cols - 1) * spec.spacing,
                            (spec.rows - 1) * spec.spacing}
                    .expanded(std::max(0.5 * spec.spacing, max_offset));
  return city;
}

struct Blobs {
  std::vector<Point2> centers;
  std::vector<Point2> points;
};

// K isotropic Gaussian blobs with centers uniform in the middle 80% of the
// bounds; points are clamped into the bounds.
inline Blobs generate_blobs(int k, int64_t points_per_blob, double sigma,
                            const BoundingBox& bounds, uint64_t seed) {
  if (k < 1) throw InvalidParameter("need at least one blob");
  if (sigma < 0.0) throw InvalidParameter("sigma must be nonnegative");
  Rng rng(seed);
  Blobs out;
  const double mx = 0.1 * bounds.width();
  const double my = 0.1 * bounds.height();
  for (int b = 0; b < k; ++b) {
    out.centers.push_back({rng.uniform(bounds.min_x + mx, bounds.max_x - mx),
                           rng.uniform(bounds.min_y + my, bounds.max_y - my)});
  }
  for (int b = 0; b < k; ++b) {
    for (int64_t i = 0; i < points_per_blob; ++i) {
      const double dx = sigma * rng.normal();
      const double dy = sigma * rng.normal();
      out.points.push_back(
          {std::clamp(out.centers[b].x + dx, bounds.min_x, bounds.max_x),
           std::clamp(out.centers[b].y + dy, bounds.min_y, bounds.max_y)});
    }
  }
  return out;
}

}  // namespace locsynth

#endif  // LOCSYNTH_TESTBED_HPP_
