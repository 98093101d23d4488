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

// End-to-end orchestration: load inputs, resolve the budget, partition (or
// map-match for Road), generate, optionally evaluate, write artifacts.
//
// All randomness derives from RunConfig::seed through per-stage streams, so
// a run is reproducible byte for byte regardless of RunConfig::workers.

#ifndef LOCSYNTH_PIPELINE_HPP_
#define LOCSYNTH_PIPELINE_HPP_

#include <array>
#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "locsynth/dp.hpp"
#include "locsynth/error.hpp"
#include "locsynth/evaluation.hpp"
#include "locsynth/geometry.hpp"
#include "locsynth/io.hpp"
#include "locsynth/partition.hpp"
#include "locsynth/random.hpp"
#include "locsynth/region_gen.hpp"
#include "locsynth/roadnet.hpp"

namespace locsynth {

inline constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  Method method = Method::kUGridUni;
  double epsilon = 1.0;
  std::optional<std::array<double, 3>> eps_split;
  int64_t k = 1000;
  int lambda = 2;
  double omega = 0.5;
  double threshold_f = 0.9;
  double d_max = 50.0;
  uint64_t seed = 0;
  int workers = 1;
  std::string points_path;
  std::string graph_path;
  std::string oob_path;
  std::string out_dir = ".";
  // min_lon, min_lat, max_lon, max_lat. Defaults to the box around the
  // graph and the real points.
  std::optional<std::array<double, 4>> bounds;
  bool evaluate = false;
  EvalOptions eval;

  void validate() const {
    if (!(epsilon > 0.0)) throw InvalidParameter("--epsilon must be positive");
    resolve_budget(method, epsilon, eps_split);
    if (k < 1) throw InvalidParameter("--k must be at least 1");
    if (lambda < 1) throw InvalidParameter("--lambda must be at least 1");
    if (!(omega >= 0.0 && omega <= 1.0)) {
      throw InvalidParameter("--omega must lie in [0, 1]");
    }
    if (!(threshold_f >= 0.5 && threshold_f < 1.0)) {
      throw InvalidParameter("--threshold-f must lie in [0.5, 1)");
    }
    if (!(d_max > 0.0)) throw InvalidParameter("--d-max must be positive");
    if (workers < 1) throw InvalidParameter("--workers must be at least 1");
    if (bounds && !((*bounds)[2] > (*bounds)[0] && (*bounds)[3] > (*bounds)[1])) {
      throw InvalidParameter("--bounds must be min_lon,min_lat,max_lon,max_lat");
    }
  }
};

// Projected inputs for one run.
struct Dataset {
  Projection projection{LonLat{0.0, 0.0}};
  BoundingBox bounds;
  std::vector<Point2> points;
  std::optional<RoadGraph> graph;
  OobFilter oob;
  // Real points dropped because they fall in an oob polygon.
  int64_t excluded = 0;
};

// Projects points, dropping those inside oob polygons.
inline std::vector<Point2> load_points(std::span<const LonLat> raw,
                                       const Projection& projection,
                                       const OobFilter& oob,
                                       int64_t* excluded) {
  std::vector<Point2> out;
  out.reserve(raw.size());
  int64_t dropped = 0;
  for (const LonLat& ll : raw) {
    const Point2 p = projection.project(ll);
    if (oob.blocked(p)) {
      ++dropped;
    } else {
      out.push_back(p);
    }
  }
  if (excluded != nullptr) *excluded = dropped;
  return out;
}

// Reads the inputs named in `config`. The projection origin is the center of
// the lon/lat bounds.
inline Dataset load_dataset(const RunConfig& config) {
  if (config.points_path.empty()) throw InvalidParameter("--points is required");
  const std::vector<LonLat> raw_points = read_points_csv(config.points_path);
  std::optional<RawGraph> raw_graph;
  if (!config.graph_path.empty()) raw_graph = read_graph_json(config.graph_path);
  std::vector<std::vector<LonLat>> rings;
  if (!config.oob_path.empty()) rings = read_oob_json(config.oob_path);

  std::array<double, 4> box;
  if (config.bounds) {
    box = *config.bounds;
  } else {
    std::vector<LonLat> all(raw_points);
    if (raw_graph) {
      const auto g = raw_graph->all_positions();
      all.insert(all.end(), g.begin(), g.end());
    }
    if (all.empty()) throw InputError("no points or graph to derive bounds from");
    box = {all[0].lon, all[0].lat, all[0].lon, all[0].lat};
    for (const LonLat& ll : all) {
      box[0] = std::min(box[0], ll.lon);
      box[1] = std::min(box[1], ll.lat);
      box[2] = std::max(box[2], ll.lon);
      box[3] = std::max(box[3], ll.lat);
    }
  }
  Dataset ds;
  ds.projection = Projection({0.5 * (box[0] + box[2]), 0.5 * (box[1] + box[3])});
  const Point2 lo = ds.projection.project({box[0], box[1]});
  const Point2 hi = ds.projection.project({box[2], box[3]});
  ds.bounds = {lo.x, lo.y, hi.x, hi.y};
  if (!ds.bounds.valid()) {
    // Degenerate extents (e.g. a single point) get a 1 m pad.
    ds.bounds = ds.bounds.expanded(1.0);
  }
  ds.oob = OobFilter(project_rings(rings, ds.projection));
  ds.points = load_points(raw_points, ds.projection, ds.oob, &ds.excluded);
  if (raw_graph) ds.graph = project_graph(*raw_graph, ds.projection);
  return ds;
}

struct GenerateOutcome {
  std::vector<Point2> points;
  Budget budget;
  size_t regions = 0;
  int64_t skipped = 0;
  int max_counter = 0;
  std::vector<std::string> warnings;
};

// Runs one method on an in-memory dataset.
template <NoiseSource Noise = LaplaceNoise>
GenerateOutcome synthesize(const Dataset& ds, const RunConfig& config,
                           const Noise& noise = {}) {
  config.validate();
  const Budget budget =
      resolve_budget(config.method, config.epsilon, config.eps_split);
  const StreamFactory streams(config.seed);
  GenerateOutcome out;
  out.budget = budget;

  if (config.method == Method::kRoad) {
    if (!ds.graph) throw InvalidParameter("method Road requires --graph");
    RoadOptions opts{config.threshold_f, config.d_max, config.workers};
    RoadResult res = generate_road(*ds.graph, ds.points, budget, ds.oob,
                                   streams, opts, noise);
    out.points = std::move(res.points);
    out.regions = ds.graph->edges().size();
    out.skipped = res.skipped;
    out.warnings = std::move(res.warnings);
    return out;
  }

  RegionSet set;
  switch (partition_of(config.method)) {
    case PartitionKind::kUniformGrid:
      set = build_ugrid(ds.points, ds.bounds, budget.eps1, streams, noise);
      break;
    case PartitionKind::kAdaptiveGrid:
      set = build_agrid(ds.points, ds.bounds, budget.eps1, budget.eps2,
                        streams, noise);
      break;
    case PartitionKind::kCluster:
      set = build_cluster(ds.points, ds.bounds, config.k, budget.eps1,
                          budget.eps2, streams, noise);
      break;
    case PartitionKind::kNone:
      break;
  }
  GenOptions gen{config.omega, config.lambda, config.workers};
  GenerationResult res = generate_regions(set, generator_of(config.method),
                                          budget, ds.oob, ds.points, streams,
                                          gen);
  out.points = std::move(res.points);
  out.regions = set.regions.size();
  out.skipped = res.skipped;
  out.max_counter = res.max_counter;
  out.warnings = std::move(res.warnings);
  return out;
}

inline MetricReport evaluate_dataset(const Dataset& ds,
                                     std::span<const Point2> synth,
                                     uint64_t seed, const EvalOptions& opts) {
  return evaluate(ds.points, synth, ds.graph ? &*ds.graph : nullptr, ds.bounds,
                  StreamFactory(seed), opts);
}

struct RunArtifacts {
  std::string synthetic_path;
  std::string report_path;
  std::string manifest_path;
  GenerateOutcome outcome;
  std::optional<MetricReport> report;
  // Real points dropped inside oob polygons. Reported to the caller only;
  // never written to disk, like every other true count.
  int64_t excluded = 0;
};

inline Json config_to_json(const RunConfig& c) {
  Json j;
  j["method"] = to_string(c.method);
  j["epsilon"] = c.epsilon;
  j["eps_split"] = c.eps_split ? Json(*c.eps_split) : Json(nullptr);
  j["k"] = c.k;
  j["lambda"] = c.lambda;
  j["omega"] = c.omega;
  j["threshold_f"] = c.threshold_f;
  j["d_max"] = c.d_max;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["points"] = c.points_path;
  j["graph"] = c.graph_path;
  j["oob"] = c.oob_path;
  j["bounds"] = c.bounds ? Json(*c.bounds) : Json(nullptr);
  j["evaluate"] = c.evaluate;
  return j;
}

namespace internal {

// Runs `f`, prefixing any library error with the stage name. The exception
// type is preserved so callers can still map it to an exit code.
template <typename F>
auto in_stage(const char* stage, F&& f) -> decltype(f()) {
  auto tag = [stage](const std::exception& e) {
    return std::string(stage) + ": " + e.what();
  };
  try {
    return f();
  } catch (const InvalidParameter& e) {
    throw InvalidParameter(tag(e));
  } catch (const InputError& e) {
    throw InputError(tag(e));
  } catch (const UnsupportedShape& e) {
    throw UnsupportedShape(tag(e));
  } catch (const UndefinedMetric& e) {
    throw UndefinedMetric(tag(e));
  } catch (const InvariantViolation& e) {
    throw InvariantViolation(tag(e));
  }
}

}  // namespace internal

inline RunArtifacts run(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  internal::in_stage("config", [&] { config.validate(); });
  const Dataset ds = internal::in_stage("load", [&] { return load_dataset(config); });

  RunArtifacts art;
  art.excluded = ds.excluded;
  art.outcome = internal::in_stage("generate", [&] { return synthesize(ds, config); });
  const auto generated = std::chrono::steady_clock::now();

  std::filesystem::create_directories(config.out_dir);
  const std::filesystem::path dir(config.out_dir);
  art.synthetic_path = (dir / "synthetic.csv").string();
  write_points_csv(art.synthetic_path, art.outcome.points, ds.projection);

  if (config.evaluate) {
    EvalOptions opts = config.eval;
    opts.workers = config.workers;
    art.report = internal::in_stage("evaluate", [&] {
      return evaluate_dataset(ds, art.outcome.points, config.seed, opts);
    });
    art.report->runtime_seconds =
        std::chrono::duration<double>(generated - start).count();
    art.report_path = (dir / "report.json").string();
    write_text(art.report_path, report_to_json(*art.report, false).dump(2) + "\n");
  }

  Json manifest;
  manifest["version"] = kVersion;
  manifest["config"] = config_to_json(config);
  manifest["budget"] = {{"epsilon", art.outcome.budget.epsilon_total},
                        {"eps1", art.outcome.budget.eps1},
                        {"eps2", art.outcome.budget.eps2},
                        {"eps3", art.outcome.budget.eps3}};
  manifest["projection_origin"] = {ds.projection.origin().lon,
                                   ds.projection.origin().lat};
  manifest["synthetic_points"] = art.outcome.points.size();
  manifest["skipped_points"] = art.outcome.skipped;
  manifest["units"] = art.outcome.regions;
  manifest["warnings"] = art.outcome.warnings;
  manifest["generation_seconds"] =
      std::chrono::duration<double>(generated - start).count();
  manifest["wall_seconds"] = std::chrono::duration<double>(
                                 std::chrono::steady_clock::now() - start)
                                 .count();
  art.manifest_path = (dir / "manifest.json").string();
  write_text(art.manifest_path, manifest.dump(2) + "\n");
  return art;
}

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepAxis { kEpsilon, kRadius, kGranularity };

inline SweepAxis parse_axis(std::string_view s) {
  if (s == "epsilon") return SweepAxis::kEpsilon;
  if (s == "radius") return SweepAxis::kRadius;
  if (s == "granularity") return SweepAxis::kGranularity;
  throw InvalidParameter("unknown sweep axis '" + std::string(s) + "'");
}

struct SweepRow {
  double value = 0.0;
  double metric = 0.0;
  uint64_t seed = 0;
};

// One row per (value, seed). The epsilon axis reruns generation for every
// cell and reports NCE; the radius and granularity axes generate once per
// seed and report range MAE and hotspot SDC respectively.
inline std::vector<SweepRow> sweep(const Dataset& ds, const RunConfig& config,
                                   SweepAxis axis,
                                   std::span<const double> values,
                                   int seeds) {
  if (values.empty()) throw InvalidParameter("sweep needs at least one value");
  if (seeds < 1) throw InvalidParameter("sweep needs at least one seed");
  const StreamFactory master(config.seed);
  std::vector<SweepRow> rows;
  if (axis == SweepAxis::kEpsilon) {
    for (size_t v = 0; v < values.size(); ++v) {
      for (int s = 0; s < seeds; ++s) {
        RunConfig c = config;
        c.epsilon = values[v];
        c.eps_split.reset();
        c.seed = master.seed_for("sweep", v * static_cast<size_t>(seeds) +
                                              static_cast<size_t>(s));
        const GenerateOutcome g = synthesize(ds, c);
        rows.push_back({values[v], nce(ds.points, g.points, ds.bounds,
                                       config.eval.cell_size),
                        c.seed});
      }
    }
    return rows;
  }
  std::vector<std::vector<SweepRow>> per_value(values.size());
  for (int s = 0; s < seeds; ++s) {
    RunConfig c = config;
    c.seed = master.seed_for("sweep", static_cast<size_t>(s));
    const GenerateOutcome g = synthesize(ds, c);
    std::vector<Point2> locations;
    if (axis == SweepAxis::kRadius) {
      Rng rng = StreamFactory(c.seed).stream("eval.locations");
      locations = sample_locations(ds.graph ? &*ds.graph : nullptr, ds.bounds,
                                   config.eval.locations, rng);
    }
    for (size_t v = 0; v < values.size(); ++v) {
      double m;
      if (axis == SweepAxis::kRadius) {
        m = range_mae(ds.points, g.points, locations, values[v]);
      } else {
        const double g_cells = values[v];
        if (g_cells < 2.0 || g_cells != std::floor(g_cells)) {
          throw InvalidParameter("granularity values must be integers >= 2");
        }
        m = hotspot_sdc(ds.points, g.points, ds.bounds,
                        static_cast<int>(g_cells), config.eval.sigma_cells);
      }
      per_value[v].push_back({values[v], m, c.seed});
    }
  }
  for (auto& rs : per_value) rows.insert(rows.end(), rs.begin(), rs.end());
  return rows;
}

inline std::string sweep_to_csv(SweepAxis axis, std::span<const SweepRow> rows) {
  std::string header;
  switch (axis) {
    case SweepAxis::kEpsilon: header = "epsilon,nce,seed\n"; break;
    case SweepAxis::kRadius: header = "radius,range_mae,seed\n"; break;
    case SweepAxis::kGranularity: header = "granularity,hotspot_sdc,seed\n"; break;
  }
  std::string out = header;
  char buf[128];
  for (const SweepRow& r : rows) {
    const int n = std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%llu\n", r.value,
                                r.metric,
                                static_cast<unsigned long long>(r.seed));
    out.append(buf, static_cast<size_t>(n));
  }
  return out;
}

}  // namespace locsynth

#endif  // LOCSYNTH_PIPELINE_HPP_
