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

// locsynth command-line interface.
//
//   locsynth generate --method Road --epsilon 1 --points p.csv --graph g.json
//   locsynth evaluate --points p.csv --synthetic out/synthetic.csv
//   locsynth sweep --axis epsilon --values 0.1,1,10 --seeds 10 ...
//   locsynth fixture --rows 40 --cols 40 --out fixture/
//
// Shared options may also come from a flat key = value file (--config);
// flags given on the command line win. Exit codes: 0 success, 2 usage,
// 3 input, 4 internal invariant violation.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "locsynth/locsynth.hpp"

namespace {

using namespace locsynth;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitInternal = 4;

struct Flags {
  std::string method = "UGrid-Uni";
  std::vector<double> eps_split;
  std::vector<double> bounds;
};

// Splits "a,b,c" into doubles; CLI11's delimiter handles the rest.
void add_list(CLI::App& app, const std::string& name, std::vector<double>& v,
              const std::string& help, size_t expected) {
  app.add_option(name, v, help)
      ->delimiter(',')
      ->expected(static_cast<int>(expected));
}

RunConfig make_config(const RunConfig& base, const Flags& flags) {
  RunConfig c = base;
  c.method = parse_method(flags.method);
  if (!flags.eps_split.empty()) {
    c.eps_split = {flags.eps_split[0], flags.eps_split[1], flags.eps_split[2]};
  }
  if (!flags.bounds.empty()) {
    c.bounds = {flags.bounds[0], flags.bounds[1], flags.bounds[2],
                flags.bounds[3]};
  }
  return c;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "locsynth: warning: " << w << "\n";
}

int cmd_generate(const RunConfig& config) {
  if (!config.bounds) {
    std::cerr << "locsynth: warning: no --bounds given; using the data "
                 "extent, which is not differentially private\n";
  }
  const RunArtifacts art = run(config);
  if (art.excluded > 0) {
    std::cerr << "locsynth: excluded " << art.excluded
              << " real point(s) inside out-of-bounds polygons\n";
  }
  print_warnings(art.outcome.warnings);
  std::cout << "wrote " << art.outcome.points.size() << " points to "
            << art.synthetic_path << "\n";
  if (art.report) std::cout << "wrote " << art.report_path << "\n";
  std::cout << "wrote " << art.manifest_path << "\n";
  return kExitOk;
}

int cmd_evaluate(const RunConfig& config, const std::string& synthetic) {
  const Dataset ds = load_dataset(config);
  std::vector<Point2> synth;
  for (const LonLat& ll : read_points_csv(synthetic)) {
    synth.push_back(ds.projection.project(ll));
  }
  EvalOptions opts = config.eval;
  opts.workers = config.workers;
  const MetricReport rep = evaluate_dataset(ds, synth, config.seed, opts);
  std::filesystem::create_directories(config.out_dir);
  const std::string path =
      (std::filesystem::path(config.out_dir) / "report.json").string();
  write_text(path, report_to_json(rep, false).dump(2) + "\n");
  std::cout << "wrote " << path << "\n";
  return kExitOk;
}

int cmd_sweep(const RunConfig& config, const std::string& axis_name,
              const std::vector<double>& values, int seeds) {
  const SweepAxis axis = parse_axis(axis_name);
  const Dataset ds = load_dataset(config);
  const std::vector<SweepRow> rows = sweep(ds, config, axis, values, seeds);
  std::filesystem::create_directories(config.out_dir);
  const std::string path =
      (std::filesystem::path(config.out_dir) / ("sweep_" + axis_name + ".csv"))
          .string();
  write_text(path, sweep_to_csv(axis, rows));
  std::cout << "wrote " << rows.size() << " rows to " << path << "\n";
  return kExitOk;
}

int cmd_fixture(const CitySpec& spec, const std::string& profile,
                const std::vector<double>& origin, const std::string& out_dir) {
  CitySpec s = spec;
  if (profile == "uniform") {
    s.along_edge_profile = AlongEdgeProfile::kUniform;
  } else if (profile == "clustered") {
    s.along_edge_profile = AlongEdgeProfile::kClustered;
  } else {
    throw InvalidParameter("--profile must be uniform or clustered");
  }
  const City city = generate_city(s);
  const Projection proj({origin[0], origin[1]});
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  write_points_csv((dir / "points.csv").string(), city.points, proj);
  write_text((dir / "graph.json").string(),
             graph_to_json(city.graph, proj).dump() + "\n");
  const LonLat lo = proj.unproject({city.bounds.min_x, city.bounds.min_y});
  const LonLat hi = proj.unproject({city.bounds.max_x, city.bounds.max_y});
  // Ready-made config so `locsynth generate --config <dir>/fixture.toml` works.
  std::string toml = "points = \"" + (dir / "points.csv").string() + "\"\n";
  toml += "graph = \"" + (dir / "graph.json").string() + "\"\n";
  toml += "bounds = [" + format_degrees(lo.lon) + ", " + format_degrees(lo.lat) +
          ", " + format_degrees(hi.lon) + ", " + format_degrees(hi.lat) + "]\n";
  write_text((dir / "fixture.toml").string(), toml);
  std::cout << "wrote " << city.points.size() << " points, "
            << city.graph.edges().size() << " edges to " << dir.string()
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private synthetic location data"};
  app.set_config("--config", "", "flat key = value file with option defaults");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig base;
  Flags flags;
  app.add_option("--method", flags.method,
                 "UGrid-Uni|UGrid-WUD|UGrid-KDE|AGrid-Uni|AGrid-WUD|AGrid-KDE|"
                 "Clust-Uni|Clust-WUD|Clust-KDE|Road")
      ->capture_default_str();
  app.add_option("--epsilon", base.epsilon, "total privacy budget")
      ->capture_default_str();
  add_list(app, "--eps-split", flags.eps_split, "explicit eps1,eps2,eps3", 3);
  app.add_option("--seed", base.seed, "master seed")->capture_default_str();
  app.add_option("--points", base.points_path, "real points CSV (lon,lat)");
  app.add_option("--graph", base.graph_path, "road graph JSON");
  app.add_option("--oob", base.oob_path, "out-of-bounds polygons JSON");
  app.add_option("--out", base.out_dir, "output directory")->capture_default_str();
  app.add_option("--k", base.k, "clusters for Clust-*")->capture_default_str();
  app.add_option("--lambda", base.lambda, "KDE draws per real point")
      ->capture_default_str();
  app.add_option("--omega", base.omega, "WUD area weight")->capture_default_str();
  app.add_option("--threshold-f", base.threshold_f, "edge threshold quantile")
      ->capture_default_str();
  app.add_option("--d-max", base.d_max, "off-edge histogram range (m)")
      ->capture_default_str();
  app.add_option("--workers", base.workers, "worker threads")
      ->capture_default_str();
  add_list(app, "--bounds", flags.bounds,
           "public extent min_lon,min_lat,max_lon,max_lat", 4);
  app.add_flag("--evaluate", base.evaluate, "also write report.json");

  CLI::App* gen = app.add_subcommand("generate", "synthesize a point set");

  std::string synthetic;
  CLI::App* ev = app.add_subcommand("evaluate", "score a synthetic point set");
  ev->add_option("--synthetic", synthetic, "synthetic points CSV")->required();

  std::string axis;
  std::vector<double> values;
  int seeds = 10;
  CLI::App* sw = app.add_subcommand("sweep", "vary one parameter");
  sw->add_option("--axis", axis, "epsilon|radius|granularity")->required();
  sw->add_option("--values", values, "comma-separated values")
      ->delimiter(',')
      ->required();
  sw->add_option("--seeds", seeds, "seeds per value")->capture_default_str();

  CitySpec city;
  std::string profile = "uniform";
  std::vector<double> origin = {0.0, 0.0};
  CLI::App* fx = app.add_subcommand("fixture", "emit a synthetic test city");
  fx->add_option("--rows", city.rows)->capture_default_str();
  fx->add_option("--cols", city.cols)->capture_default_str();
  fx->add_option("--spacing", city.spacing)->capture_default_str();
  fx->add_option("--points-per-edge", city.points_per_edge)->capture_default_str();
  fx->add_option("--offset-sigma", city.offset_sigma)->capture_default_str();
  fx->add_option("--profile", profile, "uniform|clustered")->capture_default_str();
  fx->add_option("--city-seed", city.seed)->capture_default_str();
  fx->add_option("--origin", origin, "lon,lat of the grid origin")
      ->delimiter(',')
      ->expected(2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (fx->parsed()) return cmd_fixture(city, profile, origin, base.out_dir);
    const RunConfig config = make_config(base, flags);
    config.validate();
    if (gen->parsed()) return cmd_generate(config);
    if (ev->parsed()) return cmd_evaluate(config, synthetic);
    if (sw->parsed()) return cmd_sweep(config, axis, values, seeds);
  } catch (const InvalidParameter& e) {
    std::cerr << "locsynth: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InputError& e) {
    std::cerr << "locsynth: input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const UnsupportedShape& e) {
    std::cerr << "locsynth: input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const UndefinedMetric& e) {
    std::cerr << "locsynth: input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "locsynth: input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InvariantViolation& e) {
    std::cerr << "locsynth: internal invariant violated: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "locsynth: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
