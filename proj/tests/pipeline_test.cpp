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


#include "locsynth/pipeline.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "locsynth/testbed.hpp"
#include "testing.hpp"

namespace locsynth {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() /
            (std::string("locsynth_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

// Writes a small city as points.csv / graph.json and returns a config
// pointing at it with explicit public bounds.
RunConfig WriteCity(const TempDir& dir, double offset_sigma, Method method) {
  CitySpec spec;
  spec.rows = 8;
  spec.cols = 8;
  spec.offset_sigma = offset_sigma;
  const City city = generate_city(spec);
  const Projection proj({-73.98, 40.75});
  write_points_csv(dir / "points.csv", city.points, proj);
  write_text(dir / "graph.json", graph_to_json(city.graph, proj).dump());
  const LonLat lo = proj.unproject({city.bounds.min_x, city.bounds.min_y});
  const LonLat hi = proj.unproject({city.bounds.max_x, city.bounds.max_y});
  RunConfig c;
  c.method = method;
  c.points_path = dir / "points.csv";
  c.graph_path = dir / "graph.json";
  c.bounds = std::array<double, 4>{lo.lon, lo.lat, hi.lon, hi.lat};
  c.k = 20;
  c.seed = 42;
  c.eval.radii = {100.0, 250.0};
  c.eval.granularities = {16, 32};
  c.eval.facilities = 5;
  c.eval.locations = 30;
  return c;
}

std::string Slurp(const std::string& path) { return internal::read_file(path); }

TEST(CsvTest, ParsesRows) {
  const auto pts = parse_points_csv("lon,lat\n1.5,2\r\n-3,+4.25\n\n", "t.csv");
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_DOUBLE_EQ(pts[1].lon, -3.0);
  EXPECT_DOUBLE_EQ(pts[1].lat, 4.25);
}

TEST(CsvTest, MalformedLineIsNamed) {
  try {
    parse_points_csv("lon,lat\n1,2\n3;4\n", "t.csv");
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("t.csv:3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_points_csv("lon,lat\n1,2,3\n", "t.csv"), InputError);
  EXPECT_THROW(parse_points_csv("lon,lat\n1,nan\n", "t.csv"), InputError);
  EXPECT_THROW(parse_points_csv("x,y\n1,2\n", "t.csv"), InputError);
  EXPECT_THROW(parse_points_csv("", "t.csv"), InputError);
  EXPECT_TRUE(parse_points_csv("lon,lat\n", "t.csv").empty());
}

TEST(CsvTest, RoundTrip) {
  TempDir dir;
  const Projection proj({10.0, 50.0});
  const std::vector<Point2> pts{{0.0, 0.0}, {123.456, -789.0}};
  write_points_csv(dir / "p.csv", pts, proj);
  const auto back = read_points_csv(dir / "p.csv");
  ASSERT_EQ(back.size(), 2u);
  const Point2 q = proj.project(back[1]);
  EXPECT_NEAR(q.x, 123.456, 1e-3);
  EXPECT_NEAR(q.y, -789.0, 1e-3);
}

TEST(LoadTest, OobPointsAreExcluded) {
  TempDir dir;
  write_text(dir / "p.csv", "lon,lat\n0.0,0.0\n0.01,0.01\n0.02,0.02\n");
  write_text(dir / "oob.json", "[[[0.005,0.005],[0.015,0.005],[0.015,0.015],[0.005,0.015]]]");
  RunConfig c;
  c.points_path = dir / "p.csv";
  c.oob_path = dir / "oob.json";
  const Dataset ds = load_dataset(c);
  EXPECT_EQ(ds.excluded, 1);
  EXPECT_EQ(ds.points.size(), 2u);
  write_text(dir / "bad.json", "[[[0,0],[1,1]]]");
  c.oob_path = dir / "bad.json";
  EXPECT_THROW(load_dataset(c), InputError);
}

TEST(LoadTest, GraphErrorsAreInputErrors) {
  TempDir dir;
  write_text(dir / "p.csv", "lon,lat\n0,0\n");
  write_text(dir / "g.json", R"({"nodes":[{"id":1,"lon":0,"lat":0}],"edges":[{"id":1,"node_ids":[1,2]}]})");
  RunConfig c;
  c.points_path = dir / "p.csv";
  c.graph_path = dir / "g.json";
  EXPECT_THROW(load_dataset(c), InputError);
  write_text(dir / "g.json", "{not json");
  EXPECT_THROW(load_dataset(c), InputError);
}

TEST(RunTest, RerunAndWorkersAreByteIdentical) {
  TempDir dir;
  for (Method m : {Method::kUGridKde, Method::kAGridWud, Method::kClustKde, Method::kRoad}) {
    RunConfig c = WriteCity(dir, 3.0, m);
    c.evaluate = true;
    c.out_dir = dir / "a";
    run(c);
    c.out_dir = dir / "b";
    run(c);
    c.out_dir = dir / "c";
    c.workers = 8;
    run(c);
    const std::string a = Slurp(dir / "a/synthetic.csv");
    EXPECT_EQ(a, Slurp(dir / "b/synthetic.csv")) << to_string(m);
    EXPECT_EQ(a, Slurp(dir / "c/synthetic.csv")) << to_string(m);
    EXPECT_EQ(Slurp(dir / "a/report.json"), Slurp(dir / "c/report.json"));
    Json ma = Json::parse(Slurp(dir / "a/manifest.json"));
    Json mb = Json::parse(Slurp(dir / "b/manifest.json"));
    for (Json* j : {&ma, &mb}) {
      j->erase("generation_seconds");
      j->erase("wall_seconds");
    }
    EXPECT_EQ(ma, mb);
  }
}

TEST(RunTest, ManifestAndOutputsLeakNoTrueCounts) {
  TempDir dir;
  for (Method m : {Method::kUGridUni, Method::kClustWud, Method::kRoad}) {
    RunConfig c = WriteCity(dir, 3.0, m);
    c.evaluate = true;
    c.out_dir = dir / "out";
    const RunArtifacts art = run(c);
    const Json manifest = Json::parse(Slurp(art.manifest_path));
    EXPECT_EQ(manifest["version"], kVersion);
    EXPECT_EQ(manifest["synthetic_points"].get<size_t>(), art.outcome.points.size());
    EXPECT_NEAR(manifest["budget"]["eps1"].get<double>() +
                    manifest["budget"]["eps2"].get<double>() +
                    manifest["budget"]["eps3"].get<double>(),
                1.0, 1e-12);
    for (const auto& f : fs::directory_iterator(dir.path() / "out")) {
      const std::string text = Slurp(f.path().string());
      for (const char* banned : {"true_count", "members", "intermediate", "real_points"}) {
        EXPECT_EQ(text.find(banned), std::string::npos) << f.path() << " " << banned;
      }
    }
    const Json report = Json::parse(Slurp(art.report_path));
    EXPECT_FALSE(report.contains("runtime_seconds"));
    EXPECT_TRUE(report.contains("nce"));
  }
}

TEST(RunTest, RoadOnAlignedCityHasSmallMedd) {
  TempDir dir;
  RunConfig c = WriteCity(dir, 0.0, Method::kRoad);
  c.evaluate = true;
  c.out_dir = dir / "out";
  const RunArtifacts art = run(c);
  ASSERT_TRUE(art.report.has_value());
  ASSERT_TRUE(art.report->medd.has_value());
  EXPECT_LT(*art.report->medd, 1.0);
}

TEST(RunTest, BadConfigIsRejected) {
  RunConfig c;
  c.epsilon = 0.0;
  EXPECT_THROW(run(c), InvalidParameter);
  c.epsilon = 1.0;
  c.method = Method::kRoad;
  c.eps_split = std::array<double, 3>{0.5, 0.5, 0.5};
  EXPECT_THROW(c.validate(), InvalidParameter);
  c.eps_split.reset();
  c.omega = 2.0;
  EXPECT_THROW(c.validate(), InvalidParameter);
}

TEST(SweepTest, RowsPerValueAndSeed) {
  TempDir dir;
  RunConfig c = WriteCity(dir, 3.0, Method::kUGridUni);
  const Dataset ds = load_dataset(c);
  const std::vector<double> eps{0.1, 1.0, 10.0};
  const auto rows = sweep(ds, c, SweepAxis::kEpsilon, eps, 10);
  ASSERT_EQ(rows.size(), 30u);
  const std::string csv = sweep_to_csv(SweepAxis::kEpsilon, rows);
  EXPECT_EQ(csv.rfind("epsilon,nce,seed\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 31);
  const std::vector<double> radii{100.0, 500.0};
  const auto rr = sweep(ds, c, SweepAxis::kRadius, radii, 3);
  ASSERT_EQ(rr.size(), 6u);
  for (const SweepRow& r : rr) EXPECT_GE(r.metric, 0.0);
  const std::vector<double> bad{1.5};
  EXPECT_THROW(sweep(ds, c, SweepAxis::kGranularity, bad, 1), InvalidParameter);
  EXPECT_THROW(parse_axis("zoom"), InvalidParameter);
}

int RunCli(const std::string& args) {
  const std::string cmd =
      std::string(LOCSYNTH_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(CliTest, ExitCodes) {
  TempDir dir;
  const std::string out = dir / "fx";
  ASSERT_EQ(RunCli("fixture --rows 5 --cols 5 --offset-sigma 2 --out " + out), 0);
  const std::string cfg = "--config " + out + "/fixture.toml";
  EXPECT_EQ(RunCli("generate " + cfg + " --method Road --out " + (dir / "g")), 0);
  EXPECT_TRUE(fs::exists(dir / "g/synthetic.csv"));
  EXPECT_EQ(RunCli("generate " + cfg + " --method Nope --out " + (dir / "g")), 2);
  EXPECT_EQ(RunCli("generate " + cfg + " --epsilon -1 --out " + (dir / "g")), 2);
  EXPECT_EQ(RunCli("generate --points " + (dir / "missing.csv") + " --out " + (dir / "g")), 3);
  EXPECT_EQ(RunCli("bogus"), 2);
  EXPECT_EQ(RunCli("evaluate " + cfg + " --synthetic " + (dir / "g/synthetic.csv") +
                   " --out " + (dir / "e")),
            0);
  EXPECT_TRUE(fs::exists(dir / "e/report.json"));
  EXPECT_EQ(RunCli("sweep " + cfg + " --axis epsilon --values 0.5,1 --seeds 2 --out " +
                   (dir / "s")),
            0);
  EXPECT_TRUE(fs::exists(dir / "s/sweep_epsilon.csv"));
}

}  // namespace
}  // namespace locsynth
