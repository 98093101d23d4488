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


#include "locsynth/random.hpp"

#include <cmath>
#include <set>
#include <vector>

#include "gtest/gtest.h"

namespace locsynth {
namespace {

TEST(RngTest, SameSeedSameSequence) {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next(), b.next());
}

TEST(RngTest, UniformRanges) {
  Rng rng(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = rng.uniform_open();
    ASSERT_GT(v, 0.0);
    ASSERT_LT(v, 1.0);
  }
}

TEST(RngTest, IndexCoversRangeUniformly) {
  Rng rng(3);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 70000; ++i) ++hits[rng.index(7)];
  for (int h : hits) EXPECT_NEAR(h, 10000, 500);
}

TEST(RngTest, NormalMoments) {
  Rng rng(5);
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(RngTest, ExponentialMean) {
  Rng rng(6);
  double s = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) s += rng.exponential(3.0);
  EXPECT_NEAR(s / n, 3.0, 0.03);
}

TEST(RngTest, PoissonMean) {
  Rng rng(8);
  double s = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) s += static_cast<double>(rng.poisson(20.0));
  EXPECT_NEAR(s / n, 20.0, 0.1);
  EXPECT_EQ(rng.poisson(0.0), 0);
}

TEST(StreamFactoryTest, StreamsDependOnStageAndId) {
  const StreamFactory f(7);
  std::set<uint64_t> firsts;
  for (const char* stage : {"a", "b", "generate"}) {
    for (uint64_t id = 0; id < 50; ++id) firsts.insert(f.stream(stage, id).next());
  }
  EXPECT_EQ(firsts.size(), 150u);
  EXPECT_EQ(f.stream("a", 3).next(), StreamFactory(7).stream("a", 3).next());
  EXPECT_NE(f.stream("a", 3).next(), StreamFactory(8).stream("a", 3).next());
}

TEST(StreamFactoryTest, ChildIsDeterministic) {
  const StreamFactory f(11);
  EXPECT_EQ(f.child("sweep", 2).stream("x").next(),
            f.child("sweep", 2).stream("x").next());
  EXPECT_NE(f.child("sweep", 2).stream("x").next(),
            f.child("sweep", 3).stream("x").next());
}

TEST(HashTest, KnownValues) {
  // FNV-1a reference values.
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  // splitmix64 first output for state 0.
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
}

}  // namespace
}  // namespace locsynth
