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


#include "locsynth/dp.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "gtest/gtest.h"
#include "testing.hpp"

namespace locsynth {
namespace {

using testing::laplace_cdf;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

TEST(LaplaceQuantileTest, Examples) {
  EXPECT_EQ(laplace_quantile(0.0, 0.5, 1.0), 0.0);
  EXPECT_EQ(laplace_quantile(3.5, 0.5, 0.2), 3.5);
  // -ln(0.2) / 0.5
  EXPECT_NEAR(laplace_quantile(0.0, 0.9, 0.5), 3.2188758248682006, 1e-12);
  // 2 + ln(2 * 0.25) / 1
  EXPECT_NEAR(laplace_quantile(2.0, 0.25, 1.0), 1.3068528194400546, 1e-12);
}

TEST(LaplaceQuantileTest, StrictlyIncreasingInF) {
  double prev = -std::numeric_limits<double>::infinity();
  for (int i = 1; i < 1000; ++i) {
    const double q = laplace_quantile(1.0, i / 1000.0, 0.7);
    ASSERT_GT(q, prev);
    prev = q;
  }
}

TEST(LaplaceQuantileTest, InvertsCdf) {
  for (double f : {0.01, 0.2, 0.5, 0.77, 0.999}) {
    EXPECT_NEAR(laplace_cdf(laplace_quantile(0.0, f, 2.0), 0.5), f, 1e-12);
  }
}

TEST(LaplaceQuantileTest, RejectsBadArguments) {
  EXPECT_THROW(laplace_quantile(0.0, 0.0, 1.0), InvalidParameter);
  EXPECT_THROW(laplace_quantile(0.0, 1.0, 1.0), InvalidParameter);
  EXPECT_THROW(laplace_quantile(0.0, 0.5, 0.0), InvalidParameter);
  EXPECT_THROW(LaplaceScale(0.0), InvalidParameter);
  EXPECT_THROW(LaplaceScale::for_epsilon(-1.0), InvalidParameter);
}

TEST(LaplaceSampleTest, MomentsAndSymmetry) {
  Rng rng(2024);
  const LaplaceScale scale(1.0);
  const int n = 1000000;
  double s = 0.0, s2 = 0.0;
  int neg = 0;
  for (int i = 0; i < n; ++i) {
    const double x = laplace_sample(scale, rng);
    s += x;
    s2 += x * x;
    if (x < 0.0) ++neg;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(var, 2.0, 0.04);
  EXPECT_NEAR(static_cast<double>(neg) / n, 0.5, 0.002);
}

TEST(LaplaceSampleTest, QuantileAgreesWithSampler) {
  Rng rng(99);
  const LaplaceScale scale(2.0);
  const double q = laplace_quantile(0.0, 0.9, 0.5);
  int below = 0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    if (laplace_sample(scale, rng) < q) ++below;
  }
  EXPECT_NEAR(static_cast<double>(below) / n, 0.9, 0.002);
}

TEST(LaplaceSampleTest, EmpiricalCdfAtMultiplesOfScale) {
  Rng rng(7);
  const double b = 1.5;
  const LaplaceScale scale(b);
  const int n = 1000000;
  std::vector<double> xs(n);
  for (double& x : xs) x = laplace_sample(scale, rng);
  for (int k = -2; k <= 2; ++k) {
    int below = 0;
    for (double x : xs) below += x <= k * b;
    EXPECT_NEAR(static_cast<double>(below) / n, laplace_cdf(k * b, b), 0.005)
        << "k = " << k;
  }
}

TEST(SanitizeCountTest, Examples) {
  EXPECT_EQ(sanitize_count(-3.2), 0);
  EXPECT_EQ(sanitize_count(4.6), 5);
  EXPECT_EQ(sanitize_count(0.0), 0);
  EXPECT_EQ(sanitize_count(2.5), 3);
  EXPECT_EQ(sanitize_count(2.4999), 2);
  EXPECT_EQ(sanitize_count(-0.5), 0);
  EXPECT_EQ(sanitize_count(kNaN), 0);
}

TEST(SanitizeCountTest, IdempotentAndMonotone) {
  int64_t prev = 0;
  for (int i = -500; i <= 500; ++i) {
    const double x = i * 0.037;
    const int64_t c = sanitize_count(x);
    ASSERT_GE(c, 0);
    ASSERT_GE(c, prev);
    ASSERT_EQ(sanitize_count(static_cast<double>(c)), c);
    prev = c;
  }
}

TEST(NoisyCountTest, UsesHook) {
  struct Fixed {
    double sample(double, Rng&) const { return 1.6; }
  };
  Rng rng(1);
  EXPECT_EQ(noisy_count(10, 1.0, Fixed{}, rng), 12);
  EXPECT_EQ(noisy_count(0, 1.0, LaplaceNoise{}, rng) >= 0, true);
}

TEST(BudgetTest, DefaultSplits) {
  const Budget kde = resolve_budget(Method::kUGridKde, 1.0);
  EXPECT_DOUBLE_EQ(kde.eps1, 0.6);
  EXPECT_DOUBLE_EQ(kde.eps2, 0.0);
  EXPECT_DOUBLE_EQ(kde.eps3, 0.4);
  const Budget road = resolve_budget(Method::kRoad, 1.0);
  EXPECT_DOUBLE_EQ(road.eps1, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(road.eps2, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(road.eps3, 1.0 / 3.0);
  const Budget clust = resolve_budget(Method::kClustKde, 2.0);
  EXPECT_DOUBLE_EQ(clust.eps1, 0.5);
  EXPECT_DOUBLE_EQ(clust.eps2, 1.0);
  EXPECT_DOUBLE_EQ(clust.eps3, 0.5);
  const Budget agrid = resolve_budget(Method::kAGridUni, 1.0);
  EXPECT_DOUBLE_EQ(agrid.eps1, 0.5);
  EXPECT_DOUBLE_EQ(agrid.eps2, 0.5);
}

TEST(BudgetTest, ComponentsSumToTotal) {
  for (Method m : kAllMethods) {
    for (double eps : {0.01, 0.1, 0.3, 1.0, 7.0, 10.0}) {
      const Budget b = resolve_budget(m, eps);
      EXPECT_GE(b.eps1, 0.0);
      EXPECT_GE(b.eps2, 0.0);
      EXPECT_GE(b.eps3, 0.0);
      EXPECT_LE(std::abs(b.eps1 + b.eps2 + b.eps3 - eps), 1e-12 * eps)
          << to_string(m) << " " << eps;
      EXPECT_EQ(b.epsilon_total, eps);
    }
  }
}

TEST(BudgetTest, ExplicitSplitMustSum) {
  EXPECT_NO_THROW(resolve_budget(Method::kRoad, 1.0,
                                 std::array<double, 3>{0.5, 0.25, 0.25}));
  EXPECT_THROW(resolve_budget(Method::kRoad, 1.0,
                              std::array<double, 3>{0.5, 0.25, 0.3}),
               InvalidParameter);
  EXPECT_THROW(Budget::make(1.0, 1.2, -0.2, 0.0), InvalidParameter);
  EXPECT_THROW(resolve_budget(Method::kRoad, 0.0), InvalidParameter);
}

TEST(MethodTest, NamesRoundTrip) {
  for (Method m : kAllMethods) EXPECT_EQ(parse_method(to_string(m)), m);
  EXPECT_EQ(parse_method("clust-kde"), Method::kClustKde);
  EXPECT_THROW(parse_method("Grid"), InvalidParameter);
  EXPECT_EQ(partition_of(Method::kAGridWud), PartitionKind::kAdaptiveGrid);
  EXPECT_EQ(generator_of(Method::kAGridWud), GeneratorKind::kWud);
  EXPECT_EQ(partition_of(Method::kRoad), PartitionKind::kNone);
}

}  // namespace
}  // namespace locsynth
