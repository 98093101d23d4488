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

// Differential-privacy primitives shared by the partitioning, generation and
// road-network stages: the Laplace mechanism, its quantile function, count
// post-processing and the per-method privacy budget split.
//
// Every noised quantity in this library is a point count, so the sensitivity
// is fixed at 1 and a Laplace scale is always 1 / epsilon.

#ifndef LOCSYNTH_DP_HPP_
#define LOCSYNTH_DP_HPP_

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "locsynth/error.hpp"
#include "locsynth/random.hpp"

namespace locsynth {

class LaplaceScale {
 public:
  explicit LaplaceScale(double b) : b_(b) {
    if (!(b > 0.0) || !std::isfinite(b)) {
      throw InvalidParameter("Laplace scale must be positive and finite");
    }
  }
  static LaplaceScale for_epsilon(double epsilon) {
    if (!(epsilon > 0.0)) {
      throw InvalidParameter("epsilon must be positive");
    }
    return LaplaceScale(1.0 / epsilon);
  }
  double b() const { return b_; }

 private:
  double b_;
};

// Inverse CDF of Laplace(mu, 1/eps).
inline double laplace_quantile(double mu, double F, double eps) {
  if (!(F > 0.0 && F < 1.0)) {
    throw InvalidParameter("Laplace quantile requires 0 < F < 1");
  }
  if (!(eps > 0.0)) {
    throw InvalidParameter("Laplace quantile requires eps > 0");
  }
  if (F <= 0.5) return mu + std::log(2.0 * F) / eps;
  return mu - std::log(2.0 - 2.0 * F) / eps;
}

// Zero-mean Laplace draw by inversion of a single uniform variate.
inline double laplace_sample(const LaplaceScale& scale, Rng& rng) {
  return laplace_quantile(0.0, rng.uniform_open(), 1.0 / scale.b());
}

// Round half away from zero, then clamp negatives to zero.
inline int64_t sanitize_count(double x) {
  if (std::isnan(x)) return 0;
  const double r = std::round(x);
  if (r <= 0.0) return 0;
  return static_cast<int64_t>(r);
}

// Source of additive count noise. The shipped pipeline always uses
// LaplaceNoise; tests substitute a zero-noise type to compare against
// brute-force oracles.
template <typename N>
concept NoiseSource = requires(const N& n, double scale, Rng& rng) {
  { n.sample(scale, rng) } -> std::convertible_to<double>;
};

struct LaplaceNoise {
  double sample(double scale, Rng& rng) const {
    return laplace_sample(LaplaceScale(scale), rng);
  }
};

// Noised, post-processed count: sanitize_count(count + Lap(1/eps)).
template <NoiseSource Noise>
int64_t noisy_count(int64_t count, double eps, const Noise& noise, Rng& rng) {
  return sanitize_count(static_cast<double>(count) +
                        noise.sample(1.0 / eps, rng));
}

enum class Method {
  kUGridUni,
  kUGridWud,
  kUGridKde,
  kAGridUni,
  kAGridWud,
  kAGridKde,
  kClustUni,
  kClustWud,
  kClustKde,
  kRoad,
};

inline constexpr std::array<Method, 10> kAllMethods = {
    Method::kUGridUni, Method::kUGridWud, Method::kUGridKde,
    Method::kAGridUni, Method::kAGridWud, Method::kAGridKde,
    Method::kClustUni, Method::kClustWud, Method::kClustKde,
    Method::kRoad};

enum class PartitionKind { kUniformGrid, kAdaptiveGrid, kCluster, kNone };
enum class GeneratorKind { kUniform, kWud, kKde, kRoad };

inline PartitionKind partition_of(Method m) {
  switch (m) {
    case Method::kUGridUni:
    case Method::kUGridWud:
    case Method::kUGridKde:
      return PartitionKind::kUniformGrid;
    case Method::kAGridUni:
    case Method::kAGridWud:
    case Method::kAGridKde:
      return PartitionKind::kAdaptiveGrid;
    case Method::kClustUni:
    case Method::kClustWud:
    case Method::kClustKde:
      return PartitionKind::kCluster;
    case Method::kRoad:
      return PartitionKind::kNone;
  }
  return PartitionKind::kNone;
}

inline GeneratorKind generator_of(Method m) {
  switch (m) {
    case Method::kUGridUni:
    case Method::kAGridUni:
    case Method::kClustUni:
      return GeneratorKind::kUniform;
    case Method::kUGridWud:
    case Method::kAGridWud:
    case Method::kClustWud:
      return GeneratorKind::kWud;
    case Method::kUGridKde:
    case Method::kAGridKde:
    case Method::kClustKde:
      return GeneratorKind::kKde;
    case Method::kRoad:
      return GeneratorKind::kRoad;
  }
  return GeneratorKind::kRoad;
}

inline std::string to_string(Method m) {
  switch (m) {
    case Method::kUGridUni: return "UGrid-Uni";
    case Method::kUGridWud: return "UGrid-WUD";
    case Method::kUGridKde: return "UGrid-KDE";
    case Method::kAGridUni: return "AGrid-Uni";
    case Method::kAGridWud: return "AGrid-WUD";
    case Method::kAGridKde: return "AGrid-KDE";
    case Method::kClustUni: return "Clust-Uni";
    case Method::kClustWud: return "Clust-WUD";
    case Method::kClustKde: return "Clust-KDE";
    case Method::kRoad: return "Road";
  }
  return "?";
}

// Case-insensitive.
inline Method parse_method(std::string_view name) {
  auto lower = [](std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
  };
  const std::string key = lower(name);
  for (Method m : kAllMethods) {
    if (lower(to_string(m)) == key) return m;
  }
  throw InvalidParameter("unknown method '" + std::string(name) + "'");
}

// Per-stage budgets: eps1 partitioning (or edge counts), eps2 second
// partitioning level (or along-edge histograms), eps3 generation (KDE or
// off-edge histograms). Sequential composition gives eps1+eps2+eps3 = total.
struct Budget {
  double epsilon_total = 1.0;
  double eps1 = 1.0;
  double eps2 = 0.0;
  double eps3 = 0.0;

  static Budget make(double total, double e1, double e2, double e3) {
    if (!(total > 0.0) || !std::isfinite(total)) {
      throw InvalidParameter("epsilon_total must be positive");
    }
    if (e1 < 0.0 || e2 < 0.0 || e3 < 0.0) {
      throw InvalidParameter("budget components must be nonnegative");
    }
    if (std::abs((e1 + e2 + e3) - total) > 1e-12 * total) {
      throw InvalidParameter("budget components must sum to epsilon_total");
    }
    return Budget{total, e1, e2, e3};
  }
};

// Default split per method, scaled linearly with the total budget.
inline Budget resolve_budget(Method method, double epsilon_total) {
  const double e = epsilon_total;
  if (!(e > 0.0) || !std::isfinite(e)) {
    throw InvalidParameter("epsilon_total must be positive");
  }
  switch (method) {
    case Method::kUGridUni:
    case Method::kUGridWud:
      return Budget::make(e, e, 0.0, 0.0);
    case Method::kUGridKde:
      return Budget::make(e, 0.6 * e, 0.0, 0.4 * e);
    case Method::kAGridUni:
    case Method::kAGridWud:
      return Budget::make(e, 0.5 * e, 0.5 * e, 0.0);
    case Method::kAGridKde:
      return Budget::make(e, 0.4 * e, 0.4 * e, 0.2 * e);
    case Method::kClustUni:
    case Method::kClustWud:
      return Budget::make(e, 2.0 * e / 3.0, e / 3.0, 0.0);
    case Method::kClustKde:
      return Budget::make(e, 0.25 * e, 0.5 * e, 0.25 * e);
    case Method::kRoad:
      return Budget::make(e, e / 3.0, e / 3.0, e / 3.0);
  }
  throw InvalidParameter("unknown method");
}

inline Budget resolve_budget(Method method, double epsilon_total,
                             const std::optional<std::array<double, 3>>& split) {
  if (!split) return resolve_budget(method, epsilon_total);
  return Budget::make(epsilon_total, (*split)[0], (*split)[1], (*split)[2]);
}

}  // namespace locsynth

#endif  // LOCSYNTH_DP_HPP_
