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

// Seeded random streams.
//
// Every random decision in the pipeline is drawn from an `Rng` obtained from
// a `StreamFactory`, keyed by a stage name and an integer id (region id, edge
// id, ...). Streams are independent of scheduling, so results do not depend
// on how many worker threads process the regions or edges.
//
// The standard distributions in <random> are implementation-defined, so all
// variates are derived here from the raw 64-bit output of std::mt19937_64,
// whose sequence is fixed by the standard.

#ifndef LOCSYNTH_RANDOM_HPP_
#define LOCSYNTH_RANDOM_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace locsynth {

inline constexpr uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on the open interval (0, 1).
  double uniform_open() {
    double u = uniform();
    while (u == 0.0) u = uniform();
    return u;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n must be positive.
  size_t index(size_t n) {
    // Lemire's nearly-divisionless method on 64-bit words.
    const unsigned __int128 bound = n;
    unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * bound;
    auto low = static_cast<uint64_t>(m);
    if (low < n) {
      const uint64_t threshold = (0 - static_cast<uint64_t>(n)) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(engine_()) * bound;
        low = static_cast<uint64_t>(m);
      }
    }
    return static_cast<size_t>(m >> 64);
  }

  bool coin() { return (engine_() >> 63) != 0; }

  // Exponential with the given mean.
  double exponential(double mean) { return -mean * std::log1p(-uniform()); }

  // Standard normal, Box-Muller without caching so each call consumes
  // exactly two words.
  double normal() {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Poisson by sequential inversion; adequate for the means used by the
  // fixtures (well below a few hundred).
  int64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    const double u = uniform();
    double p = std::exp(-mean);
    double cdf = p;
    int64_t k = 0;
    while (u >= cdf && k < 100000) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
      if (p == 0.0 && cdf < u) break;
    }
    return k;
  }

 private:
  std::mt19937_64 engine_;
};

// Derives per-stage, per-item streams from a single master seed.
class StreamFactory {
 public:
  explicit StreamFactory(uint64_t master_seed) : master_(master_seed) {}

  uint64_t master_seed() const { return master_; }

  uint64_t seed_for(std::string_view stage, uint64_t id) const {
    return splitmix64(splitmix64(master_ ^ fnv1a64(stage)) + id);
  }

  Rng stream(std::string_view stage, uint64_t id = 0) const {
    return Rng(seed_for(stage, id));
  }

  // A factory for a nested scope (e.g. one cell of a parameter sweep).
  StreamFactory child(std::string_view scope, uint64_t id) const {
    return StreamFactory(seed_for(scope, id));
  }

 private:
  uint64_t master_;
};

}  // namespace locsynth

#endif  // LOCSYNTH_RANDOM_HPP_
