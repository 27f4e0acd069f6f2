// pitlab/rng.hpp

// Copyright 2026  pit-lab authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef PITLAB_RNG_HPP_
#define PITLAB_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace pitlab {

// splitmix64 step; used to derive independent seeds from (seed, tag) pairs
// so that adding or reordering consumers never shifts another stream.
inline uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// FNV-1a over a string, mixed through splitmix64.
inline uint64_t HashTag(std::string_view tag) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return SplitMix64(h);
}

inline uint64_t DeriveSeed(uint64_t seed, std::string_view tag) {
  return SplitMix64(seed ^ HashTag(tag));
}

inline uint64_t DeriveSeed(uint64_t seed, std::string_view tag, uint64_t n) {
  return SplitMix64(DeriveSeed(seed, tag) ^ SplitMix64(n * 0x9e3779b97f4a7c15ull + 1));
}

// Deterministic RNG. Draw mapping is fixed here rather than delegated to
// std::uniform_real_distribution, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(SplitMix64(seed)) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double NextDouble() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double Uniform(double lo, double hi) {
    return lo + (hi - lo) * NextDouble();
  }

  // Integer in [0, n), n > 0.  Modulo bias is irrelevant at our n.
  int NextInt(int n) { return static_cast<int>(engine_() % static_cast<uint64_t>(n)); }

  // Standard normal via Box-Muller (deterministic draw order).
  double NextGaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = NextDouble(), u2 = NextDouble();
    while (u1 <= 0.0) u1 = NextDouble();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace pitlab

#endif  // PITLAB_RNG_HPP_
