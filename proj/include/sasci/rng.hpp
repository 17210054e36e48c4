// Copyright 2026 The SASCI Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>

namespace sasci {

/// Seed of a random stream. Streams are std::mt19937_64, whose output
/// sequence is fixed by the C++ standard; all conversions to uniform,
/// Bernoulli and Gaussian variates are done here rather than through the
/// implementation-defined <random> distributions, so golden outputs are
/// stable across standard libraries.
struct RngSeed {
  std::uint64_t value = 0;

  friend bool operator==(RngSeed, RngSeed) = default;
};

/// Role tag mixed into derived seeds so that mask and noise streams of the
/// same capture never coincide.
enum class SeedRole : std::uint64_t {
  kMask = 0x6d61736bULL,
  kNoise = 0x6e6f6973ULL,
  kScene = 0x7363656eULL,
  kBench = 0x62656e63ULL,
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for task `index` of kind `role`, independent of execution order.
constexpr RngSeed derive_seed(RngSeed master, std::uint64_t index, SeedRole role) noexcept {
  std::uint64_t h = mix64(master.value);
  h = mix64(h ^ static_cast<std::uint64_t>(role));
  h = mix64(h ^ index);
  return RngSeed{h};
}

class Rng {
 public:
  explicit Rng(RngSeed seed) : engine_(seed.value) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via the Box-Muller transform; the second variate of
  /// each pair is cached.
  double gaussian();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Threshold t such that a uniform 32-bit word u yields a success iff u < t;
/// exact for p = 0 and p = 1.
std::uint64_t bernoulli_threshold32(double p);

}  // namespace sasci
