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

#include "sasci/mask_policy.hpp"

#include <vector>

#include "sasci/error.hpp"

namespace sasci {
namespace {

// Elements are drawn in canonical order, two per 64-bit word (low half
// first), each compared against a 32-bit threshold.
template <typename ThresholdFn>
std::vector<std::uint8_t> draw_bernoulli(std::size_t pixels, std::size_t depth, RngSeed seed,
                                         ThresholdFn threshold_of_pixel) {
  const std::size_t n = pixels * depth;
  std::vector<std::uint32_t> halves((n + 1) & ~std::size_t{1});
  Rng rng(seed);
  for (std::size_t j = 0; j < halves.size(); j += 2) {
    const std::uint64_t word = rng.next_u64();
    halves[j] = static_cast<std::uint32_t>(word);
    halves[j + 1] = static_cast<std::uint32_t>(word >> 32);
  }
  std::vector<std::uint8_t> out(n);
  for (std::size_t i = 0; i < pixels; ++i) {
    const std::uint64_t threshold = threshold_of_pixel(i);
    const std::uint32_t* u = &halves[i * depth];
    std::uint8_t* o = &out[i * depth];
    for (std::size_t c = 0; c < depth; ++c) o[c] = u[c] < threshold ? 1 : 0;
  }
  return out;
}

}  // namespace

MaskStack init_mask(std::size_t height, std::size_t width, std::size_t depth, RngSeed seed) {
  if (height == 0 || width == 0 || depth == 0) {
    throw Error(ErrorKind::kInvalidValue, "init_mask needs H, W, C >= 1");
  }
  const std::uint64_t half = bernoulli_threshold32(0.5);
  return MaskStack(Shape{height, width, depth},
                   draw_bernoulli(height * width, depth, seed, [half](std::size_t) { return half; }));
}

ProbabilityMap probability_from_saliency(const SaliencyStack& saliency) {
  const std::size_t d_max = saliency.depth();
  const std::size_t pixels = saliency.shape().pixels();
  const auto s = saliency.data();
  const double inv_d = 1.0 / static_cast<double>(d_max);
  std::vector<double> p(pixels);
  for (std::size_t i = 0; i < pixels; ++i) {
    std::size_t covered = 0;
    for (std::size_t d = 0; d < d_max; ++d) covered += s[i * d_max + d];
    // covered/D rather than covered·(1/D) so that D/D is exactly 1.
    p[i] = covered == 0 ? inv_d : static_cast<double>(covered) / static_cast<double>(d_max);
  }
  return ProbabilityMap(saliency.height(), saliency.width(), std::move(p), d_max);
}

MaskStack sample_mask(const ProbabilityMap& probability, std::size_t depth, RngSeed seed) {
  if (depth == 0) throw Error(ErrorKind::kInvalidValue, "sample_mask needs C >= 1");
  const std::size_t pixels = probability.height() * probability.width();
  std::vector<std::uint64_t> thresholds(pixels);
  const auto p = probability.data();
  for (std::size_t i = 0; i < pixels; ++i) thresholds[i] = bernoulli_threshold32(p[i]);
  return MaskStack(Shape{probability.height(), probability.width(), depth},
                   draw_bernoulli(pixels, depth, seed, [&](std::size_t i) { return thresholds[i]; }));
}

std::size_t count_nonempty_maps(const SaliencyStack& saliency) {
  std::size_t nonempty = 0;
  for (std::size_t d = 0; d < saliency.depth(); ++d) {
    if (saliency.map_area(d) > 0) ++nonempty;
  }
  return nonempty;
}

}  // namespace sasci
