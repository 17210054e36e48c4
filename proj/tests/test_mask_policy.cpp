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

#include <cmath>

#include "doctest.h"
#include "sasci/mask_policy.hpp"

using namespace sasci;

namespace {

SaliencyStack stack_from(std::size_t h, std::size_t w, std::size_t d, const std::vector<std::uint8_t>& bits) {
  return SaliencyStack(Shape{h, w, d}, bits);
}

SaliencyStack random_stack(Rng& rng, std::size_t h, std::size_t w, std::size_t d, double density) {
  std::vector<std::uint8_t> bits(h * w * d);
  for (auto& b : bits) b = rng.bernoulli(density) ? 1 : 0;
  return stack_from(h, w, d, bits);
}

bool quantized(double p, std::size_t d) {
  const double scaled = p * static_cast<double>(d);
  const double k = std::round(scaled);
  return std::abs(scaled - k) < 1e-9 && k >= 1.0 && k <= static_cast<double>(d);
}

}  // namespace

TEST_CASE("init_mask is deterministic per seed") {
  const MaskStack a = init_mask(16, 16, 4, RngSeed{5});
  const MaskStack b = init_mask(16, 16, 4, RngSeed{5});
  CHECK(std::equal(a.data().begin(), a.data().end(), b.data().begin()));
  CHECK(a.shape() == Shape{16, 16, 4});
}

TEST_CASE("init_mask at 256x256x8 is Bernoulli(0.5)") {
  const MaskStack a = init_mask(256, 256, 8, RngSeed{17});
  CHECK(a.mean() >= 0.49);
  CHECK(a.mean() <= 0.51);
  const MaskStack b = init_mask(256, 256, 8, RngSeed{18});
  CHECK(!std::equal(a.data().begin(), a.data().end(), b.data().begin()));
}

TEST_CASE("probability from an all-zero stack is the 1/D floor") {
  const ProbabilityMap p = probability_from_saliency(stack_from(4, 4, 30, std::vector<std::uint8_t>(4 * 4 * 30, 0)));
  for (double v : p.data()) CHECK(v == doctest::Approx(1.0 / 30.0).epsilon(1e-15));
  CHECK(p.floor_value() == doctest::Approx(1.0 / 30.0));
}

TEST_CASE("probability from an all-ones stack is one") {
  for (std::size_t d : {1u, 7u, 30u, 50u}) {
    const ProbabilityMap p = probability_from_saliency(stack_from(3, 3, d, std::vector<std::uint8_t>(9 * d, 1)));
    for (double v : p.data()) CHECK(v == 1.0);
  }
}

TEST_CASE("probability with D=4: two covering maps give 0.5, none gives 0.25") {
  // Pixel 0 covered by maps 0 and 2; pixel 1 uncovered; pixel 2 by all four.
  std::vector<std::uint8_t> bits = {1, 0, 1, 0, 0, 0, 0, 0, 1, 1, 1, 1, 0, 1, 0, 0};
  const ProbabilityMap p = probability_from_saliency(stack_from(2, 2, 4, bits));
  CHECK(p(0, 0) == 0.5);
  CHECK(p(0, 1) == 0.25);
  CHECK(p(1, 0) == 1.0);
  CHECK(p(1, 1) == 0.25);
}

TEST_CASE("quantization invariant on random stacks") {
  Rng rng(RngSeed{31});
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t d = 1 + rng.next_u64() % 50;
    const SaliencyStack s = random_stack(rng, 1 + rng.next_u64() % 12, 1 + rng.next_u64() % 12, d, rng.uniform());
    const ProbabilityMap p = probability_from_saliency(s);
    for (double v : p.data()) REQUIRE(quantized(v, d));
  }
}

TEST_CASE("adding a detection never lowers the probability at that pixel") {
  Rng rng(RngSeed{32});
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t h = 1 + rng.next_u64() % 6, w = 1 + rng.next_u64() % 6, d = 1 + rng.next_u64() % 10;
    const SaliencyStack s = random_stack(rng, h, w, d, 0.3);
    std::vector<std::uint8_t> bits(s.data().begin(), s.data().end());
    const std::size_t at = rng.next_u64() % bits.size();
    if (bits[at] == 1) continue;
    bits[at] = 1;
    const ProbabilityMap before = probability_from_saliency(s);
    const ProbabilityMap after = probability_from_saliency(stack_from(h, w, d, bits));
    const std::size_t pixel = at / d;
    CHECK(after.data()[pixel] >= before.data()[pixel]);
  }
}

TEST_CASE("pixel with the most covering detections gets the maximum probability") {
  Rng rng(RngSeed{33});
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 2 + rng.next_u64() % 20;
    const SaliencyStack s = random_stack(rng, 8, 8, d, 0.2);
    const ProbabilityMap p = probability_from_saliency(s);
    std::size_t best = 0, best_count = 0;
    for (std::size_t i = 0; i < 64; ++i) {
      std::size_t count = 0;
      for (std::size_t k = 0; k < d; ++k) count += s.data()[i * d + k];
      if (count > best_count) {
        best_count = count;
        best = i;
      }
    }
    const double max_p = *std::max_element(p.data().begin(), p.data().end());
    CHECK(p.data()[best] == max_p);
  }
}

TEST_CASE("sample_mask endpoints and determinism") {
  const ProbabilityMap ones(4, 4, std::vector<double>(16, 1.0), 5);
  const ProbabilityMap zeros(4, 4, std::vector<double>(16, 0.0), 5);
  const MaskStack all = sample_mask(ones, 6, RngSeed{1});
  const MaskStack none = sample_mask(zeros, 6, RngSeed{1});
  for (auto v : all.data()) CHECK(v == 1);
  for (auto v : none.data()) CHECK(v == 0);
  const ProbabilityMap half(4, 4, std::vector<double>(16, 0.5), 2);
  const MaskStack a = sample_mask(half, 3, RngSeed{77});
  const MaskStack b = sample_mask(half, 3, RngSeed{77});
  CHECK(std::equal(a.data().begin(), a.data().end(), b.data().begin()));
}

TEST_CASE("sample_mask frequency at p=0.3 over 256x256x8") {
  const ProbabilityMap p(256, 256, std::vector<double>(256 * 256, 0.3), 10);
  const MaskStack m = sample_mask(p, 8, RngSeed{4});
  CHECK(std::abs(m.mean() - 0.3) <= 0.01);
}

TEST_CASE("per-pixel frequency over 1000 channels tracks p") {
  const std::vector<double> levels = {0.0, 1.0 / 30.0, 0.1, 0.25, 0.5, 0.8, 1.0};
  const ProbabilityMap p(1, levels.size(), levels, 30);
  const MaskStack m = sample_mask(p, 1000, RngSeed{8});
  for (std::size_t w = 0; w < levels.size(); ++w) {
    double ones = 0;
    for (std::size_t c = 0; c < 1000; ++c) ones += m(0, w, c);
    CHECK(std::abs(ones / 1000.0 - levels[w]) <= 0.05);
  }
}

TEST_CASE("channels share the pixel probability but are sampled independently") {
  std::vector<double> values(64 * 64);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = (i % 2 == 0) ? 0.9 : 0.1;
  const ProbabilityMap p(64, 64, values, 10);
  const MaskStack m = sample_mask(p, 8, RngSeed{12});
  double even = 0, odd = 0;
  bool channels_differ = false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t c = 0; c < 8; ++c) {
      (i % 2 == 0 ? even : odd) += m.data()[i * 8 + c];
      if (c > 0 && m.data()[i * 8 + c] != m.data()[i * 8]) channels_differ = true;
    }
  }
  CHECK(even / (values.size() / 2 * 8) == doctest::Approx(0.9).epsilon(0.03));
  CHECK(odd / (values.size() / 2 * 8) == doctest::Approx(0.1).epsilon(0.1));
  CHECK(channels_differ);
}

TEST_CASE("count_nonempty_maps") {
  std::vector<std::uint8_t> bits(2 * 2 * 3, 0);
  bits[0 * 3 + 1] = 1;
  CHECK(count_nonempty_maps(SaliencyStack(Shape{2, 2, 3}, bits)) == 1);
}
