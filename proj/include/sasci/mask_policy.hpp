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

#include <cstddef>

#include "sasci/types.hpp"

namespace sasci {

/// Traditional coding mask: every element an independent Bernoulli(0.5).
MaskStack init_mask(std::size_t height, std::size_t width, std::size_t depth, RngSeed seed);

/// p(h,w) = (1/D)·Σ_d S(h,w,d), then every exactly-zero pixel is raised to
/// the floor 1/D. D is the stack depth, not the number of nonempty maps.
ProbabilityMap probability_from_saliency(const SaliencyStack& saliency);

/// Adaptive mask: element (h,w,c) ~ Bernoulli(p(h,w)), independently for
/// every channel.
MaskStack sample_mask(const ProbabilityMap& probability, std::size_t depth, RngSeed seed);

/// Number of maps in the stack with at least one active pixel.
std::size_t count_nonempty_maps(const SaliencyStack& saliency);

}  // namespace sasci
