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

#include <span>
#include <vector>

#include "sasci/types.hpp"

namespace sasci {

/// Y(h,w) = Σ_c A(h,w,c)·X(h,w,c) + e(h,w). Gaussian noise is drawn in
/// row-major pixel order from a stream seeded by `seed`; noisy values are
/// not clipped.
Measurement capture(const FrameCube& frames, const MaskStack& masks, const NoiseModel& noise,
                    RngSeed seed, std::size_t capture_index = 0);

/// R(h,w) = Σ_c A(h,w,c), the diagonal of A·Aᵀ.
Image effective_exposure(const MaskStack& masks);

/// The sensing operator A on an unconstrained cube in canonical layout
/// (size H·W·C), returning H·W values.
std::vector<double> apply_sensing(std::span<const double> cube, const MaskStack& masks);

/// Aᵀ: spreads each H·W value onto the active mask positions of its pixel.
std::vector<double> apply_sensing_adjoint(std::span<const double> plane, const MaskStack& masks);

}  // namespace sasci
