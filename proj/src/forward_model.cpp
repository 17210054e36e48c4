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

#include "sasci/forward_model.hpp"

#include "sasci/error.hpp"

namespace sasci {

std::vector<double> apply_sensing(std::span<const double> cube, const MaskStack& masks) {
  const std::size_t pixels = masks.shape().pixels();
  const std::size_t depth = masks.depth();
  if (cube.size() != masks.shape().size()) {
    throw Error(ErrorKind::kDimensionMismatch, "cube size does not match masks " + masks.shape().str());
  }
  const auto a = masks.data();
  std::vector<double> out(pixels, 0.0);
  for (std::size_t i = 0; i < pixels; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < depth; ++c) acc += a[i * depth + c] * cube[i * depth + c];
    out[i] = acc;
  }
  return out;
}

std::vector<double> apply_sensing_adjoint(std::span<const double> plane, const MaskStack& masks) {
  const std::size_t pixels = masks.shape().pixels();
  const std::size_t depth = masks.depth();
  if (plane.size() != pixels) {
    throw Error(ErrorKind::kDimensionMismatch, "plane size does not match masks " + masks.shape().str());
  }
  const auto a = masks.data();
  std::vector<double> out(masks.shape().size());
  for (std::size_t i = 0; i < pixels; ++i) {
    for (std::size_t c = 0; c < depth; ++c) out[i * depth + c] = a[i * depth + c] * plane[i];
  }
  return out;
}

Measurement capture(const FrameCube& frames, const MaskStack& masks, const NoiseModel& noise,
                    RngSeed seed, std::size_t capture_index) {
  validate_dimensions(frames, masks);
  std::vector<double> y = apply_sensing(frames.data(), masks);
  if (noise.kind() == NoiseModel::Kind::kGaussian && noise.sigma() > 0.0) {
    Rng rng(seed);
    for (double& v : y) v += noise.sigma() * rng.gaussian();
  }
  return Measurement(frames.height(), frames.width(), std::move(y), capture_index);
}

Image effective_exposure(const MaskStack& masks) {
  const std::size_t depth = masks.depth();
  const auto a = masks.data();
  Image r(masks.height(), masks.width());
  auto out = r.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    unsigned count = 0;
    for (std::size_t c = 0; c < depth; ++c) count += a[i * depth + c];
    out[i] = count;
  }
  return r;
}

}  // namespace sasci
