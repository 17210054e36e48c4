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
#include <cstdint>
#include <filesystem>
#include <vector>

#include "sasci/saliency.hpp"
#include "sasci/types.hpp"

namespace sasci {

/// A bright square moving over a static, smoothly textured background,
/// bouncing off the image borders.
struct MovingBlockScene {
  std::size_t height = 256;
  std::size_t width = 256;
  std::size_t frames = 80;
  std::size_t block_side = 32;
  double block_value = 0.95;
  /// Pixels per frame.
  double speed = 2.5;
};

struct SyntheticSequence {
  std::vector<Image> frames;
  /// Block bounds in each frame.
  std::vector<Region> block_boxes;
};

SyntheticSequence make_moving_block_sequence(const MovingBlockScene& scene, RngSeed seed);

/// A uniform (constant-valued) sequence, used to exercise the floor rule.
SyntheticSequence make_static_sequence(std::size_t height, std::size_t width, std::size_t frames, double value);

/// Groups frames C at a time, dropping the remainder.
std::vector<FrameCube> group_frames(const std::vector<Image>& frames, std::size_t grouping);

/// For each group, one binary H×W mask per frame covering the union of the
/// block's boxes over that group (its trajectory).
std::vector<std::vector<std::vector<std::uint8_t>>> trajectory_regions(const SyntheticSequence& sequence,
                                                                       std::size_t grouping);

/// Writes frame_####.pgm files and manifest.json into `dir`; returns the
/// manifest path.
std::filesystem::path write_synthetic_dataset(const std::filesystem::path& dir, const SyntheticSequence& sequence,
                                              const std::string& name, std::size_t grouping);

}  // namespace sasci
