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

#include "sasci/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "sasci/dataset_io.hpp"
#include "sasci/error.hpp"

namespace sasci {
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kNoiseGrid = 9;

// Static background: two sinusoids plus bilinearly interpolated lattice noise,
// kept within [0.15, 0.55].
Image make_background(std::size_t height, std::size_t width, Rng& rng) {
  std::vector<double> lattice(kNoiseGrid * kNoiseGrid);
  for (double& v : lattice) v = rng.uniform();
  const double phase_a = 2.0 * std::numbers::pi * rng.uniform();
  const double phase_b = 2.0 * std::numbers::pi * rng.uniform();
  Image bg(height, width);
  for (std::size_t h = 0; h < height; ++h) {
    const double gy = static_cast<double>(h) / static_cast<double>(height) * (kNoiseGrid - 1);
    const std::size_t y0 = std::min<std::size_t>(static_cast<std::size_t>(gy), kNoiseGrid - 2);
    const double fy = gy - static_cast<double>(y0);
    for (std::size_t w = 0; w < width; ++w) {
      const double gx = static_cast<double>(w) / static_cast<double>(width) * (kNoiseGrid - 1);
      const std::size_t x0 = std::min<std::size_t>(static_cast<std::size_t>(gx), kNoiseGrid - 2);
      const double fx = gx - static_cast<double>(x0);
      const double noise = (1 - fy) * ((1 - fx) * lattice[y0 * kNoiseGrid + x0] + fx * lattice[y0 * kNoiseGrid + x0 + 1]) +
                           fy * ((1 - fx) * lattice[(y0 + 1) * kNoiseGrid + x0] + fx * lattice[(y0 + 1) * kNoiseGrid + x0 + 1]);
      const double waves = std::sin(2.0 * std::numbers::pi * static_cast<double>(w) / 40.0 + phase_a) *
                           std::sin(2.0 * std::numbers::pi * static_cast<double>(h) / 56.0 + phase_b);
      bg(h, w) = 0.35 + 0.1 * waves + 0.1 * (noise - 0.5);
    }
  }
  return bg;
}

// Reflects a coordinate into [0, limit].
double bounce(double position, double limit) {
  if (limit <= 0.0) return 0.0;
  const double period = 2.0 * limit;
  double p = std::fmod(position, period);
  if (p < 0.0) p += period;
  return p <= limit ? p : period - p;
}

}  // namespace

SyntheticSequence make_moving_block_sequence(const MovingBlockScene& scene, RngSeed seed) {
  if (scene.block_side == 0 || scene.block_side > scene.height || scene.block_side > scene.width) {
    throw Error(ErrorKind::kInvalidValue, "block must fit inside the frame");
  }
  Rng rng(seed);
  const Image background = make_background(scene.height, scene.width, rng);
  const double max_row = static_cast<double>(scene.height - scene.block_side);
  const double max_col = static_cast<double>(scene.width - scene.block_side);
  const double start_row = rng.uniform() * max_row;
  const double start_col = rng.uniform() * max_col;
  const double angle = 2.0 * std::numbers::pi * rng.uniform();
  const double v_row = scene.speed * std::sin(angle);
  const double v_col = scene.speed * std::cos(angle);

  SyntheticSequence seq;
  for (std::size_t t = 0; t < scene.frames; ++t) {
    const auto top = static_cast<std::size_t>(std::lround(bounce(start_row + v_row * static_cast<double>(t), max_row)));
    const auto left = static_cast<std::size_t>(std::lround(bounce(start_col + v_col * static_cast<double>(t), max_col)));
    Region box{top, left, top + scene.block_side - 1, left + scene.block_side - 1, 1.0};
    Image frame = background;
    for (std::size_t h = box.top; h <= box.bottom; ++h) {
      for (std::size_t w = box.left; w <= box.right; ++w) frame(h, w) = scene.block_value;
    }
    seq.frames.push_back(std::move(frame));
    seq.block_boxes.push_back(box);
  }
  return seq;
}

SyntheticSequence make_static_sequence(std::size_t height, std::size_t width, std::size_t frames, double value) {
  SyntheticSequence seq;
  for (std::size_t t = 0; t < frames; ++t) seq.frames.emplace_back(height, width, value);
  return seq;
}

std::vector<FrameCube> group_frames(const std::vector<Image>& frames, std::size_t grouping) {
  if (grouping == 0) throw Error(ErrorKind::kInvalidValue, "grouping must be >= 1");
  std::vector<FrameCube> groups;
  for (std::size_t g = 0; (g + 1) * grouping <= frames.size(); ++g) {
    std::vector<Image> chunk(frames.begin() + static_cast<std::ptrdiff_t>(g * grouping),
                             frames.begin() + static_cast<std::ptrdiff_t>((g + 1) * grouping));
    groups.push_back(FrameCube::from_frames(chunk));
  }
  return groups;
}

std::vector<std::vector<std::vector<std::uint8_t>>> trajectory_regions(const SyntheticSequence& sequence,
                                                                       std::size_t grouping) {
  if (sequence.frames.empty() || sequence.block_boxes.size() != sequence.frames.size()) {
    throw Error(ErrorKind::kInvalidValue, "sequence has no block trajectory");
  }
  const std::size_t height = sequence.frames.front().height();
  const std::size_t width = sequence.frames.front().width();
  std::vector<std::vector<std::vector<std::uint8_t>>> out;
  for (std::size_t g = 0; (g + 1) * grouping <= sequence.frames.size(); ++g) {
    std::vector<std::uint8_t> mask(height * width, 0);
    for (std::size_t c = 0; c < grouping; ++c) {
      const Region& box = sequence.block_boxes[g * grouping + c];
      for (std::size_t h = box.top; h <= box.bottom; ++h) {
        for (std::size_t w = box.left; w <= box.right; ++w) mask[h * width + w] = 1;
      }
    }
    out.emplace_back(grouping, mask);
  }
  return out;
}

fs::path write_synthetic_dataset(const fs::path& dir, const SyntheticSequence& sequence, const std::string& name,
                                 std::size_t grouping) {
  if (sequence.frames.empty()) throw Error(ErrorKind::kInvalidValue, "empty sequence");
  fs::create_directories(dir / "frames");
  for (std::size_t t = 0; t < sequence.frames.size(); ++t) {
    char file[32];
    std::snprintf(file, sizeof(file), "frame_%04zu.pgm", t);
    write_pgm(dir / "frames" / file, sequence.frames[t]);
  }
  DatasetManifest manifest;
  manifest.name = name;
  manifest.frame_pattern = "frames/frame_*.pgm";
  manifest.frame_count = sequence.frames.size();
  manifest.height = sequence.frames.front().height();
  manifest.width = sequence.frames.front().width();
  manifest.bit_depth = 8;
  manifest.grouping = grouping;
  const fs::path path = dir / "manifest.json";
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIoFailure, "cannot write " + path.string());
  out << manifest.to_json().dump(2) << "\n";
  return path;
}

}  // namespace sasci
