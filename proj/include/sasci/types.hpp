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
#include <span>
#include <string>
#include <vector>

#include "sasci/rng.hpp"

namespace sasci {

/// (height, width, depth) of any of the stacked types. Depth is C for frames
/// and masks, D for saliency stacks, and 1 for planar maps.
struct Shape {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t depth = 1;

  std::size_t pixels() const { return height * width; }
  std::size_t size() const { return height * width * depth; }
  std::string str() const;

  friend bool operator==(const Shape&, const Shape&) = default;
};

/// Dense H×W real map (row-major). Used for intermediate images such as the
/// normalized measurement and saliency scores; carries no range invariant.
class Image {
 public:
  Image() = default;
  Image(std::size_t height, std::size_t width, double fill = 0.0);
  Image(std::size_t height, std::size_t width, std::vector<double> data);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return data_.size(); }

  double operator()(std::size_t h, std::size_t w) const { return data_[h * width_ + w]; }
  double& operator()(std::size_t h, std::size_t w) { return data_[h * width_ + w]; }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> data_;
};

/// H×W×C stack of luminance frames in [0,1]. Element (h, w, c) lives at
/// index (h·W + w)·C + c.
class FrameCube {
 public:
  FrameCube(Shape shape, std::vector<double> data);
  static FrameCube from_frames(const std::vector<Image>& frames);

  const Shape& shape() const { return shape_; }
  std::size_t height() const { return shape_.height; }
  std::size_t width() const { return shape_.width; }
  std::size_t depth() const { return shape_.depth; }

  double operator()(std::size_t h, std::size_t w, std::size_t c) const {
    return data_[(h * shape_.width + w) * shape_.depth + c];
  }
  std::span<const double> data() const { return data_; }
  Image frame(std::size_t c) const;

 private:
  Shape shape_;
  std::vector<double> data_;
};

/// Binary coding masks, same layout as FrameCube.
class MaskStack {
 public:
  MaskStack(Shape shape, std::vector<std::uint8_t> data);

  const Shape& shape() const { return shape_; }
  std::size_t height() const { return shape_.height; }
  std::size_t width() const { return shape_.width; }
  std::size_t depth() const { return shape_.depth; }

  std::uint8_t operator()(std::size_t h, std::size_t w, std::size_t c) const {
    return data_[(h * shape_.width + w) * shape_.depth + c];
  }
  std::span<const std::uint8_t> data() const { return data_; }
  double mean() const;

 private:
  Shape shape_;
  std::vector<std::uint8_t> data_;
};

/// One compressed snapshot. `capture_index` is the position t in the
/// measurement sequence.
class Measurement {
 public:
  Measurement(std::size_t height, std::size_t width, std::vector<double> data,
              std::size_t capture_index = 0);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t capture_index() const { return capture_index_; }

  double operator()(std::size_t h, std::size_t w) const { return data_[h * width_ + w]; }
  std::span<const double> data() const { return data_; }

 private:
  std::size_t height_;
  std::size_t width_;
  std::vector<double> data_;
  std::size_t capture_index_;
};

/// D binary detection maps. Map d is stored as channel d of the canonical
/// (row, column, channel) layout.
class SaliencyStack {
 public:
  SaliencyStack(Shape shape, std::vector<std::uint8_t> data);

  const Shape& shape() const { return shape_; }
  std::size_t height() const { return shape_.height; }
  std::size_t width() const { return shape_.width; }
  std::size_t depth() const { return shape_.depth; }

  std::uint8_t operator()(std::size_t h, std::size_t w, std::size_t d) const {
    return data_[(h * shape_.width + w) * shape_.depth + d];
  }
  std::span<const std::uint8_t> data() const { return data_; }

  /// Number of ones in map d.
  std::size_t map_area(std::size_t d) const;

 private:
  Shape shape_;
  std::vector<std::uint8_t> data_;
};

/// Per-pixel Bernoulli parameters. `detections` is the D the map was built
/// for; the floor value is 1/D.
class ProbabilityMap {
 public:
  ProbabilityMap(std::size_t height, std::size_t width, std::vector<double> data,
                 std::size_t detections);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t detections() const { return detections_; }
  double floor_value() const { return 1.0 / static_cast<double>(detections_); }

  double operator()(std::size_t h, std::size_t w) const { return data_[h * width_ + w]; }
  std::span<const double> data() const { return data_; }
  double mean() const;

 private:
  std::size_t height_;
  std::size_t width_;
  std::vector<double> data_;
  std::size_t detections_;
};

class NoiseModel {
 public:
  enum class Kind { kNone, kGaussian };

  NoiseModel() = default;
  static NoiseModel none() { return NoiseModel(); }
  static NoiseModel gaussian(double sigma);

  Kind kind() const { return kind_; }
  double sigma() const { return sigma_; }

 private:
  Kind kind_ = Kind::kNone;
  double sigma_ = 0.0;
};

/// Throws DimensionMismatch unless (H, W, C) agree exactly.
void validate_dimensions(const FrameCube& frames, const MaskStack& masks);

}  // namespace sasci
