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

#include "sasci/types.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "sasci/error.hpp"

namespace sasci {
namespace {

void require_size(const Shape& shape, std::size_t actual, const char* type) {
  if (shape.height == 0 || shape.width == 0 || shape.depth == 0) {
    throw Error(ErrorKind::kInvalidValue, std::string(type) + " needs nonzero dimensions, got " + shape.str());
  }
  if (actual != shape.size()) {
    std::ostringstream os;
    os << type << " " << shape.str() << " expects " << shape.size() << " elements, got " << actual;
    throw Error(ErrorKind::kInvalidValue, os.str());
  }
}

void require_binary(std::span<const std::uint8_t> data, const char* type) {
  std::uint8_t any = 0;
  for (std::uint8_t v : data) any |= v;
  if ((any & ~std::uint8_t{1}) == 0) return;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i] > 1) {
      throw Error(ErrorKind::kInvalidValue, std::string(type) + " element " + std::to_string(i) + " is not 0/1");
    }
  }
}

void require_unit_range(std::span<const double> data, const char* type) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double v = data[i];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      std::ostringstream os;
      os << type << " element " << i << " = " << v << " outside [0,1]";
      throw Error(ErrorKind::kInvalidValue, os.str());
    }
  }
}

}  // namespace

std::string Shape::str() const {
  std::ostringstream os;
  os << height << "x" << width << "x" << depth;
  return os.str();
}

Image::Image(std::size_t height, std::size_t width, double fill)
    : height_(height), width_(width), data_(height * width, fill) {}

Image::Image(std::size_t height, std::size_t width, std::vector<double> data)
    : height_(height), width_(width), data_(std::move(data)) {
  if (data_.size() != height * width) {
    throw Error(ErrorKind::kInvalidValue, "image data does not match " + std::to_string(height) + "x" + std::to_string(width));
  }
}

FrameCube::FrameCube(Shape shape, std::vector<double> data) : shape_(shape), data_(std::move(data)) {
  require_size(shape_, data_.size(), "FrameCube");
  require_unit_range(data_, "FrameCube");
}

FrameCube FrameCube::from_frames(const std::vector<Image>& frames) {
  if (frames.empty()) throw Error(ErrorKind::kInvalidValue, "FrameCube needs at least one frame");
  const std::size_t height = frames.front().height();
  const std::size_t width = frames.front().width();
  const std::size_t depth = frames.size();
  std::vector<double> data(height * width * depth);
  for (std::size_t c = 0; c < depth; ++c) {
    if (frames[c].height() != height || frames[c].width() != width) {
      throw Error(ErrorKind::kDimensionMismatch, "frame " + std::to_string(c) + " differs in size");
    }
    const auto plane = frames[c].data();
    for (std::size_t i = 0; i < height * width; ++i) data[i * depth + c] = plane[i];
  }
  return FrameCube(Shape{height, width, depth}, std::move(data));
}

Image FrameCube::frame(std::size_t c) const {
  Image out(shape_.height, shape_.width);
  auto plane = out.data();
  for (std::size_t i = 0; i < shape_.pixels(); ++i) plane[i] = data_[i * shape_.depth + c];
  return out;
}

MaskStack::MaskStack(Shape shape, std::vector<std::uint8_t> data) : shape_(shape), data_(std::move(data)) {
  require_size(shape_, data_.size(), "MaskStack");
  require_binary(data_, "MaskStack");
}

double MaskStack::mean() const {
  const auto ones = std::accumulate(data_.begin(), data_.end(), std::size_t{0});
  return static_cast<double>(ones) / static_cast<double>(data_.size());
}

Measurement::Measurement(std::size_t height, std::size_t width, std::vector<double> data,
                         std::size_t capture_index)
    : height_(height), width_(width), data_(std::move(data)), capture_index_(capture_index) {
  require_size(Shape{height, width, 1}, data_.size(), "Measurement");
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      throw Error(ErrorKind::kInvalidValue, "Measurement element " + std::to_string(i) + " is not finite");
    }
  }
}

SaliencyStack::SaliencyStack(Shape shape, std::vector<std::uint8_t> data)
    : shape_(shape), data_(std::move(data)) {
  require_size(shape_, data_.size(), "SaliencyStack");
  require_binary(data_, "SaliencyStack");
}

std::size_t SaliencyStack::map_area(std::size_t d) const {
  std::size_t area = 0;
  for (std::size_t i = 0; i < shape_.pixels(); ++i) area += data_[i * shape_.depth + d];
  return area;
}

ProbabilityMap::ProbabilityMap(std::size_t height, std::size_t width, std::vector<double> data,
                               std::size_t detections)
    : height_(height), width_(width), data_(std::move(data)), detections_(detections) {
  if (detections_ == 0) throw Error(ErrorKind::kInvalidValue, "ProbabilityMap needs D >= 1");
  require_size(Shape{height, width, 1}, data_.size(), "ProbabilityMap");
  require_unit_range(data_, "ProbabilityMap");
}

double ProbabilityMap::mean() const {
  return std::accumulate(data_.begin(), data_.end(), 0.0) / static_cast<double>(data_.size());
}

NoiseModel NoiseModel::gaussian(double sigma) {
  if (!std::isfinite(sigma) || sigma < 0.0) {
    throw Error(ErrorKind::kInvalidValue, "noise sigma must be finite and >= 0");
  }
  NoiseModel model;
  model.kind_ = Kind::kGaussian;
  model.sigma_ = sigma;
  return model;
}

void validate_dimensions(const FrameCube& frames, const MaskStack& masks) {
  if (frames.shape() != masks.shape()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "frames " + frames.shape().str() + " vs masks " + masks.shape().str());
  }
}

}  // namespace sasci
