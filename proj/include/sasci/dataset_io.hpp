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
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "sasci/types.hpp"

namespace sasci {

/// Describes a grayscale frame sequence on disk. `frame_pattern` is a path
/// relative to `base_dir` whose final component may contain `*`/`?`
/// wildcards; matches are taken in lexicographic order.
struct DatasetManifest {
  std::string name;
  std::string frame_pattern;
  std::size_t frame_count = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  int bit_depth = 8;
  std::size_t grouping = 8;
  std::filesystem::path base_dir;

  void validate() const;
  static DatasetManifest from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  static DatasetManifest load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

struct LoadedSequence {
  std::vector<FrameCube> groups;
  std::vector<std::filesystem::path> files;
  /// Trailing frames beyond ⌊T/C⌋·C that were not grouped.
  std::size_t dropped = 0;
};

/// Reads T frames, normalizes to [0,1] and groups them C at a time.
/// Errors: MissingFrame, CorruptImage, ShapeMismatch (naming the file).
LoadedSequence load_frame_sequence(const DatasetManifest& manifest);

/// An 8-bit (or 16-bit PGM) grayscale raster normalized to [0,1].
struct GrayImage {
  Image pixels;
  int bit_depth = 8;
};

/// Reads binary PGM (P5, 8 or 16 bit) or 8-bit grayscale PNG.
GrayImage read_grayscale(const std::filesystem::path& path);

/// Writes an 8-bit P5 PGM of `image`·scale, clamped to [0,255].
void write_pgm(const std::filesystem::path& path, const Image& image, double scale = 1.0);

/// Flat little-endian f32 tensor. On disk: `path` holds the raw values,
/// `path` + ".json" holds {"dims": [...], "order": "row-major", "dtype": "f32"}.
struct Tensor {
  std::vector<std::size_t> dims;
  std::vector<float> data;

  std::size_t element_count() const;
  friend bool operator==(const Tensor&, const Tensor&) = default;
};

std::filesystem::path sidecar_path(const std::filesystem::path& path);
void write_tensor(const std::filesystem::path& path, const Tensor& tensor);
/// Errors: IoFailure (missing/unreadable file or sidecar), SidecarMismatch
/// (binary length ≠ product of dims × 4, or unexpected dtype/order).
Tensor read_tensor(const std::filesystem::path& path);

Tensor to_tensor(const FrameCube& cube);
Tensor to_tensor(const MaskStack& masks);
Tensor to_tensor(const Measurement& y);
Tensor to_tensor(const SaliencyStack& saliency);
Tensor to_tensor(const ProbabilityMap& probability);

MaskStack masks_from_tensor(const Tensor& tensor);
Measurement measurement_from_tensor(const Tensor& tensor, std::size_t capture_index = 0);

}  // namespace sasci
