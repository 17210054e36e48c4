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
#include <vector>

#include "sasci/types.hpp"

namespace sasci {

/// Inclusive pixel bounds of a detected window plus its mean saliency.
struct Region {
  std::size_t top = 0;
  std::size_t left = 0;
  std::size_t bottom = 0;
  std::size_t right = 0;
  double score = 0.0;

  std::size_t height() const { return bottom - top + 1; }
  std::size_t width() const { return right - left + 1; }
  std::size_t area() const { return height() * width(); }
  bool contains(std::size_t row, std::size_t col) const {
    return row >= top && row <= bottom && col >= left && col <= right;
  }
};

double intersection_over_union(const Region& a, const Region& b);

struct DetectorConfig {
  /// D, the maximum number of detections.
  std::size_t max_detections = 30;
  /// Largest IoU allowed between two kept regions.
  double nms_overlap = 0.5;
  /// Windows smaller than this fraction of H·W are never proposed.
  double min_region_fraction = 0.001;
  /// Windows whose mean score falls below this are discarded.
  double score_threshold = 0.1;
  /// Square window sides in pixels; empty means {H/8, H/4, H/2}.
  std::vector<std::size_t> scales;
  /// Step between candidate origins; 0 means a quarter of the window side.
  std::size_t window_stride = 0;

  /// Throws InvalidConfig on D = 0, nms_overlap outside [0,1) or a
  /// negative threshold.
  void validate() const;
  std::vector<std::size_t> resolved_scales(std::size_t height) const;
};

/// ŷ = y / max(R, 1) (zero where R = 0), min-max rescaled to [0,1]. A
/// constant image maps to all zeros.
Image normalize_measurement(const Measurement& y, const MaskStack& masks);

/// Spectral-residual saliency scaled to [0,1]. The 3×3 average of the log
/// amplitude spectrum wraps around (the spectrum is periodic); the final
/// 5×5 smoothing clamps at the borders. Throws ImageTooSmall below 8×8.
Image saliency_score_map(const Image& image);

/// Greedy window selection on a score map: candidates at every configured
/// scale ranked by mean score (ties: smaller top, then left, then side),
/// kept while IoU with every kept region stays within nms_overlap.
std::vector<Region> select_regions(const Image& score, const DetectorConfig& config);

/// Produces candidate regions from a normalized measurement. The default
/// implementation is spectral residual + select_regions; a trained
/// objectness backend can be substituted behind this interface.
class RegionProposer {
 public:
  virtual ~RegionProposer() = default;
  virtual std::vector<Region> propose(const Image& normalized, const DetectorConfig& config) const = 0;
};

class SpectralResidualProposer final : public RegionProposer {
 public:
  std::vector<Region> propose(const Image& normalized, const DetectorConfig& config) const override;
};

/// One binary map per region, zero-padded to depth D.
SaliencyStack regions_to_stack(const std::vector<Region>& regions, std::size_t height,
                               std::size_t width, std::size_t depth);

SaliencyStack detect(const Measurement& y, const MaskStack& masks, const DetectorConfig& config);
SaliencyStack detect(const Measurement& y, const MaskStack& masks, const DetectorConfig& config,
                     const RegionProposer& proposer);

}  // namespace sasci
