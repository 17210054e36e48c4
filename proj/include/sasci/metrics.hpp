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
#include <optional>
#include <span>
#include <vector>

#include "sasci/types.hpp"

namespace sasci {

/// Reported in place of +inf when MSE < 1e-12·peak².
inline constexpr double kPsnrCap = 100.0;

double psnr(const Image& a, const Image& b, double peak);

/// Single-scale SSIM: 11×11 Gaussian window (σ = 1.5), K1 = 0.01,
/// K2 = 0.03, averaged over valid (unpadded) window positions.
double ssim(const Image& a, const Image& b, double peak);

/// PSNR over the pixels where region_mask is nonzero. Throws EmptyRegion
/// when no pixel is selected.
double region_psnr(const Image& a, const Image& b, std::span<const std::uint8_t> region_mask, double peak);

struct FrameQuality {
  std::size_t group = 0;
  std::size_t frame = 0;
  double psnr = 0.0;
  double ssim = 0.0;
  std::optional<double> region_psnr;
};

struct QualityReport {
  std::vector<FrameQuality> frames;

  struct GroupMean {
    std::size_t group = 0;
    double psnr = 0.0;
    double ssim = 0.0;
    std::optional<double> region_psnr;
  };
  std::vector<GroupMean> group_means() const;
  double mean_psnr() const;
  double mean_ssim() const;
  /// Mean over frames that carry a region value; nullopt if none do.
  std::optional<double> mean_region_psnr() const;
};

/// Per-frame metrics of one reconstructed group. `regions`, when given,
/// holds one H×W binary mask per frame for region_psnr.
std::vector<FrameQuality> evaluate_group(std::size_t group, const FrameCube& truth, const FrameCube& estimate,
                                         double peak,
                                         const std::vector<std::vector<std::uint8_t>>* regions = nullptr);

}  // namespace sasci
