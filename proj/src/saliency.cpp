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

#include "sasci/saliency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <complex>

#include "fft2d.hpp"
#include "sasci/error.hpp"
#include "sasci/forward_model.hpp"

namespace sasci {
namespace {

constexpr std::size_t kMinSide = 8;
constexpr double kLogFloor = 1e-12;

// Separable (2r+1)×(2r+1) mean filter with clamped borders.
Image box_filter_clamped(const Image& in, std::size_t radius) {
  const std::size_t height = in.height();
  const std::size_t width = in.width();
  const double norm = 1.0 / static_cast<double>(2 * radius + 1);
  const auto clamp_index = [](std::ptrdiff_t i, std::size_t n) {
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n) - 1));
  };
  const auto r = static_cast<std::ptrdiff_t>(radius);
  Image rows(height, width);
  for (std::size_t h = 0; h < height; ++h) {
    for (std::size_t w = 0; w < width; ++w) {
      double acc = 0.0;
      for (std::ptrdiff_t k = -r; k <= r; ++k) acc += in(h, clamp_index(static_cast<std::ptrdiff_t>(w) + k, width));
      rows(h, w) = acc * norm;
    }
  }
  Image out(height, width);
  for (std::size_t h = 0; h < height; ++h) {
    for (std::size_t w = 0; w < width; ++w) {
      double acc = 0.0;
      for (std::ptrdiff_t k = -r; k <= r; ++k) acc += rows(clamp_index(static_cast<std::ptrdiff_t>(h) + k, height), w);
      out(h, w) = acc * norm;
    }
  }
  return out;
}

struct Candidate {
  std::size_t top;
  std::size_t left;
  std::size_t side;
  double score;
};

std::vector<std::size_t> origins(std::size_t extent, std::size_t side, std::size_t stride) {
  std::vector<std::size_t> out;
  for (std::size_t o = 0; o + side <= extent; o += stride) out.push_back(o);
  if (out.empty() || out.back() != extent - side) out.push_back(extent - side);
  return out;
}

constexpr double kFlatTolerance = 1e-12;

}  // namespace

double intersection_over_union(const Region& a, const Region& b) {
  const std::size_t top = std::max(a.top, b.top);
  const std::size_t left = std::max(a.left, b.left);
  const std::size_t bottom = std::min(a.bottom, b.bottom);
  const std::size_t right = std::min(a.right, b.right);
  if (top > bottom || left > right) return 0.0;
  const double inter = static_cast<double>((bottom - top + 1) * (right - left + 1));
  return inter / (static_cast<double>(a.area() + b.area()) - inter);
}

void DetectorConfig::validate() const {
  if (max_detections == 0) throw Error(ErrorKind::kInvalidConfig, "detector D must be >= 1");
  if (!(nms_overlap >= 0.0 && nms_overlap < 1.0)) {
    throw Error(ErrorKind::kInvalidConfig, "nms_overlap must lie in [0,1)");
  }
  if (!(min_region_fraction >= 0.0 && min_region_fraction <= 1.0)) {
    throw Error(ErrorKind::kInvalidConfig, "min_region_fraction must lie in [0,1]");
  }
  if (!(score_threshold >= 0.0)) throw Error(ErrorKind::kInvalidConfig, "score_threshold must be >= 0");
  for (std::size_t s : scales) {
    if (s == 0) throw Error(ErrorKind::kInvalidConfig, "window scales must be >= 1");
  }
}

std::vector<std::size_t> DetectorConfig::resolved_scales(std::size_t height) const {
  if (!scales.empty()) return scales;
  std::vector<std::size_t> out;
  for (std::size_t divisor : {8, 4, 2}) out.push_back(std::max<std::size_t>(1, height / divisor));
  return out;
}

Image normalize_measurement(const Measurement& y, const MaskStack& masks) {
  if (y.height() != masks.height() || y.width() != masks.width()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "measurement " + std::to_string(y.height()) + "x" + std::to_string(y.width()) +
                    " vs masks " + masks.shape().str());
  }
  const Image exposure = effective_exposure(masks);
  Image out(y.height(), y.width());
  auto values = out.data();
  const auto r = exposure.data();
  const auto raw = y.data();
  // Unexposed pixels carry no scene information: they read 0 and stay out of
  // the min/max, so a uniform scene normalizes to all zeros whatever the mask.
  double min_value = std::numeric_limits<double>::infinity();
  double max_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (r[i] > 0.0) {
      values[i] = raw[i] / r[i];
      min_value = std::min(min_value, values[i]);
      max_value = std::max(max_value, values[i]);
    } else {
      values[i] = 0.0;
    }
  }
  // Summation order leaves a few ulps of spread on a flat scene.
  const double range = max_value - min_value;
  if (!(range > kFlatTolerance * std::max(1.0, std::abs(max_value)))) return Image(y.height(), y.width(), 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = r[i] > 0.0 ? (values[i] - min_value) / range : 0.0;
  }
  return out;
}

Image saliency_score_map(const Image& image) {
  const std::size_t height = image.height();
  const std::size_t width = image.width();
  if (height < kMinSide || width < kMinSide) {
    throw Error(ErrorKind::kImageTooSmall, "saliency needs at least 8x8, got " + std::to_string(height) +
                                               "x" + std::to_string(width));
  }
  const auto pixels = image.data();
  const auto [lo, hi] = std::minmax_element(pixels.begin(), pixels.end());
  if (!(*hi - *lo > 1e-12)) return Image(height, width, 0.0);

  const std::size_t n = height * width;
  std::vector<std::complex<double>> spectrum(n);
  for (std::size_t i = 0; i < n; ++i) spectrum[i] = pixels[i];
  detail::fft2d(spectrum, height, width, false);

  std::vector<double> log_amplitude(n);
  for (std::size_t i = 0; i < n; ++i) log_amplitude[i] = std::log(std::sqrt(std::norm(spectrum[i])) + kLogFloor);

  // 3×3 mean of the log amplitude with wrap-around, as two 1D passes.
  std::vector<std::size_t> prev_col(width), next_col(width);
  for (std::size_t v = 0; v < width; ++v) {
    prev_col[v] = (v + width - 1) % width;
    next_col[v] = (v + 1) % width;
  }
  std::vector<double> row_sum(n);
  for (std::size_t u = 0; u < height; ++u) {
    const double* row = &log_amplitude[u * width];
    for (std::size_t v = 0; v < width; ++v) row_sum[u * width + v] = row[prev_col[v]] + row[v] + row[next_col[v]];
  }

  // exp(residual)·e^{iφ} = F·exp(−local)·(|F| + floor)/|F|, which skips the
  // arg/polar round trip. A zero coefficient keeps phase 0.
  for (std::size_t u = 0; u < height; ++u) {
    const double* above = &row_sum[((u + height - 1) % height) * width];
    const double* here = &row_sum[u * width];
    const double* below = &row_sum[((u + 1) % height) * width];
    for (std::size_t v = 0; v < width; ++v) {
      const std::size_t i = u * width + v;
      const double gain = std::exp(-(above[v] + here[v] + below[v]) / 9.0);
      const double magnitude = std::sqrt(std::norm(spectrum[i]));
      spectrum[i] = magnitude > 0.0 ? spectrum[i] * (gain * (magnitude + kLogFloor) / magnitude)
                                    : std::complex<double>(gain * kLogFloor, 0.0);
    }
  }
  detail::fft2d(spectrum, height, width, true);

  const double scale = 1.0 / static_cast<double>(n);
  Image energy(height, width);
  auto e = energy.data();
  for (std::size_t i = 0; i < n; ++i) e[i] = std::norm(spectrum[i] * scale);

  Image smoothed = box_filter_clamped(energy, 2);
  auto s = smoothed.data();
  const double peak = *std::max_element(s.begin(), s.end());
  if (!(peak > 0.0)) return Image(height, width, 0.0);
  for (double& v : s) v = std::clamp(v / peak, 0.0, 1.0);
  return smoothed;
}

std::vector<Region> select_regions(const Image& score, const DetectorConfig& config) {
  config.validate();
  const std::size_t height = score.height();
  const std::size_t width = score.width();

  // Summed-area table with a zero first row and column.
  const std::size_t stride = width + 1;
  std::vector<double> integral((height + 1) * stride, 0.0);
  for (std::size_t h = 0; h < height; ++h) {
    double row = 0.0;
    for (std::size_t w = 0; w < width; ++w) {
      row += score(h, w);
      integral[(h + 1) * stride + w + 1] = integral[h * stride + w + 1] + row;
    }
  }
  const auto window_sum = [&](std::size_t top, std::size_t left, std::size_t side) {
    const std::size_t b = top + side;
    const std::size_t r = left + side;
    return integral[b * stride + r] - integral[top * stride + r] - integral[b * stride + left] +
           integral[top * stride + left];
  };

  const double min_area = config.min_region_fraction * static_cast<double>(height * width);
  std::vector<Candidate> candidates;
  for (std::size_t side : config.resolved_scales(height)) {
    if (side > height || side > width) continue;
    if (static_cast<double>(side * side) < min_area) continue;
    const std::size_t step = config.window_stride > 0 ? config.window_stride : std::max<std::size_t>(1, side / 4);
    const double inv_area = 1.0 / static_cast<double>(side * side);
    const auto rows = origins(height, side, step);
    const auto cols = origins(width, side, step);
    for (std::size_t top : rows) {
      for (std::size_t left : cols) {
        const double mean = window_sum(top, left, side) * inv_area;
        if (mean >= config.score_threshold) candidates.push_back({top, left, side, mean});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.top != b.top) return a.top < b.top;
    if (a.left != b.left) return a.left < b.left;
    return a.side < b.side;
  });

  std::vector<Region> kept;
  for (const Candidate& c : candidates) {
    if (kept.size() == config.max_detections) break;
    const Region region{c.top, c.left, c.top + c.side - 1, c.left + c.side - 1, c.score};
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const Region& k) {
      return intersection_over_union(region, k) > config.nms_overlap;
    });
    if (!suppressed) kept.push_back(region);
  }
  return kept;
}

std::vector<Region> SpectralResidualProposer::propose(const Image& normalized,
                                                      const DetectorConfig& config) const {
  return select_regions(saliency_score_map(normalized), config);
}

SaliencyStack regions_to_stack(const std::vector<Region>& regions, std::size_t height, std::size_t width,
                               std::size_t depth) {
  if (regions.size() > depth) {
    throw Error(ErrorKind::kInvalidValue, "more regions than saliency maps");
  }
  std::vector<std::uint8_t> data(height * width * depth, 0);
  for (std::size_t d = 0; d < regions.size(); ++d) {
    const Region& r = regions[d];
    if (r.bottom >= height || r.right >= width || r.top > r.bottom || r.left > r.right) {
      throw Error(ErrorKind::kInvalidValue, "region outside image bounds");
    }
    for (std::size_t h = r.top; h <= r.bottom; ++h) {
      for (std::size_t w = r.left; w <= r.right; ++w) data[(h * width + w) * depth + d] = 1;
    }
  }
  return SaliencyStack(Shape{height, width, depth}, std::move(data));
}

SaliencyStack detect(const Measurement& y, const MaskStack& masks, const DetectorConfig& config,
                     const RegionProposer& proposer) {
  config.validate();
  const Image normalized = normalize_measurement(y, masks);
  return regions_to_stack(proposer.propose(normalized, config), y.height(), y.width(), config.max_detections);
}

SaliencyStack detect(const Measurement& y, const MaskStack& masks, const DetectorConfig& config) {
  return detect(y, masks, config, SpectralResidualProposer{});
}

}  // namespace sasci
