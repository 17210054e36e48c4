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

#include "sasci/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "sasci/error.hpp"

namespace sasci {
namespace {

constexpr std::size_t kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kK1 = 0.01;
constexpr double kK2 = 0.03;

void require_same(const Image& a, const Image& b) {
  if (a.height() != b.height() || a.width() != b.width()) {
    throw Error(ErrorKind::kDimensionMismatch, std::to_string(a.height()) + "x" + std::to_string(a.width()) +
                                                   " vs " + std::to_string(b.height()) + "x" +
                                                   std::to_string(b.width()));
  }
}

void require_peak(double peak) {
  if (!(peak > 0.0)) throw Error(ErrorKind::kInvalidValue, "peak must be > 0");
}

double psnr_from_mse(double mse, double peak) {
  const double peak2 = peak * peak;
  if (mse < 1e-12 * peak2) return kPsnrCap;
  return 10.0 * std::log10(peak2 / mse);
}

std::array<double, kWindow> gaussian_window() {
  std::array<double, kWindow> g{};
  const double center = (kWindow - 1) / 2.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < kWindow; ++i) {
    const double d = static_cast<double>(i) - center;
    g[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    sum += g[i];
  }
  for (double& v : g) v /= sum;
  return g;
}

// Valid-mode separable Gaussian filtering of a row-major plane.
std::vector<double> filter_valid(const std::vector<double>& in, std::size_t height, std::size_t width,
                                 const std::array<double, kWindow>& g) {
  const std::size_t out_w = width - kWindow + 1;
  const std::size_t out_h = height - kWindow + 1;
  std::vector<double> rows(height * out_w);
  for (std::size_t h = 0; h < height; ++h) {
    for (std::size_t w = 0; w < out_w; ++w) {
      double acc = 0.0;
      for (std::size_t k = 0; k < kWindow; ++k) acc += g[k] * in[h * width + w + k];
      rows[h * out_w + w] = acc;
    }
  }
  std::vector<double> out(out_h * out_w);
  for (std::size_t h = 0; h < out_h; ++h) {
    for (std::size_t w = 0; w < out_w; ++w) {
      double acc = 0.0;
      for (std::size_t k = 0; k < kWindow; ++k) acc += g[k] * rows[(h + k) * out_w + w];
      out[h * out_w + w] = acc;
    }
  }
  return out;
}

}  // namespace

double psnr(const Image& a, const Image& b, double peak) {
  require_same(a, b);
  require_peak(peak);
  const auto x = a.data();
  const auto y = b.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += (x[i] - y[i]) * (x[i] - y[i]);
  return psnr_from_mse(sum / static_cast<double>(x.size()), peak);
}

double region_psnr(const Image& a, const Image& b, std::span<const std::uint8_t> region_mask, double peak) {
  require_same(a, b);
  require_peak(peak);
  if (region_mask.size() != a.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "region mask size does not match image");
  }
  const auto x = a.data();
  const auto y = b.data();
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (region_mask[i] == 0) continue;
    sum += (x[i] - y[i]) * (x[i] - y[i]);
    ++count;
  }
  if (count == 0) throw Error(ErrorKind::kEmptyRegion, "region mask selects no pixel");
  return psnr_from_mse(sum / static_cast<double>(count), peak);
}

double ssim(const Image& a, const Image& b, double peak) {
  require_same(a, b);
  require_peak(peak);
  const std::size_t height = a.height();
  const std::size_t width = a.width();
  if (height < kWindow || width < kWindow) {
    throw Error(ErrorKind::kImageTooSmall, "ssim needs at least 11x11");
  }
  const auto g = gaussian_window();
  const auto x = a.data();
  const auto y = b.data();
  const std::size_t n = x.size();
  std::vector<double> xs(x.begin(), x.end()), ys(y.begin(), y.end()), xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mu_x = filter_valid(xs, height, width, g);
  const auto mu_y = filter_valid(ys, height, width, g);
  const auto e_xx = filter_valid(xx, height, width, g);
  const auto e_yy = filter_valid(yy, height, width, g);
  const auto e_xy = filter_valid(xy, height, width, g);

  const double c1 = (kK1 * peak) * (kK1 * peak);
  const double c2 = (kK2 * peak) * (kK2 * peak);
  double total = 0.0;
  for (std::size_t i = 0; i < mu_x.size(); ++i) {
    const double var_x = e_xx[i] - mu_x[i] * mu_x[i];
    const double var_y = e_yy[i] - mu_y[i] * mu_y[i];
    const double cov = e_xy[i] - mu_x[i] * mu_y[i];
    const double num = (2.0 * mu_x[i] * mu_y[i] + c1) * (2.0 * cov + c2);
    const double den = (mu_x[i] * mu_x[i] + mu_y[i] * mu_y[i] + c1) * (var_x + var_y + c2);
    total += num / den;
  }
  return total / static_cast<double>(mu_x.size());
}

std::vector<QualityReport::GroupMean> QualityReport::group_means() const {
  std::vector<GroupMean> out;
  std::vector<std::size_t> counts, region_counts;
  std::vector<double> region_sums;
  for (const FrameQuality& f : frames) {
    auto it = std::find_if(out.begin(), out.end(), [&](const GroupMean& g) { return g.group == f.group; });
    std::size_t idx;
    if (it == out.end()) {
      out.push_back(GroupMean{f.group, 0.0, 0.0, std::nullopt});
      counts.push_back(0);
      region_counts.push_back(0);
      region_sums.push_back(0.0);
      idx = out.size() - 1;
    } else {
      idx = static_cast<std::size_t>(it - out.begin());
    }
    out[idx].psnr += f.psnr;
    out[idx].ssim += f.ssim;
    ++counts[idx];
    if (f.region_psnr) {
      region_sums[idx] += *f.region_psnr;
      ++region_counts[idx];
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].psnr /= static_cast<double>(counts[i]);
    out[i].ssim /= static_cast<double>(counts[i]);
    if (region_counts[i] > 0) out[i].region_psnr = region_sums[i] / static_cast<double>(region_counts[i]);
  }
  return out;
}

double QualityReport::mean_psnr() const {
  if (frames.empty()) return 0.0;
  double sum = 0.0;
  for (const FrameQuality& f : frames) sum += f.psnr;
  return sum / static_cast<double>(frames.size());
}

double QualityReport::mean_ssim() const {
  if (frames.empty()) return 0.0;
  double sum = 0.0;
  for (const FrameQuality& f : frames) sum += f.ssim;
  return sum / static_cast<double>(frames.size());
}

std::optional<double> QualityReport::mean_region_psnr() const {
  double sum = 0.0;
  std::size_t count = 0;
  for (const FrameQuality& f : frames) {
    if (f.region_psnr) {
      sum += *f.region_psnr;
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

std::vector<FrameQuality> evaluate_group(std::size_t group, const FrameCube& truth, const FrameCube& estimate,
                                         double peak, const std::vector<std::vector<std::uint8_t>>* regions) {
  if (truth.shape() != estimate.shape()) {
    throw Error(ErrorKind::kDimensionMismatch, truth.shape().str() + " vs " + estimate.shape().str());
  }
  if (regions != nullptr && regions->size() != truth.depth()) {
    throw Error(ErrorKind::kDimensionMismatch, "need one region mask per frame");
  }
  std::vector<FrameQuality> out;
  for (std::size_t c = 0; c < truth.depth(); ++c) {
    const Image t = truth.frame(c);
    const Image e = estimate.frame(c);
    FrameQuality q{group, c, psnr(e, t, peak), ssim(e, t, peak), std::nullopt};
    if (regions != nullptr) q.region_psnr = region_psnr(e, t, (*regions)[c], peak);
    out.push_back(q);
  }
  return out;
}

}  // namespace sasci
