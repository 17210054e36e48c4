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

#include "sasci/reconstruction.hpp"

#include <algorithm>
#include <cmath>

#include "sasci/error.hpp"
#include "sasci/forward_model.hpp"

namespace sasci {
namespace {

constexpr double kDualStep = 1.0 / 8.0;

void require_match(const Measurement& y, const MaskStack& masks) {
  if (y.height() != masks.height() || y.width() != masks.width()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "measurement " + std::to_string(y.height()) + "x" + std::to_string(y.width()) +
                    " vs masks " + masks.shape().str());
  }
}

std::vector<double> exposure_of(const MaskStack& masks) {
  const Image r = effective_exposure(masks);
  const auto values = r.data();
  if (std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; })) {
    throw Error(ErrorKind::kDegenerateMasks, "mask stack " + masks.shape().str() + " has no active entry");
  }
  return {values.begin(), values.end()};
}

double norm2(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

// y − A·x, written into `out`.
void residual_into(const Measurement& y, const MaskStack& masks, std::span<const double> x,
                   std::vector<double>& out) {
  const std::size_t depth = masks.depth();
  const auto a = masks.data();
  const auto yv = y.data();
  out.resize(yv.size());
  for (std::size_t i = 0; i < yv.size(); ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < depth; ++c) acc += a[i * depth + c] * x[i * depth + c];
    out[i] = yv[i] - acc;
  }
}

// x += Aᵀ(v ⊘ divisor).
void add_adjoint_scaled(std::span<double> x, const MaskStack& masks, std::span<const double> v,
                        std::span<const double> divisor) {
  const std::size_t depth = masks.depth();
  const auto a = masks.data();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double step = v[i] / divisor[i];
    for (std::size_t c = 0; c < depth; ++c) x[i * depth + c] += a[i * depth + c] * step;
  }
}

FrameCube clamp_to_cube(std::vector<double> x, const Shape& shape) {
  for (double& v : x) v = std::clamp(v, 0.0, 1.0);
  return FrameCube(shape, std::move(x));
}

bool converged(double previous, double current, double tolerance) {
  if (!(previous > 0.0)) return false;
  return std::abs(previous - current) / previous < tolerance;
}

}  // namespace

const char* to_string(Algorithm algorithm) {
  return algorithm == Algorithm::kGapTv ? "gap_tv" : "admm_tv";
}

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "gap_tv") return Algorithm::kGapTv;
  if (name == "admm_tv") return Algorithm::kAdmmTv;
  throw Error(ErrorKind::kInvalidConfig, "unknown algorithm '" + name + "' (expected gap_tv or admm_tv)");
}

void SolverConfig::validate() const {
  if (outer_iterations == 0) throw Error(ErrorKind::kInvalidConfig, "outer_iterations must be >= 1");
  if (tv_inner_iterations == 0) throw Error(ErrorKind::kInvalidConfig, "tv_inner_iterations must be >= 1");
  if (!(tv_weight >= 0.0) || !std::isfinite(tv_weight)) {
    throw Error(ErrorKind::kInvalidConfig, "tv_weight must be finite and >= 0");
  }
  if (!(admm_rho > 0.0) || !std::isfinite(admm_rho)) {
    throw Error(ErrorKind::kInvalidConfig, "admm_rho must be finite and > 0");
  }
  if (!(convergence_tolerance >= 0.0)) throw Error(ErrorKind::kInvalidConfig, "convergence_tolerance must be >= 0");
}

void tv_denoise_channels(std::span<double> cube, std::size_t height, std::size_t width, std::size_t depth,
                         double weight, std::size_t iterations) {
  TvWorkspace workspace;
  tv_denoise_channels(cube, height, width, depth, weight, iterations, workspace);
}

void tv_denoise_channels(std::span<double> cube, std::size_t height, std::size_t width, std::size_t depth,
                         double weight, std::size_t iterations, TvWorkspace& ws) {
  if (weight == 0.0 || iterations == 0) return;
  const std::size_t n = cube.size();
  const std::size_t row = width * depth;
  ws.f.assign(cube.begin(), cube.end());
  ws.px.assign(n, 0.0);
  ws.py.assign(n, 0.0);
  ws.g.resize(n);
  const double* f = ws.f.data();
  double* px = ws.px.data();
  double* py = ws.py.data();
  double* g = ws.g.data();
  const double inv_weight = 1.0 / weight;

  // div p; p vanishes on the last column and row, so backward differences
  // only need the first column and row treated separately.
  const auto divergence_into = [&](double* out) {
    for (std::size_t h = 0; h < height; ++h) {
      const std::size_t base = h * row;
      for (std::size_t j = 0; j < row; ++j) out[base + j] = px[base + j] + py[base + j];
      for (std::size_t j = depth; j < row; ++j) out[base + j] -= px[base + j - depth];
      if (h > 0) {
        for (std::size_t j = 0; j < row; ++j) out[base + j] -= py[base + j - row];
      }
    }
  };

  const auto step = [&](std::size_t i, double gx, double gy) {
    const double qx = px[i] + kDualStep * gx;
    const double qy = py[i] + kDualStep * gy;
    const double scale = std::max(1.0, std::sqrt(qx * qx + qy * qy));
    px[i] = qx / scale;
    py[i] = qy / scale;
  };

  for (std::size_t it = 0; it < iterations; ++it) {
    divergence_into(g);
    for (std::size_t i = 0; i < n; ++i) g[i] -= f[i] * inv_weight;
    for (std::size_t h = 0; h < height; ++h) {
      const std::size_t base = h * row;
      const bool last_row = h + 1 == height;
      for (std::size_t j = 0; j + depth < row; ++j) {
        const std::size_t i = base + j;
        step(i, g[i + depth] - g[i], last_row ? 0.0 : g[i + row] - g[i]);
      }
      for (std::size_t j = row - depth; j < row; ++j) {
        const std::size_t i = base + j;
        step(i, 0.0, last_row ? 0.0 : g[i + row] - g[i]);
      }
    }
  }
  divergence_into(g);
  for (std::size_t i = 0; i < n; ++i) cube[i] = f[i] - weight * g[i];
}

Image tv_denoise(const Image& image, double weight, std::size_t iterations) {
  if (iterations == 0) throw Error(ErrorKind::kInvalidValue, "tv_denoise needs at least one iteration");
  if (!(weight >= 0.0)) throw Error(ErrorKind::kInvalidValue, "tv_denoise weight must be >= 0");
  Image out = image;
  tv_denoise_channels(out.data(), image.height(), image.width(), 1, weight, iterations);
  return out;
}

double total_variation(std::span<const double> cube, std::size_t height, std::size_t width, std::size_t depth) {
  const std::size_t row = width * depth;
  double tv = 0.0;
  for (std::size_t h = 0; h < height; ++h) {
    for (std::size_t w = 0; w < width; ++w) {
      for (std::size_t c = 0; c < depth; ++c) {
        const std::size_t i = h * row + w * depth + c;
        const double gx = w + 1 < width ? cube[i + depth] - cube[i] : 0.0;
        const double gy = h + 1 < height ? cube[i + row] - cube[i] : 0.0;
        tv += std::sqrt(gx * gx + gy * gy);
      }
    }
  }
  return tv;
}

double data_residual(const Measurement& y, const MaskStack& masks, std::span<const double> x) {
  require_match(y, masks);
  std::vector<double> r;
  residual_into(y, masks, x, r);
  return norm2(r);
}

double reconstruction_objective(const Measurement& y, const MaskStack& masks, const FrameCube& x,
                                double tv_weight) {
  const double r = data_residual(y, masks, x.data());
  return 0.5 * r * r + tv_weight * total_variation(x.data(), x.height(), x.width(), x.depth());
}

FrameCube gap_tv(const Measurement& y, const MaskStack& masks, const SolverConfig& config, SolveStats* stats) {
  config.validate();
  require_match(y, masks);
  std::vector<double> exposure = exposure_of(masks);
  for (double& r : exposure) r = std::max(r, 1.0);

  const Shape shape = masks.shape();
  std::vector<double> x(shape.size(), 0.0);
  add_adjoint_scaled(x, masks, y.data(), exposure);

  std::vector<double> residual;
  residual_into(y, masks, x, residual);
  double previous = norm2(residual);
  TvWorkspace workspace;
  std::size_t it = 0;
  while (it < config.outer_iterations) {
    ++it;
    add_adjoint_scaled(x, masks, residual, exposure);
    tv_denoise_channels(x, shape.height, shape.width, shape.depth, config.tv_weight, config.tv_inner_iterations, workspace);
    residual_into(y, masks, x, residual);
    const double current = norm2(residual);
    const bool done = converged(previous, current, config.convergence_tolerance);
    previous = current;
    if (done) break;
  }
  if (stats != nullptr) {
    stats->iterations = it;
    stats->initial_residual = norm2(y.data());
    stats->final_residual = previous;
  }
  return clamp_to_cube(std::move(x), shape);
}

FrameCube admm_tv(const Measurement& y, const MaskStack& masks, const SolverConfig& config, SolveStats* stats) {
  config.validate();
  require_match(y, masks);
  const std::vector<double> exposure = exposure_of(masks);
  std::vector<double> floored(exposure), damped(exposure);
  for (double& r : floored) r = std::max(r, 1.0);
  for (double& r : damped) r += config.admm_rho;

  const Shape shape = masks.shape();
  std::vector<double> z(shape.size(), 0.0);
  add_adjoint_scaled(z, masks, y.data(), floored);
  std::vector<double> u(shape.size(), 0.0), x(shape.size()), residual;

  residual_into(y, masks, z, residual);
  double previous = norm2(residual);
  const double weight = config.tv_weight / config.admm_rho;
  TvWorkspace workspace;
  std::size_t it = 0;
  while (it < config.outer_iterations) {
    ++it;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = z[i] - u[i];
    residual_into(y, masks, x, residual);
    add_adjoint_scaled(x, masks, residual, damped);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = x[i] + u[i];
    tv_denoise_channels(z, shape.height, shape.width, shape.depth, weight, config.tv_inner_iterations, workspace);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += x[i] - z[i];
    residual_into(y, masks, z, residual);
    const double current = norm2(residual);
    const bool done = converged(previous, current, config.convergence_tolerance);
    previous = current;
    if (done) break;
  }
  if (stats != nullptr) {
    stats->iterations = it;
    stats->initial_residual = norm2(y.data());
    stats->final_residual = previous;
  }
  return clamp_to_cube(std::move(z), shape);
}

FrameCube reconstruct(const Measurement& y, const MaskStack& masks, const SolverConfig& config,
                      SolveStats* stats) {
  return config.algorithm == Algorithm::kGapTv ? gap_tv(y, masks, config, stats)
                                                : admm_tv(y, masks, config, stats);
}

}  // namespace sasci
