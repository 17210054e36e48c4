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
#include <span>
#include <string>
#include <vector>

#include "sasci/types.hpp"

namespace sasci {

enum class Algorithm { kGapTv, kAdmmTv };

const char* to_string(Algorithm algorithm);
Algorithm algorithm_from_string(const std::string& name);

struct SolverConfig {
  Algorithm algorithm = Algorithm::kGapTv;
  std::size_t outer_iterations = 100;
  /// λ, on the [0,1] intensity scale.
  double tv_weight = 0.07;
  std::size_t tv_inner_iterations = 5;
  /// ρ, used by ADMM-TV only.
  double admm_rho = 1.0;
  /// Early stop once the relative change of ‖y − Ax‖ drops below this.
  double convergence_tolerance = 1e-5;

  /// Throws InvalidConfig on zero iterations, λ < 0 or ρ ≤ 0.
  void validate() const;
};

/// Approximate minimizer of ½‖u − f‖² + λ·TV(u) (isotropic TV, Neumann
/// boundary) by projected gradient on the dual field with step 1/8.
Image tv_denoise(const Image& image, double weight, std::size_t iterations);

/// Same as tv_denoise, applied independently to each channel of a cube in
/// canonical (row, column, channel) layout. Operates in place.
void tv_denoise_channels(std::span<double> cube, std::size_t height, std::size_t width,
                         std::size_t depth, double weight, std::size_t iterations);

/// Scratch buffers reused across repeated tv_denoise_channels calls.
struct TvWorkspace {
  std::vector<double> f, px, py, g;
};

void tv_denoise_channels(std::span<double> cube, std::size_t height, std::size_t width,
                         std::size_t depth, double weight, std::size_t iterations, TvWorkspace& workspace);

/// Isotropic TV summed over channels, forward differences.
double total_variation(std::span<const double> cube, std::size_t height, std::size_t width,
                       std::size_t depth);

/// ½‖y − A x‖² + λ·TV(x).
double reconstruction_objective(const Measurement& y, const MaskStack& masks, const FrameCube& x,
                                double tv_weight);

/// ‖y − A x‖₂.
double data_residual(const Measurement& y, const MaskStack& masks, std::span<const double> x);

struct SolveStats {
  std::size_t iterations = 0;
  double initial_residual = 0.0;
  double final_residual = 0.0;
};

FrameCube gap_tv(const Measurement& y, const MaskStack& masks, const SolverConfig& config,
                 SolveStats* stats = nullptr);
FrameCube admm_tv(const Measurement& y, const MaskStack& masks, const SolverConfig& config,
                  SolveStats* stats = nullptr);

/// Dispatches on config.algorithm.
FrameCube reconstruct(const Measurement& y, const MaskStack& masks, const SolverConfig& config,
                      SolveStats* stats = nullptr);

}  // namespace sasci
