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
#include <string>
#include <vector>

#include "json.hpp"
#include "sasci/pipeline.hpp"
#include "sasci/rng.hpp"

namespace sasci {

/// Timing of the per-measurement policy update (normalize → score → select
/// → probability → sample). Stage times are means per update.
struct BenchResult {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t depth = 0;
  std::size_t detections = 0;
  std::size_t iterations = 0;
  double total_seconds = 0.0;
  double fps = 0.0;
  double mean_latency_us = 0.0;
  double p95_latency_us = 0.0;
  double normalize_us = 0.0;
  double score_us = 0.0;
  double select_us = 0.0;
  double probability_us = 0.0;
  double sample_us = 0.0;

  nlohmann::json to_json() const;
};

/// Throws InvalidValue when iterations < 10.
BenchResult bench_policy(std::size_t height, std::size_t width, std::size_t depth, std::size_t detections,
                         std::size_t iterations, RngSeed seed);

/// Host description recorded next to throughput numbers.
nlohmann::json machine_info();

struct AblationRow {
  std::size_t detections = 0;
  std::uint64_t seed = 0;
  double mean_psnr = 0.0;
  double mean_ssim = 0.0;
  std::optional<double> mean_region_psnr;
};

/// Adaptive runs over every (D, seed) pair, seeds being base.seed,
/// base.seed + 1, …
std::vector<AblationRow> ablate_detections(const std::vector<FrameCube>& groups, const RunConfig& base,
                                           const std::vector<std::size_t>& values, std::size_t seed_count,
                                           const GroupRegions* regions = nullptr);

/// One row per D value, averaged over seeds.
std::string ablation_summary_csv(const std::string& dataset, const std::vector<AblationRow>& rows);
std::string ablation_detail_csv(const std::string& dataset, const std::vector<AblationRow>& rows);

}  // namespace sasci
