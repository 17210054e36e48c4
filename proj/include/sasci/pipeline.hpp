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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sasci/dataset_io.hpp"
#include "sasci/metrics.hpp"
#include "sasci/reconstruction.hpp"
#include "sasci/saliency.hpp"
#include "sasci/types.hpp"

namespace sasci {

enum class Mode { kTraditional, kAdaptive };

const char* to_string(Mode mode);
Mode mode_from_string(const std::string& name);

/// Everything one benchmark run needs. The detector's max_detections is D.
struct RunConfig {
  DatasetManifest dataset;
  Mode mode = Mode::kAdaptive;
  DetectorConfig detector;
  SolverConfig solver;
  NoiseModel noise;
  RngSeed seed{0};
  std::filesystem::path output_dir;
  /// Upper bound on concurrent reconstructions.
  std::size_t jobs = 1;
  double peak = 1.0;

  void validate() const;
  /// `dataset` may be a manifest path (relative to base_dir) or an inline
  /// manifest object. Relative output_dir is also resolved against base_dir.
  static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  static RunConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

/// Result of one policy update: the mask for group t+1 and its inputs.
struct PolicyUpdate {
  SaliencyStack saliency;
  ProbabilityMap probability;
  MaskStack next_mask;
};

/// Detect on Y(t), turn detections into probabilities, and sample the next
/// group's mask. Sees only the measurement and the mask that produced it.
PolicyUpdate update_policy(const Measurement& y, const MaskStack& masks, const DetectorConfig& detector,
                           RngSeed next_mask_seed);

/// Mask, measurement and (adaptive mode only) saliency/probability for every
/// group, produced strictly in capture order.
struct CaptureLog {
  std::vector<MaskStack> masks;
  std::vector<Measurement> measurements;
  /// probability[t] and saliency[t] generated masks[t]; empty for t = 0
  /// and in traditional mode.
  std::vector<std::optional<ProbabilityMap>> probability;
  std::vector<std::optional<SaliencyStack>> saliency;
  std::vector<std::size_t> detections;
  std::vector<std::string> warnings;
};

CaptureLog capture_sequence(const std::vector<FrameCube>& groups, const RunConfig& config);

struct GroupRecord {
  std::size_t group = 0;
  bool ok = true;
  std::string error;
  double mask_mean = 0.0;
  std::optional<double> probability_mean;
  std::optional<std::size_t> detections;
  std::size_t iterations = 0;
  std::vector<FrameQuality> frames;
};

struct RunReport {
  std::string dataset;
  Mode mode = Mode::kAdaptive;
  Algorithm algorithm = Algorithm::kGapTv;
  std::size_t detections_max = 0;
  std::uint64_t seed = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t grouping = 0;
  std::size_t measurement_count = 0;
  std::size_t dropped_frames = 0;
  nlohmann::json settings;
  std::vector<GroupRecord> groups;
  std::vector<std::string> warnings;

  QualityReport quality() const;
  nlohmann::json to_json() const;
  static RunReport from_json(const nlohmann::json& j);
  static RunReport load(const std::filesystem::path& path);
  /// One row per frame of every reconstructed group.
  std::string to_csv() const;
};

/// Reconstructions and everything that led to them, kept for persistence.
struct RunArtifacts {
  CaptureLog capture;
  std::vector<std::optional<FrameCube>> reconstructions;
};

/// Per-group, per-frame binary masks for region-restricted PSNR.
using GroupRegions = std::vector<std::vector<std::vector<std::uint8_t>>>;

/// Runs capture → reconstruction → metrics on in-memory groups in the mode
/// named by config.mode. config.dataset supplies only the report name.
RunReport run_on_groups(const std::vector<FrameCube>& groups, const RunConfig& config,
                        const GroupRegions* regions = nullptr, RunArtifacts* artifacts = nullptr,
                        std::size_t dropped_frames = 0);

/// Loads the dataset, runs in adaptive (resp. traditional) mode and, when
/// output_dir is set, writes the run directory.
RunReport run_adaptive(RunConfig config);
RunReport run_traditional(RunConfig config);

/// masks/, prob/, sal/, meas/ (f32 + PGM preview), recon/, report.json,
/// report.csv.
void write_run_outputs(const std::filesystem::path& dir, const RunReport& report, const RunArtifacts& artifacts);

struct ComparisonRow {
  std::string dataset;
  std::string group;
  double psnr_a = 0.0;
  double psnr_b = 0.0;
  double ssim_a = 0.0;
  double ssim_b = 0.0;
  double delta_psnr = 0.0;
  double delta_ssim = 0.0;
};

/// Per-group rows followed by an "average" row, deltas are B − A.
/// Throws MismatchedRuns unless both cover the same dataset and grouping.
std::vector<ComparisonRow> compare_runs(const RunReport& a, const RunReport& b);
std::string comparison_to_csv(const std::vector<ComparisonRow>& rows);

}  // namespace sasci
