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

#include "sasci/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>

#include "CLI11.hpp"
#include "sasci/dataset_io.hpp"
#include "sasci/error.hpp"
#include "sasci/harness.hpp"
#include "sasci/mask_policy.hpp"
#include "sasci/pipeline.hpp"
#include "sasci/saliency.hpp"
#include "sasci/synthetic.hpp"

namespace sasci {
namespace fs = std::filesystem;

namespace {

constexpr const char* kConfigSchema = R"(run config (JSON):
  {
    "dataset": "<manifest.json path>" | {"name", "frame_pattern", "frame_count",
                                         "height", "width", "bit_depth", "grouping"},
    "mode": "adaptive" | "traditional",
    "D": 30,
    "detector": {"nms_overlap": 0.5, "min_region_fraction": 0.001,
                 "score_threshold": 0.1, "scales": [], "window_stride": 0},
    "solver": {"algorithm": "gap_tv" | "admm_tv", "outer_iterations": 100,
               "tv_weight": 0.07, "tv_inner_iterations": 5, "admm_rho": 1.0,
               "convergence_tolerance": 1e-5},
    "noise": {"kind": "none" | "gaussian", "sigma": 0.0},
    "seed": 0,
    "output_dir": "<dir>",
    "jobs": 1,
    "peak": 1.0
  }
  (full schema: schemas/config.schema.json))";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Size3 {
  std::size_t height, width, depth;
};

Size3 parse_size(const std::string& text) {
  static const std::regex pattern(R"((\d+)x(\d+)x(\d+))");
  std::smatch m;
  if (!std::regex_match(text, m, pattern)) throw UsageError("--size expects HxWxC, got '" + text + "'");
  return {std::stoul(m[1]), std::stoul(m[2]), std::stoul(m[3])};
}

std::vector<std::size_t> parse_values(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos) {
      throw UsageError("--values expects a comma-separated list of positive integers, got '" + text + "'");
    }
    out.push_back(std::stoul(item));
    if (out.back() == 0) throw UsageError("--values entries must be >= 1");
  }
  if (out.empty()) throw UsageError("--values is empty");
  return out;
}

void write_or_print(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorKind::kIoFailure, "cannot write " + path);
  file << text;
}

struct RunOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::string output_dir;
};

RunConfig load_run_config(const RunOptions& opts) {
  RunConfig config = RunConfig::load(opts.config);
  if (opts.seed) config.seed = RngSeed{*opts.seed};
  if (opts.jobs) config.jobs = *opts.jobs;
  if (!opts.output_dir.empty()) config.output_dir = opts.output_dir;
  return config;
}

void print_run_summary(const RunReport& report, const RunConfig& config, std::ostream& out, std::ostream& err) {
  for (const std::string& w : report.warnings) err << "warning: " << w << "\n";
  const QualityReport q = report.quality();
  nlohmann::json summary{{"dataset", report.dataset},
                         {"mode", to_string(report.mode)},
                         {"measurements", report.measurement_count},
                         {"mean_psnr", q.mean_psnr()},
                         {"mean_ssim", q.mean_ssim()}};
  if (!config.output_dir.empty()) summary["output_dir"] = config.output_dir.string();
  out << summary.dump(2) << "\n";
}

void add_run_options(CLI::App* cmd, RunOptions& opts) {
  cmd->add_option("config", opts.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", opts.seed, "Override the master seed");
  cmd->add_option("--jobs", opts.jobs, "Concurrent reconstructions")->check(CLI::PositiveNumber);
  cmd->add_option("-o,--output", opts.output_dir, "Override the output directory");
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Saliency-aware adaptive snapshot compressive imaging toolkit", "sasci"};
  app.require_subcommand(1);

  RunOptions adaptive_opts, traditional_opts, ablate_opts;
  auto* run_adaptive_cmd = app.add_subcommand("run-adaptive", "Capture with saliency-adapted masks and reconstruct");
  add_run_options(run_adaptive_cmd, adaptive_opts);
  auto* run_traditional_cmd = app.add_subcommand("run-traditional", "Capture with Bernoulli(0.5) masks and reconstruct");
  add_run_options(run_traditional_cmd, traditional_opts);

  std::string report_a, report_b, compare_out;
  auto* compare_cmd = app.add_subcommand("compare", "Per-group PSNR/SSIM deltas (B - A) of two report.json files");
  compare_cmd->add_option("reportA", report_a)->required()->check(CLI::ExistingFile);
  compare_cmd->add_option("reportB", report_b)->required()->check(CLI::ExistingFile);
  compare_cmd->add_option("-o,--output", compare_out, "CSV destination (default stdout)");

  std::string preview_meas, preview_masks, preview_dir = ".";
  std::size_t preview_d = 30;
  auto* preview_cmd = app.add_subcommand("saliency-preview", "Write normalized measurement, score map and regions as PGM");
  preview_cmd->add_option("measurement", preview_meas, "Measurement tensor (.f32)")->required();
  preview_cmd->add_option("masks", preview_masks, "Mask tensor (.f32)")->required();
  preview_cmd->add_option("-D", preview_d, "Maximum detections")->check(CLI::PositiveNumber);
  preview_cmd->add_option("-o,--output", preview_dir, "Output directory");

  std::string bench_size = "256x256x8", bench_out;
  std::size_t bench_iters = 1000, bench_d = 30;
  std::uint64_t bench_seed = 0;
  auto* bench_cmd = app.add_subcommand("bench", "Time the per-measurement policy update");
  bench_cmd->add_option("--size", bench_size, "HxWxC");
  bench_cmd->add_option("--iters", bench_iters, "Timed updates (>= 10)");
  bench_cmd->add_option("-D", bench_d, "Maximum detections")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench_seed);
  bench_cmd->add_option("-o,--output", bench_out, "JSON destination (default stdout)");

  std::string ablate_values = "10,20,30,40,50", ablate_out;
  std::size_t ablate_seeds = 1;
  auto* ablate_cmd = app.add_subcommand("ablate-d", "Sweep the maximum detection count D in adaptive mode");
  ablate_cmd->add_option("config", ablate_opts.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  ablate_cmd->add_option("--values", ablate_values, "Comma-separated D values");
  ablate_cmd->add_option("--seeds", ablate_seeds, "Seeds per D (master, master+1, ...)")->check(CLI::PositiveNumber);
  ablate_cmd->add_option("--seed", ablate_opts.seed, "Override the master seed");
  ablate_cmd->add_option("--jobs", ablate_opts.jobs, "Concurrent reconstructions")->check(CLI::PositiveNumber);
  ablate_cmd->add_option("-o,--output", ablate_out, "Summary CSV destination (default stdout); per-seed rows go to <out>.seeds.csv");

  std::string synth_dir, synth_size = "256x256";
  std::size_t synth_frames = 80, synth_grouping = 8, synth_block = 32;
  std::uint64_t synth_seed = 0;
  auto* synth_cmd = app.add_subcommand("make-synthetic", "Write a moving-block PGM dataset with manifest.json");
  synth_cmd->add_option("dir", synth_dir)->required();
  synth_cmd->add_option("--size", synth_size, "HxW");
  synth_cmd->add_option("--frames", synth_frames)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--grouping", synth_grouping)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--block", synth_block)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--seed", synth_seed);

  std::vector<std::string> args;
  for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    if (!subs.empty() && (subs.front() == run_adaptive_cmd || subs.front() == run_traditional_cmd ||
                          subs.front() == ablate_cmd)) {
      err << kConfigSchema << "\n";
    }
    return kExitUsage;
  }

  try {
    if (run_adaptive_cmd->parsed() || run_traditional_cmd->parsed()) {
      const bool adaptive = run_adaptive_cmd->parsed();
      const RunConfig config = load_run_config(adaptive ? adaptive_opts : traditional_opts);
      const RunReport report = adaptive ? run_adaptive(config) : run_traditional(config);
      print_run_summary(report, config, out, err);
    } else if (compare_cmd->parsed()) {
      const auto rows = compare_runs(RunReport::load(report_a), RunReport::load(report_b));
      write_or_print(compare_out, comparison_to_csv(rows), out);
    } else if (preview_cmd->parsed()) {
      const Measurement y = measurement_from_tensor(read_tensor(preview_meas));
      const MaskStack masks = masks_from_tensor(read_tensor(preview_masks));
      DetectorConfig detector;
      detector.max_detections = preview_d;
      const Image normalized = normalize_measurement(y, masks);
      const Image score = saliency_score_map(normalized);
      const auto regions = select_regions(score, detector);
      Image overlay = normalized;
      for (const Region& r : regions) {
        for (std::size_t h = r.top; h <= r.bottom; ++h) {
          for (std::size_t w = r.left; w <= r.right; ++w) {
            if (h == r.top || h == r.bottom || w == r.left || w == r.right) overlay(h, w) = 1.0;
          }
        }
      }
      fs::create_directories(preview_dir);
      write_pgm(fs::path(preview_dir) / "normalized.pgm", normalized);
      write_pgm(fs::path(preview_dir) / "score.pgm", score);
      write_pgm(fs::path(preview_dir) / "regions.pgm", overlay);
      nlohmann::json listing = nlohmann::json::array();
      for (const Region& r : regions) {
        listing.push_back({{"top", r.top}, {"left", r.left}, {"bottom", r.bottom}, {"right", r.right}, {"score", r.score}});
      }
      out << nlohmann::json{{"regions", listing}, {"output_dir", preview_dir}}.dump(2) << "\n";
    } else if (bench_cmd->parsed()) {
      const Size3 size = parse_size(bench_size);
      if (bench_iters < 10) throw UsageError("--iters must be >= 10");
      const BenchResult result = bench_policy(size.height, size.width, size.depth, bench_d, bench_iters,
                                              RngSeed{bench_seed});
      nlohmann::json j = result.to_json();
      j["machine"] = machine_info();
      write_or_print(bench_out, j.dump(2) + "\n", out);
    } else if (ablate_cmd->parsed()) {
      const auto values = parse_values(ablate_values);
      RunConfig config = load_run_config(ablate_opts);
      const LoadedSequence seq = load_frame_sequence(config.dataset);
      const auto rows = ablate_detections(seq.groups, config, values, ablate_seeds);
      write_or_print(ablate_out, ablation_summary_csv(config.dataset.name, rows), out);
      if (!ablate_out.empty()) {
        write_or_print(ablate_out + ".seeds.csv", ablation_detail_csv(config.dataset.name, rows), out);
      }
    } else if (synth_cmd->parsed()) {
      static const std::regex pattern(R"((\d+)x(\d+))");
      std::smatch m;
      if (!std::regex_match(synth_size, m, pattern)) throw UsageError("--size expects HxW, got '" + synth_size + "'");
      MovingBlockScene scene;
      scene.height = std::stoul(m[1]);
      scene.width = std::stoul(m[2]);
      scene.frames = synth_frames;
      scene.block_side = synth_block;
      const auto seq = make_moving_block_sequence(scene, RngSeed{synth_seed});
      const fs::path manifest = write_synthetic_dataset(synth_dir, seq, "synthetic", synth_grouping);
      out << manifest.string() << "\n";
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    if (e.kind() == ErrorKind::kInvalidConfig) err << kConfigSchema << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace sasci
