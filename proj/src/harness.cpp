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

#include "sasci/harness.hpp"

#include <sys/utsname.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "sasci/error.hpp"
#include "sasci/forward_model.hpp"
#include "sasci/mask_policy.hpp"
#include "sasci/saliency.hpp"
#include "sasci/synthetic.hpp"

namespace sasci {
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::size_t kBenchInputs = 4;
constexpr std::size_t kWarmup = 3;

double micros(Clock::duration d) { return std::chrono::duration<double, std::micro>(d).count(); }

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

json BenchResult::to_json() const {
  return json{{"size", {{"height", height}, {"width", width}, {"depth", depth}}},
              {"D", detections},
              {"iterations", iterations},
              {"total_seconds", total_seconds},
              {"fps", fps},
              {"mean_latency_us", mean_latency_us},
              {"p95_latency_us", p95_latency_us},
              {"breakdown_us",
               {{"normalize", normalize_us},
                {"score", score_us},
                {"select", select_us},
                {"probability", probability_us},
                {"sample", sample_us}}}};
}

BenchResult bench_policy(std::size_t height, std::size_t width, std::size_t depth, std::size_t detections,
                         std::size_t iterations, RngSeed seed) {
  if (iterations < 10) throw Error(ErrorKind::kInvalidValue, "bench needs at least 10 iterations");
  MovingBlockScene scene;
  scene.height = height;
  scene.width = width;
  scene.frames = depth * kBenchInputs;
  scene.block_side = std::max<std::size_t>(1, std::min(height, width) / 8);
  const SyntheticSequence seq = make_moving_block_sequence(scene, derive_seed(seed, 0, SeedRole::kScene));
  const auto groups = group_frames(seq.frames, depth);

  std::vector<MaskStack> masks;
  std::vector<Measurement> measurements;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    masks.push_back(init_mask(height, width, depth, derive_seed(seed, i, SeedRole::kMask)));
    measurements.push_back(capture(groups[i], masks.back(), NoiseModel::none(), RngSeed{0}, i));
  }

  DetectorConfig detector;
  detector.max_detections = detections;
  BenchResult result{height, width, depth, detections, iterations};
  std::vector<double> latencies;
  latencies.reserve(iterations);
  double stage[5] = {0, 0, 0, 0, 0};
  std::size_t checksum = 0;

  for (std::size_t it = 0; it < kWarmup + iterations; ++it) {
    const std::size_t k = it % groups.size();
    const auto t0 = Clock::now();
    const Image normalized = normalize_measurement(measurements[k], masks[k]);
    const auto t1 = Clock::now();
    const Image score = saliency_score_map(normalized);
    const auto t2 = Clock::now();
    const auto regions = select_regions(score, detector);
    const auto t3 = Clock::now();
    const ProbabilityMap p = probability_from_saliency(regions_to_stack(regions, height, width, detections));
    const auto t4 = Clock::now();
    const MaskStack next = sample_mask(p, depth, derive_seed(seed, it, SeedRole::kBench));
    const auto t5 = Clock::now();
    checksum += next.data()[0] + regions.size();
    if (it < kWarmup) continue;
    stage[0] += micros(t1 - t0);
    stage[1] += micros(t2 - t1);
    stage[2] += micros(t3 - t2);
    stage[3] += micros(t4 - t3);
    stage[4] += micros(t5 - t4);
    latencies.push_back(micros(t5 - t0));
  }
  (void)checksum;

  double total_us = 0.0;
  for (double l : latencies) total_us += l;
  const double n = static_cast<double>(iterations);
  result.total_seconds = total_us * 1e-6;
  result.fps = n / result.total_seconds;
  result.mean_latency_us = total_us / n;
  std::vector<double> sorted = latencies;
  std::sort(sorted.begin(), sorted.end());
  const auto p95_index = static_cast<std::size_t>(std::ceil(0.95 * n)) - 1;
  result.p95_latency_us = sorted[std::min(p95_index, sorted.size() - 1)];
  result.normalize_us = stage[0] / n;
  result.score_us = stage[1] / n;
  result.select_us = stage[2] / n;
  result.probability_us = stage[3] / n;
  result.sample_us = stage[4] / n;
  return result;
}

json machine_info() {
  json info{{"hardware_threads", std::thread::hardware_concurrency()}};
  utsname u{};
  if (uname(&u) == 0) {
    info["system"] = u.sysname;
    info["release"] = u.release;
    info["machine"] = u.machine;
  }
  std::ifstream cpuinfo("/proc/cpuinfo");
  for (std::string line; std::getline(cpuinfo, line);) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) info["cpu"] = line.substr(colon + 2);
      break;
    }
  }
  return info;
}

std::vector<AblationRow> ablate_detections(const std::vector<FrameCube>& groups, const RunConfig& base,
                                           const std::vector<std::size_t>& values, std::size_t seed_count,
                                           const GroupRegions* regions) {
  if (values.empty() || seed_count == 0) throw Error(ErrorKind::kInvalidValue, "ablation needs D values and seeds");
  std::vector<AblationRow> rows;
  for (std::size_t d : values) {
    for (std::size_t s = 0; s < seed_count; ++s) {
      RunConfig config = base;
      config.mode = Mode::kAdaptive;
      config.detector.max_detections = d;
      config.seed = RngSeed{base.seed.value + s};
      const RunReport report = run_on_groups(groups, config, regions);
      const QualityReport q = report.quality();
      rows.push_back(AblationRow{d, config.seed.value, q.mean_psnr(), q.mean_ssim(), q.mean_region_psnr()});
    }
  }
  return rows;
}

std::string ablation_summary_csv(const std::string& dataset, const std::vector<AblationRow>& rows) {
  std::map<std::size_t, std::vector<const AblationRow*>> by_d;
  for (const AblationRow& r : rows) by_d[r.detections].push_back(&r);
  std::ostringstream os;
  os << "D,dataset,seeds,mean_psnr,mean_ssim\n";
  for (const auto& [d, group] : by_d) {
    double psnr = 0.0, ssim = 0.0;
    for (const AblationRow* r : group) {
      psnr += r->mean_psnr;
      ssim += r->mean_ssim;
    }
    const double k = static_cast<double>(group.size());
    os << d << ',' << dataset << ',' << group.size() << ',' << format_number(psnr / k) << ','
       << format_number(ssim / k) << '\n';
  }
  return os.str();
}

std::string ablation_detail_csv(const std::string& dataset, const std::vector<AblationRow>& rows) {
  std::ostringstream os;
  os << "D,dataset,seed,mean_psnr,mean_ssim,mean_region_psnr\n";
  for (const AblationRow& r : rows) {
    os << r.detections << ',' << dataset << ',' << r.seed << ',' << format_number(r.mean_psnr) << ','
       << format_number(r.mean_ssim) << ',' << (r.mean_region_psnr ? format_number(*r.mean_region_psnr) : "")
       << '\n';
  }
  return os.str();
}

}  // namespace sasci
