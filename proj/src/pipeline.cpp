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

#include "sasci/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "sasci/error.hpp"
#include "sasci/forward_model.hpp"
#include "sasci/mask_policy.hpp"

namespace sasci {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string group_file(std::size_t t, const char* suffix) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "t%04zu%s", t, suffix);
  return buf;
}

json detector_to_json(const DetectorConfig& d) {
  return json{{"nms_overlap", d.nms_overlap},
              {"min_region_fraction", d.min_region_fraction},
              {"score_threshold", d.score_threshold},
              {"scales", d.scales},
              {"window_stride", d.window_stride}};
}

json solver_to_json(const SolverConfig& s) {
  return json{{"algorithm", to_string(s.algorithm)},
              {"outer_iterations", s.outer_iterations},
              {"tv_weight", s.tv_weight},
              {"tv_inner_iterations", s.tv_inner_iterations},
              {"admm_rho", s.admm_rho},
              {"convergence_tolerance", s.convergence_tolerance}};
}

json noise_to_json(const NoiseModel& n) {
  return json{{"kind", n.kind() == NoiseModel::Kind::kNone ? "none" : "gaussian"}, {"sigma", n.sigma()}};
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::vector<std::optional<FrameCube>> reconstruct_all(const CaptureLog& log, const SolverConfig& solver,
                                                      std::size_t jobs, std::vector<std::string>& errors,
                                                      std::vector<std::size_t>& iterations) {
  const std::size_t count = log.measurements.size();
  std::vector<std::optional<FrameCube>> out(count);
  errors.assign(count, {});
  iterations.assign(count, 0);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t t = next++; t < count; t = next++) {
      try {
        SolveStats stats;
        out[t] = reconstruct(log.measurements[t], log.masks[t], solver, &stats);
        iterations[t] = stats.iterations;
      } catch (const Error& e) {
        errors[t] = e.what();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(count, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIoFailure, "cannot write " + path.string());
  out << text;
}

}  // namespace

const char* to_string(Mode mode) { return mode == Mode::kAdaptive ? "adaptive" : "traditional"; }

Mode mode_from_string(const std::string& name) {
  if (name == "adaptive") return Mode::kAdaptive;
  if (name == "traditional") return Mode::kTraditional;
  throw Error(ErrorKind::kInvalidConfig, "unknown mode '" + name + "' (expected adaptive or traditional)");
}

void RunConfig::validate() const {
  detector.validate();
  solver.validate();
  if (mode == Mode::kAdaptive && detector.max_detections < 1) {
    throw Error(ErrorKind::kInvalidConfig, "adaptive mode needs D >= 1");
  }
  if (!(peak > 0.0)) throw Error(ErrorKind::kInvalidConfig, "peak must be > 0");
}

RunConfig RunConfig::from_json(const json& j, const fs::path& base_dir) {
  RunConfig c;
  try {
    const json& ds = j.at("dataset");
    if (ds.is_string()) {
      fs::path p = ds.get<std::string>();
      c.dataset = DatasetManifest::load(p.is_absolute() ? p : base_dir / p);
    } else {
      c.dataset = DatasetManifest::from_json(ds, base_dir);
    }
    c.mode = mode_from_string(j.value("mode", std::string("adaptive")));
    c.detector.max_detections = j.value("D", std::size_t{30});
    if (j.contains("detector")) {
      const json& d = j.at("detector");
      c.detector.nms_overlap = d.value("nms_overlap", c.detector.nms_overlap);
      c.detector.min_region_fraction = d.value("min_region_fraction", c.detector.min_region_fraction);
      c.detector.score_threshold = d.value("score_threshold", c.detector.score_threshold);
      c.detector.scales = d.value("scales", c.detector.scales);
      c.detector.window_stride = d.value("window_stride", c.detector.window_stride);
    }
    if (j.contains("solver")) {
      const json& s = j.at("solver");
      c.solver.algorithm = algorithm_from_string(s.value("algorithm", std::string("gap_tv")));
      c.solver.outer_iterations = s.value("outer_iterations", c.solver.outer_iterations);
      c.solver.tv_weight = s.value("tv_weight", c.solver.tv_weight);
      c.solver.tv_inner_iterations = s.value("tv_inner_iterations", c.solver.tv_inner_iterations);
      c.solver.admm_rho = s.value("admm_rho", c.solver.admm_rho);
      c.solver.convergence_tolerance = s.value("convergence_tolerance", c.solver.convergence_tolerance);
    }
    if (j.contains("noise")) {
      const json& n = j.at("noise");
      const std::string kind = n.value("kind", std::string("none"));
      if (kind == "gaussian") {
        c.noise = NoiseModel::gaussian(n.value("sigma", 0.0));
      } else if (kind != "none") {
        throw Error(ErrorKind::kInvalidConfig, "unknown noise kind '" + kind + "'");
      }
    }
    c.seed = RngSeed{j.value("seed", std::uint64_t{0})};
    if (j.contains("output_dir")) {
      fs::path out = j.at("output_dir").get<std::string>();
      c.output_dir = out.is_absolute() ? out : base_dir / out;
    }
    c.jobs = j.value("jobs", std::size_t{1});
    c.peak = j.value("peak", 1.0);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kInvalidConfig, std::string("run config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig RunConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIoFailure, "cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kInvalidConfig, path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

json RunConfig::to_json() const {
  json j{{"dataset", dataset.to_json()},
         {"mode", to_string(mode)},
         {"D", detector.max_detections},
         {"detector", detector_to_json(detector)},
         {"solver", solver_to_json(solver)},
         {"noise", noise_to_json(noise)},
         {"seed", seed.value},
         {"jobs", jobs},
         {"peak", peak}};
  if (!output_dir.empty()) j["output_dir"] = output_dir.string();
  return j;
}

PolicyUpdate update_policy(const Measurement& y, const MaskStack& masks, const DetectorConfig& detector,
                           RngSeed next_mask_seed) {
  SaliencyStack saliency = detect(y, masks, detector);
  ProbabilityMap probability = probability_from_saliency(saliency);
  MaskStack next = sample_mask(probability, masks.depth(), next_mask_seed);
  return PolicyUpdate{std::move(saliency), std::move(probability), std::move(next)};
}

CaptureLog capture_sequence(const std::vector<FrameCube>& groups, const RunConfig& config) {
  if (groups.empty()) throw Error(ErrorKind::kInvalidValue, "no groups to capture");
  const Shape shape = groups.front().shape();
  CaptureLog log;
  log.masks.push_back(init_mask(shape.height, shape.width, shape.depth, derive_seed(config.seed, 0, SeedRole::kMask)));
  log.probability.emplace_back();
  log.saliency.emplace_back();
  log.detections.push_back(0);
  for (std::size_t t = 0; t < groups.size(); ++t) {
    if (groups[t].shape() != shape) {
      throw Error(ErrorKind::kShapeMismatch, "group " + std::to_string(t) + " is " + groups[t].shape().str());
    }
    log.measurements.push_back(
        capture(groups[t], log.masks[t], config.noise, derive_seed(config.seed, t, SeedRole::kNoise), t));
    if (t + 1 == groups.size()) break;
    const RngSeed next_seed = derive_seed(config.seed, t + 1, SeedRole::kMask);
    if (config.mode == Mode::kTraditional) {
      log.masks.push_back(init_mask(shape.height, shape.width, shape.depth, next_seed));
      log.probability.emplace_back();
      log.saliency.emplace_back();
      log.detections.push_back(0);
      continue;
    }
    PolicyUpdate update = update_policy(log.measurements[t], log.masks[t], config.detector, next_seed);
    const std::size_t found = count_nonempty_maps(update.saliency);
    if (found == 1) {
      log.warnings.push_back("group " + std::to_string(t + 1) + ": a single detection out of D=" +
                             std::to_string(config.detector.max_detections) +
                             " gives a uniform 1/D probability map");
    }
    log.masks.push_back(std::move(update.next_mask));
    log.probability.emplace_back(std::move(update.probability));
    log.saliency.emplace_back(std::move(update.saliency));
    log.detections.push_back(found);
  }
  return log;
}

QualityReport RunReport::quality() const {
  QualityReport q;
  for (const GroupRecord& g : groups) q.frames.insert(q.frames.end(), g.frames.begin(), g.frames.end());
  return q;
}

json RunReport::to_json() const {
  const QualityReport q = quality();
  json group_array = json::array();
  const auto means = q.group_means();
  for (const GroupRecord& g : groups) {
    json frames = json::array();
    for (const FrameQuality& f : g.frames) {
      frames.push_back({{"frame", f.frame}, {"psnr", f.psnr}, {"ssim", f.ssim}, {"region_psnr", optional_json(f.region_psnr)}});
    }
    json entry{{"group", g.group},
               {"status", g.ok ? "ok" : "failed"},
               {"error", g.ok ? json(nullptr) : json(g.error)},
               {"mask_mean", g.mask_mean},
               {"probability_mean", optional_json(g.probability_mean)},
               {"detections", g.detections ? json(*g.detections) : json(nullptr)},
               {"iterations", g.iterations},
               {"psnr", nullptr},
               {"ssim", nullptr},
               {"region_psnr", nullptr},
               {"frames", frames}};
    auto it = std::find_if(means.begin(), means.end(), [&](const auto& m) { return m.group == g.group; });
    if (g.ok && it != means.end()) {
      entry["psnr"] = it->psnr;
      entry["ssim"] = it->ssim;
      entry["region_psnr"] = optional_json(it->region_psnr);
    }
    group_array.push_back(entry);
  }
  return json{{"schema_version", 1},
              {"dataset", dataset},
              {"mode", to_string(mode)},
              {"algorithm", to_string(algorithm)},
              {"D", detections_max},
              {"seed", seed},
              {"height", height},
              {"width", width},
              {"grouping", grouping},
              {"measurement_count", measurement_count},
              {"dropped_frames", dropped_frames},
              {"settings", settings},
              {"groups", group_array},
              {"mean_psnr", q.frames.empty() ? json(nullptr) : json(q.mean_psnr())},
              {"mean_ssim", q.frames.empty() ? json(nullptr) : json(q.mean_ssim())},
              {"mean_region_psnr", optional_json(q.mean_region_psnr())},
              {"warnings", warnings}};
}

RunReport RunReport::from_json(const json& j) {
  RunReport r;
  try {
    r.dataset = j.at("dataset").get<std::string>();
    r.mode = mode_from_string(j.at("mode").get<std::string>());
    r.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
    r.detections_max = j.at("D").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.height = j.at("height").get<std::size_t>();
    r.width = j.at("width").get<std::size_t>();
    r.grouping = j.at("grouping").get<std::size_t>();
    r.measurement_count = j.at("measurement_count").get<std::size_t>();
    r.dropped_frames = j.at("dropped_frames").get<std::size_t>();
    r.settings = j.value("settings", json::object());
    r.warnings = j.value("warnings", std::vector<std::string>{});
    for (const json& g : j.at("groups")) {
      GroupRecord rec;
      rec.group = g.at("group").get<std::size_t>();
      rec.ok = g.at("status").get<std::string>() == "ok";
      if (!rec.ok) rec.error = g.at("error").get<std::string>();
      rec.mask_mean = g.at("mask_mean").get<double>();
      if (!g.at("probability_mean").is_null()) rec.probability_mean = g.at("probability_mean").get<double>();
      if (!g.at("detections").is_null()) rec.detections = g.at("detections").get<std::size_t>();
      rec.iterations = g.at("iterations").get<std::size_t>();
      for (const json& f : g.at("frames")) {
        FrameQuality q{rec.group, f.at("frame").get<std::size_t>(), f.at("psnr").get<double>(),
                       f.at("ssim").get<double>(), std::nullopt};
        if (!f.at("region_psnr").is_null()) q.region_psnr = f.at("region_psnr").get<double>();
        rec.frames.push_back(q);
      }
      r.groups.push_back(std::move(rec));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kInvalidConfig, std::string("report: ") + e.what());
  }
  return r;
}

RunReport RunReport::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIoFailure, "cannot open report " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kInvalidConfig, path.string() + ": " + e.what());
  }
  return from_json(j);
}

std::string RunReport::to_csv() const {
  std::ostringstream os;
  os << "dataset,mode,algorithm,group,frame,psnr,ssim,region_psnr\n";
  for (const GroupRecord& g : groups) {
    for (const FrameQuality& f : g.frames) {
      os << dataset << ',' << to_string(mode) << ',' << to_string(algorithm) << ',' << g.group << ','
         << f.frame << ',' << format_number(f.psnr) << ',' << format_number(f.ssim) << ','
         << (f.region_psnr ? format_number(*f.region_psnr) : std::string()) << '\n';
    }
  }
  return os.str();
}

RunReport run_on_groups(const std::vector<FrameCube>& groups, const RunConfig& config, const GroupRegions* regions,
                        RunArtifacts* artifacts, std::size_t dropped_frames) {
  config.validate();
  if (regions != nullptr && regions->size() != groups.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "need region masks for every group");
  }
  CaptureLog log = capture_sequence(groups, config);
  std::vector<std::string> errors;
  std::vector<std::size_t> iterations;
  auto recon = reconstruct_all(log, config.solver, config.jobs, errors, iterations);

  RunReport report;
  report.dataset = config.dataset.name;
  report.mode = config.mode;
  report.algorithm = config.solver.algorithm;
  report.detections_max = config.detector.max_detections;
  report.seed = config.seed.value;
  report.height = groups.front().height();
  report.width = groups.front().width();
  report.grouping = groups.front().depth();
  report.measurement_count = log.measurements.size();
  report.dropped_frames = dropped_frames;
  report.settings = json{{"solver", solver_to_json(config.solver)},
                         {"detector", detector_to_json(config.detector)},
                         {"detector_backend", "spectral_residual"},
                         {"noise", noise_to_json(config.noise)},
                         {"tv", "2d_per_frame"},
                         {"ssim", "gaussian11_sigma1.5_valid"},
                         {"psnr_cap_db", kPsnrCap},
                         {"peak", config.peak}};
  report.warnings = log.warnings;
  for (std::size_t t = 0; t < groups.size(); ++t) {
    GroupRecord rec;
    rec.group = t;
    rec.mask_mean = log.masks[t].mean();
    if (log.probability[t]) {
      rec.probability_mean = log.probability[t]->mean();
      rec.detections = log.detections[t];
    }
    rec.iterations = iterations[t];
    if (!recon[t]) {
      rec.ok = false;
      rec.error = errors[t];
      report.warnings.push_back("group " + std::to_string(t) + " skipped: " + errors[t]);
    } else {
      rec.frames = evaluate_group(t, groups[t], *recon[t], config.peak, regions != nullptr ? &(*regions)[t] : nullptr);
    }
    report.groups.push_back(std::move(rec));
  }
  if (artifacts != nullptr) {
    artifacts->capture = std::move(log);
    artifacts->reconstructions = std::move(recon);
  }
  return report;
}

namespace {

RunReport run_mode(RunConfig config, Mode mode) {
  config.mode = mode;
  const LoadedSequence seq = load_frame_sequence(config.dataset);
  RunArtifacts artifacts;
  RunReport report = run_on_groups(seq.groups, config, nullptr, &artifacts, seq.dropped);
  if (!config.output_dir.empty()) write_run_outputs(config.output_dir, report, artifacts);
  return report;
}

}  // namespace

RunReport run_adaptive(RunConfig config) { return run_mode(std::move(config), Mode::kAdaptive); }
RunReport run_traditional(RunConfig config) { return run_mode(std::move(config), Mode::kTraditional); }

void write_run_outputs(const fs::path& dir, const RunReport& report, const RunArtifacts& artifacts) {
  const CaptureLog& log = artifacts.capture;
  for (const char* sub : {"masks", "prob", "sal", "meas", "recon"}) fs::create_directories(dir / sub);
  for (std::size_t t = 0; t < log.measurements.size(); ++t) {
    write_tensor(dir / "masks" / group_file(t, ".f32"), to_tensor(log.masks[t]));
    write_tensor(dir / "meas" / group_file(t, ".f32"), to_tensor(log.measurements[t]));
    const Measurement& y = log.measurements[t];
    write_pgm(dir / "meas" / group_file(t, ".pgm"),
              Image(y.height(), y.width(), std::vector<double>(y.data().begin(), y.data().end())),
              1.0 / static_cast<double>(log.masks[t].depth()));
    if (log.probability[t]) write_tensor(dir / "prob" / group_file(t, ".f32"), to_tensor(*log.probability[t]));
    if (log.saliency[t]) write_tensor(dir / "sal" / group_file(t, ".f32"), to_tensor(*log.saliency[t]));
    if (t < artifacts.reconstructions.size() && artifacts.reconstructions[t]) {
      const FrameCube& x = *artifacts.reconstructions[t];
      for (std::size_t c = 0; c < x.depth(); ++c) {
        char name[64];
        std::snprintf(name, sizeof(name), "t%04zu_c%zu.pgm", t, c);
        write_pgm(dir / "recon" / name, x.frame(c));
      }
    }
  }
  write_text(dir / "report.json", report.to_json().dump(2) + "\n");
  write_text(dir / "report.csv", report.to_csv());
}

std::vector<ComparisonRow> compare_runs(const RunReport& a, const RunReport& b) {
  if (a.dataset != b.dataset || a.grouping != b.grouping || a.groups.size() != b.groups.size() ||
      a.height != b.height || a.width != b.width) {
    throw Error(ErrorKind::kMismatchedRuns, "reports cover different datasets or groupings (" + a.dataset + ", " +
                                                std::to_string(a.groups.size()) + " groups vs " + b.dataset + ", " +
                                                std::to_string(b.groups.size()) + " groups)");
  }
  const auto means_a = a.quality().group_means();
  const auto means_b = b.quality().group_means();
  std::vector<ComparisonRow> rows;
  ComparisonRow avg{a.dataset, "average"};
  std::size_t n = 0;
  for (const auto& ma : means_a) {
    auto it = std::find_if(means_b.begin(), means_b.end(), [&](const auto& mb) { return mb.group == ma.group; });
    if (it == means_b.end()) continue;
    ComparisonRow row{a.dataset, std::to_string(ma.group), ma.psnr, it->psnr, ma.ssim, it->ssim,
                      it->psnr - ma.psnr, it->ssim - ma.ssim};
    avg.psnr_a += row.psnr_a;
    avg.psnr_b += row.psnr_b;
    avg.ssim_a += row.ssim_a;
    avg.ssim_b += row.ssim_b;
    ++n;
    rows.push_back(row);
  }
  if (n > 0) {
    const double k = static_cast<double>(n);
    avg.psnr_a /= k;
    avg.psnr_b /= k;
    avg.ssim_a /= k;
    avg.ssim_b /= k;
    avg.delta_psnr = avg.psnr_b - avg.psnr_a;
    avg.delta_ssim = avg.ssim_b - avg.ssim_a;
  }
  rows.push_back(avg);
  return rows;
}

std::string comparison_to_csv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream os;
  os << "dataset,group,psnr_a,psnr_b,ssim_a,ssim_b,delta_psnr,delta_ssim\n";
  for (const ComparisonRow& r : rows) {
    os << r.dataset << ',' << r.group << ',' << format_number(r.psnr_a) << ',' << format_number(r.psnr_b) << ','
       << format_number(r.ssim_a) << ',' << format_number(r.ssim_b) << ',' << format_number(r.delta_psnr) << ','
       << format_number(r.delta_ssim) << '\n';
  }
  return os.str();
}

}  // namespace sasci
