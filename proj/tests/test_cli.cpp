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

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "sasci/cli.hpp"
#include "sasci/dataset_io.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kMicro = fs::path(SASCI_TEST_DATA_DIR) / "micro";

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "sasci");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = sasci::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

struct Scratch {
  fs::path root = fs::temp_directory_path() / ("sasci_cli_" + std::to_string(::getpid()));
  Scratch() {
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Scratch() { fs::remove_all(root); }
  std::string operator/(const std::string& name) const { return (root / name).string(); }
};

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(run({}).code == sasci::kExitUsage);
  CHECK(run({"frobnicate"}).code == sasci::kExitUsage);
  const Result missing = run({"run-adaptive", "/nonexistent/config.json"});
  CHECK(missing.code == sasci::kExitUsage);
  CHECK(missing.err.find("\"dataset\"") != std::string::npos);
  CHECK(run({"bench", "--iters", "5"}).code == sasci::kExitUsage);
  CHECK(run({"bench", "--size", "256x256"}).code == sasci::kExitUsage);
  CHECK(run({"ablate-d", (kMicro / "config.json").string(), "--values", "10,0"}).code == sasci::kExitUsage);
  CHECK(run({"--help"}).code == sasci::kExitOk);
}

TEST_CASE("runtime failures exit 2") {
  Scratch s;
  std::ofstream(s / "bad.json") << nlohmann::json{{"dataset", (kMicro / "manifest.json").string()}, {"D", 0}}.dump();
  const Result bad = run({"run-adaptive", s / "bad.json"});
  CHECK(bad.code == sasci::kExitFailure);
  CHECK(bad.err.find("InvalidConfig") != std::string::npos);
  std::ofstream(s / "missing.json") << R"({"dataset": "nowhere/manifest.json"})";
  CHECK(run({"run-traditional", s / "missing.json"}).code == sasci::kExitFailure);
}

TEST_CASE("run, compare and preview on the micro dataset") {
  Scratch s;
  const std::string config = (kMicro / "config.json").string();
  const Result a = run({"run-adaptive", config, "-o", s / "a"});
  REQUIRE(a.code == sasci::kExitOk);
  const auto summary = nlohmann::json::parse(a.out);
  CHECK(summary["measurements"] == 4);
  CHECK(summary["mode"] == "adaptive");

  REQUIRE(run({"run-adaptive", config, "-o", s / "a2", "--jobs", "1"}).code == sasci::kExitOk);
  for (const fs::path rel : {"report.csv", "masks/t0003.f32", "meas/t0002.f32", "prob/t0001.f32"}) {
    CHECK_MESSAGE(slurp(fs::path(s / "a") / rel) == slurp(fs::path(s / "a2") / rel), rel);
  }
  REQUIRE(run({"run-adaptive", config, "-o", s / "a3", "--seed", "8"}).code == sasci::kExitOk);
  CHECK(slurp(fs::path(s / "a") / "masks/t0001.f32") != slurp(fs::path(s / "a3") / "masks/t0001.f32"));
  CHECK(nlohmann::json::parse(slurp(fs::path(s / "a3") / "report.json"))["seed"] == 8);

  REQUIRE(run({"run-traditional", config, "-o", s / "t"}).code == sasci::kExitOk);
  CHECK(!fs::exists(fs::path(s / "t") / "prob" / "t0001.f32"));

  const Result self = run({"compare", s / "a/report.json", s / "a/report.json"});
  REQUIRE(self.code == sasci::kExitOk);
  std::istringstream rows(self.out);
  std::string line;
  std::getline(rows, line);
  CHECK(line == "dataset,group,psnr_a,psnr_b,ssim_a,ssim_b,delta_psnr,delta_ssim");
  std::size_t n = 0;
  while (std::getline(rows, line)) {
    ++n;
    CHECK(line.substr(line.size() - 18) == ",0.000000,0.000000");
  }
  CHECK(n == 5);
  CHECK(run({"compare", s / "t/report.json", s / "a/report.json", "-o", s / "cmp.csv"}).code == sasci::kExitOk);
  CHECK(line_count(slurp(s / "cmp.csv")) == 6);

  REQUIRE(run({"run-adaptive", config, "-o", s / "b"}).code == sasci::kExitOk);
  auto other = nlohmann::json::parse(slurp(fs::path(s / "b") / "report.json"));
  other["groups"].erase(0);
  std::ofstream(s / "short.json") << other.dump();
  CHECK(run({"compare", s / "a/report.json", s / "short.json"}).code == sasci::kExitFailure);

  const Result preview = run({"saliency-preview", s / "a/meas/t0001.f32", s / "a/masks/t0001.f32", "-D", "5",
                              "-o", s / "preview"});
  REQUIRE(preview.code == sasci::kExitOk);
  CHECK(nlohmann::json::parse(preview.out)["regions"].size() <= 5);
  for (const char* f : {"normalized.pgm", "score.pgm", "regions.pgm"}) {
    CHECK(sasci::read_grayscale(fs::path(s / "preview") / f).pixels.height() == 32);
  }
  CHECK(run({"saliency-preview", s / "a/meas/t0001.f32", s / "nothing.f32"}).code == sasci::kExitFailure);
}

TEST_CASE("ablate-d and make-synthetic") {
  Scratch s;
  const Result r = run({"ablate-d", (kMicro / "config.json").string(), "--values", "2,5", "--seeds", "2", "-o",
                        s / "abl.csv"});
  REQUIRE(r.code == sasci::kExitOk);
  const std::string summary = slurp(s / "abl.csv");
  CHECK(summary.rfind("D,dataset,seeds,mean_psnr,mean_ssim\n", 0) == 0);
  CHECK(line_count(summary) == 3);
  CHECK(line_count(slurp(s / "abl.csv.seeds.csv")) == 5);

  const Result synth = run({"make-synthetic", s / "syn", "--size", "24x40", "--frames", "12", "--grouping", "4",
                            "--block", "6"});
  REQUIRE(synth.code == sasci::kExitOk);
  const auto manifest = sasci::DatasetManifest::load(fs::path(s / "syn") / "manifest.json");
  CHECK(manifest.frame_count == 12);
  const auto seq = sasci::load_frame_sequence(manifest);
  CHECK(seq.groups.size() == 3);
  CHECK(seq.groups[0].width() == 40);
}

TEST_CASE("bench accounting and stability") {
  const auto bench = [](const std::string& iters) {
    // Full-size updates keep each run well above scheduler noise.
    const Result r = run({"bench", "--size", "256x256x8", "--iters", iters, "-D", "30", "--seed", "3"});
    REQUIRE(r.code == sasci::kExitOk);
    return nlohmann::json::parse(r.out);
  };
  const auto j = bench("60");
  CHECK(j["fps"].get<double>() > 0.0);
  CHECK(j["iterations"] == 60);
  CHECK(j["fps"].get<double>() == doctest::Approx(60.0 / j["total_seconds"].get<double>()).epsilon(1e-9));
  double parts = 0.0;
  for (const auto& [k, v] : j["breakdown_us"].items()) parts += v.get<double>();
  CHECK(parts <= 1.1 * j["mean_latency_us"].get<double>());
  CHECK(parts >= 0.5 * j["mean_latency_us"].get<double>());
  CHECK(j["machine"].contains("cpu"));

  const auto k = bench("120");
  const double ratio = k["mean_latency_us"].get<double>() / j["mean_latency_us"].get<double>();
  CHECK(ratio > 0.8);
  CHECK(ratio < 1.2);
}
