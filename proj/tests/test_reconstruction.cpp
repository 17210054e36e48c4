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

#include <cmath>

#include "doctest.h"
#include "sasci/error.hpp"
#include "sasci/forward_model.hpp"
#include "sasci/mask_policy.hpp"
#include "sasci/reconstruction.hpp"

using namespace sasci;

namespace {

// Isotropic TV with forward differences and Neumann boundary.
double tv_of(const Image& u) {
  double tv = 0.0;
  for (std::size_t h = 0; h < u.height(); ++h) {
    for (std::size_t w = 0; w < u.width(); ++w) {
      const double dx = w + 1 < u.width() ? u(h, w + 1) - u(h, w) : 0.0;
      const double dy = h + 1 < u.height() ? u(h + 1, w) - u(h, w) : 0.0;
      tv += std::sqrt(dx * dx + dy * dy);
    }
  }
  return tv;
}

double rof_objective(const Image& u, const Image& f, double lambda) {
  double fit = 0.0;
  for (std::size_t i = 0; i < u.data().size(); ++i) fit += (u.data()[i] - f.data()[i]) * (u.data()[i] - f.data()[i]);
  return 0.5 * fit + lambda * tv_of(u);
}

double l2(const Image& a, const Image& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) s += (a.data()[i] - b.data()[i]) * (a.data()[i] - b.data()[i]);
  return std::sqrt(s);
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

struct Instance {
  FrameCube x;
  MaskStack masks;
  Measurement y;
};

Instance random_instance(std::size_t h, std::size_t w, std::size_t c, std::uint64_t seed) {
  Rng rng(RngSeed{seed});
  std::vector<double> v(h * w * c);
  for (double& e : v) e = rng.uniform();
  FrameCube x(Shape{h, w, c}, std::move(v));
  MaskStack masks = init_mask(h, w, c, derive_seed(RngSeed{seed}, 0, SeedRole::kMask));
  Measurement y = capture(x, masks, NoiseModel::none(), RngSeed{seed});
  return {std::move(x), std::move(masks), std::move(y)};
}

Instance identity_instance() {
  Rng rng(RngSeed{5});
  std::vector<double> v(16 * 16);
  for (double& e : v) e = rng.uniform();
  FrameCube x(Shape{16, 16, 1}, v);
  MaskStack masks(Shape{16, 16, 1}, std::vector<std::uint8_t>(256, 1));
  Measurement y = capture(x, masks, NoiseModel::none(), RngSeed{0});
  return {std::move(x), std::move(masks), std::move(y)};
}

}  // namespace

TEST_CASE("tv_denoise leaves constants alone and is the identity at zero weight") {
  const Image c(12, 9, 0.37);
  const Image out = tv_denoise(c, 0.5, 30);
  for (std::size_t i = 0; i < c.data().size(); ++i) CHECK(std::abs(out.data()[i] - 0.37) < 1e-12);

  Rng rng(RngSeed{1});
  Image r(10, 10);
  for (double& v : r.data()) v = rng.uniform();
  const Image same = tv_denoise(r, 0.0, 10);
  CHECK(std::equal(r.data().begin(), r.data().end(), same.data().begin()));
}

TEST_CASE("tv_denoise cleans a noisy step edge and approaches the long-run solution") {
  Image clean(32, 32, 0.0);
  for (std::size_t h = 0; h < 32; ++h) {
    for (std::size_t w = 16; w < 32; ++w) clean(h, w) = 1.0;
  }
  Rng rng(RngSeed{77});
  Image noisy = clean;
  for (double& v : noisy.data()) v += 0.1 * rng.gaussian();

  const Image short_run = tv_denoise(noisy, 0.1, 20);
  const Image reference = tv_denoise(noisy, 0.1, 500);
  CHECK(l2(short_run, clean) < l2(noisy, clean));
  CHECK(l2(reference, clean) < l2(noisy, clean));

  const double e_noisy = rof_objective(noisy, noisy, 0.1);
  const double e_short = rof_objective(short_run, noisy, 0.1);
  const double e_ref = rof_objective(reference, noisy, 0.1);
  CHECK(e_ref <= e_short + 1e-9);
  CHECK(e_short < e_noisy);
  CHECK((e_short - e_ref) / e_ref < 0.05);
}

TEST_CASE("tv_denoise_channels treats each channel independently") {
  Rng rng(RngSeed{8});
  std::vector<double> cube(8 * 8 * 3);
  for (double& v : cube) v = rng.uniform();
  std::vector<Image> planes(3, Image(8, 8));
  for (std::size_t i = 0; i < 64; ++i) {
    for (std::size_t c = 0; c < 3; ++c) planes[c].data()[i] = cube[i * 3 + c];
  }
  tv_denoise_channels(cube, 8, 8, 3, 0.2, 15);
  for (std::size_t c = 0; c < 3; ++c) {
    const Image ref = tv_denoise(planes[c], 0.2, 15);
    for (std::size_t i = 0; i < 64; ++i) CHECK(std::abs(cube[i * 3 + c] - ref.data()[i]) < 1e-12);
  }
}

TEST_CASE("both solvers recover the identity case") {
  const Instance inst = identity_instance();
  for (Algorithm alg : {Algorithm::kGapTv, Algorithm::kAdmmTv}) {
    SolverConfig cfg;
    cfg.algorithm = alg;
    cfg.tv_weight = 1e-6;
    cfg.admm_rho = 1.0;
    const FrameCube out = reconstruct(inst.y, inst.masks, cfg);
    double diff = 0.0;
    for (std::size_t i = 0; i < 256; ++i) diff += std::pow(out.data()[i] - inst.y.data()[i], 2);
    CHECK(std::sqrt(diff) / norm(inst.y.data()) < 1e-3);
  }
}

TEST_CASE("gap_tv fits a small random instance; admm_tv reaches a comparable objective") {
  const Instance inst = random_instance(8, 8, 2, 13);
  SolverConfig cfg;
  cfg.tv_weight = 1e-4;
  cfg.outer_iterations = 100;
  cfg.convergence_tolerance = 0.0;
  SolveStats gap_stats;
  const FrameCube gap = gap_tv(inst.y, inst.masks, cfg, &gap_stats);
  CHECK(gap_stats.final_residual / norm(inst.y.data()) < 0.05);
  CHECK(data_residual(inst.y, inst.masks, gap.data()) == doctest::Approx(gap_stats.final_residual));

  SolverConfig long_cfg = cfg;
  long_cfg.outer_iterations = 1000;
  const FrameCube reference = gap_tv(inst.y, inst.masks, long_cfg);
  CHECK(data_residual(inst.y, inst.masks, reference.data()) / norm(inst.y.data()) < 0.05);

  cfg.algorithm = Algorithm::kAdmmTv;
  const FrameCube admm = admm_tv(inst.y, inst.masks, cfg);
  const double obj_gap = reconstruction_objective(inst.y, inst.masks, gap, cfg.tv_weight);
  const double obj_admm = reconstruction_objective(inst.y, inst.masks, admm, cfg.tv_weight);
  CHECK(std::abs(obj_admm - obj_gap) <= 0.05 * obj_gap);
}

TEST_CASE("degenerate masks and bad configurations are rejected") {
  const Measurement y(4, 4, std::vector<double>(16, 0.0));
  const MaskStack zeros(Shape{4, 4, 2}, std::vector<std::uint8_t>(32, 0));
  for (Algorithm alg : {Algorithm::kGapTv, Algorithm::kAdmmTv}) {
    SolverConfig cfg;
    cfg.algorithm = alg;
    try {
      (void)reconstruct(y, zeros, cfg);
      FAIL("no throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kDegenerateMasks);
    }
  }
  SolverConfig bad;
  bad.admm_rho = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad.admm_rho = -1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  SolverConfig zero_iters;
  zero_iters.outer_iterations = 0;
  CHECK_THROWS_AS(zero_iters.validate(), Error);
  CHECK(algorithm_from_string("admm_tv") == Algorithm::kAdmmTv);
  CHECK_THROWS_AS(algorithm_from_string("pnp"), Error);
}

TEST_CASE("residual halves, output is clamped and solvers are deterministic") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Instance inst = random_instance(16, 16, 4, 100 + seed);
    for (Algorithm alg : {Algorithm::kGapTv, Algorithm::kAdmmTv}) {
      SolverConfig cfg;
      cfg.algorithm = alg;
      cfg.outer_iterations = 30;
      SolveStats stats;
      const FrameCube a = reconstruct(inst.y, inst.masks, cfg, &stats);
      const FrameCube b = reconstruct(inst.y, inst.masks, cfg);
      CHECK(stats.initial_residual == doctest::Approx(norm(inst.y.data())));
      CHECK(stats.final_residual <= 0.5 * stats.initial_residual);
      CHECK(std::equal(a.data().begin(), a.data().end(), b.data().begin()));
      for (double v : a.data()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
    }
  }
}

TEST_CASE("total_variation of a ramp") {
  std::vector<double> cube(4 * 4);
  for (std::size_t h = 0; h < 4; ++h) {
    for (std::size_t w = 0; w < 4; ++w) cube[h * 4 + w] = 0.1 * w;
  }
  // Three horizontal steps of 0.1 per row, four rows.
  CHECK(total_variation(cube, 4, 4, 1) == doctest::Approx(1.2));
}
