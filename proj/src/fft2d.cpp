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

#include "fft2d.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace sasci::detail {
namespace {

struct PlanCache {
  std::mutex mutex;
  std::map<std::tuple<std::size_t, std::size_t, bool>, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

fftw_plan plan_for(std::size_t height, std::size_t width, bool inverse) {
  auto& c = cache();
  std::lock_guard lock(c.mutex);
  const auto key = std::make_tuple(height, width, inverse);
  if (auto it = c.plans.find(key); it != c.plans.end()) return it->second;
  // Planning with a scratch buffer keeps the caller's data intact;
  // FFTW_UNALIGNED lets the plan run on any std::complex<double> array.
  auto* scratch = fftw_alloc_complex(height * width);
  fftw_plan plan = fftw_plan_dft_2d(static_cast<int>(height), static_cast<int>(width), scratch, scratch,
                                    inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(scratch);
  if (plan == nullptr) throw std::runtime_error("FFTW planning failed");
  c.plans.emplace(key, plan);
  return plan;
}

}  // namespace

void fft2d(std::span<std::complex<double>> data, std::size_t height, std::size_t width, bool inverse) {
  auto* buffer = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan_for(height, width, inverse), buffer, buffer);
}

}  // namespace sasci::detail
