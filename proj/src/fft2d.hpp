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

#include <complex>
#include <cstddef>
#include <span>

namespace sasci::detail {

/// In-place unnormalized 2D complex DFT of a row-major H×W buffer, backed by
/// FFTW. Plans are created once per (H, W, direction) and shared; execution
/// is thread-safe.
void fft2d(std::span<std::complex<double>> data, std::size_t height, std::size_t width, bool inverse);

}  // namespace sasci::detail
