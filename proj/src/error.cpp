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

#include "sasci/error.hpp"

namespace sasci {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidValue: return "InvalidValue";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kImageTooSmall: return "ImageTooSmall";
    case ErrorKind::kDegenerateMasks: return "DegenerateMasks";
    case ErrorKind::kEmptyRegion: return "EmptyRegion";
    case ErrorKind::kMissingFrame: return "MissingFrame";
    case ErrorKind::kCorruptImage: return "CorruptImage";
    case ErrorKind::kShapeMismatch: return "ShapeMismatch";
    case ErrorKind::kIoFailure: return "IoFailure";
    case ErrorKind::kSidecarMismatch: return "SidecarMismatch";
    case ErrorKind::kMismatchedRuns: return "MismatchedRuns";
    case ErrorKind::kInvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace sasci
