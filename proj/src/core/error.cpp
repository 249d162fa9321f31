/* Copyright 2026 The glyphfuse Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "glyphfuse/error.hpp"

namespace glyphfuse {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedRecord: return "malformed record";
    case ErrorCode::kMissingField: return "missing field";
    case ErrorCode::kOutOfBounds: return "out of bounds";
    case ErrorCode::kDegenerateBBox: return "degenerate bbox";
    case ErrorCode::kInvalidQuad: return "invalid quad";
    case ErrorCode::kInvalidValue: return "invalid value";
    case ErrorCode::kIo: return "i/o failure";
    case ErrorCode::kImageTooSmall: return "image too small";
    case ErrorCode::kDegeneratePlane: return "degenerate plane";
    case ErrorCode::kNoFeasibleLayout: return "no feasible layout";
    case ErrorCode::kTextDoesNotFit: return "text does not fit";
    case ErrorCode::kUncoveredCodepoint: return "uncovered codepoint";
    case ErrorCode::kGlyphCollision: return "glyph collision";
    case ErrorCode::kBoundaryRingMissing: return "boundary ring missing";
    case ErrorCode::kNoConvergence: return "no convergence";
    case ErrorCode::kShapeMismatch: return "shape mismatch";
    case ErrorCode::kTimestepOutOfRange: return "timestep out of range";
    case ErrorCode::kNoRegions: return "no regions";
    case ErrorCode::kUndefinedAp: return "undefined AP";
    case ErrorCode::kIdMismatch: return "id mismatch";
    case ErrorCode::kCoverageGap: return "coverage gap";
    case ErrorCode::kDivergence: return "divergence";
    case ErrorCode::kEmptyDataset: return "no samples produced";
  }
  return "unknown";
}

}  // namespace glyphfuse
