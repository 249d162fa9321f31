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
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace glyphfuse {

/// Every failure the library reports carries one of these codes. The CLI
/// maps them onto process exit codes (see ExitCodeFor).
enum class ErrorCode {
  kMalformedRecord,
  kMissingField,
  kOutOfBounds,
  kDegenerateBBox,
  kInvalidQuad,
  kInvalidValue,
  kIo,
  kImageTooSmall,
  kDegeneratePlane,
  kNoFeasibleLayout,
  kTextDoesNotFit,
  kUncoveredCodepoint,
  kGlyphCollision,
  kBoundaryRingMissing,
  kNoConvergence,
  kShapeMismatch,
  kTimestepOutOfRange,
  kNoRegions,
  kUndefinedAp,
  kIdMismatch,
  kCoverageGap,
  kDivergence,
  kEmptyDataset,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised for invariant violations; `field()` names the offending field path
/// (e.g. "text_regions[2].quad").
class ValidationError : public Error {
 public:
  ValidationError(ErrorCode code, std::string field, const std::string& message)
      : Error(code, field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Solver failures carry the residual reached when giving up.
class ConvergenceError : public Error {
 public:
  ConvergenceError(double residual, int iterations)
      : Error(ErrorCode::kNoConvergence,
              "no convergence: residual " + std::to_string(residual) +
                  " after " + std::to_string(iterations) + " iterations"),
        residual_(residual),
        iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

}  // namespace glyphfuse
