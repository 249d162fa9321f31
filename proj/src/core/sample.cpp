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
#include "glyphfuse/core/sample.hpp"

#include <cmath>
#include <string>

#include "glyphfuse/error.hpp"

namespace glyphfuse {
namespace {

bool Finite(const Quad& q) {
  for (const Point2& p : q.corners) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
  }
  return true;
}

}  // namespace

void CheckSampleInvariants(const Sample& sample) {
  if (sample.width <= 0 || sample.height <= 0) {
    throw ValidationError(ErrorCode::kInvalidValue, "width/height",
                          "image dimensions must be positive");
  }
  const double w = sample.width;
  const double h = sample.height;
  for (size_t i = 0; i < sample.text_regions.size(); ++i) {
    const TextRegion& r = sample.text_regions[i];
    const std::string field = "text_regions[" + std::to_string(i) + "]";
    if (!Finite(r.quad)) {
      throw ValidationError(ErrorCode::kInvalidQuad, field + ".quad", "non-finite coordinate");
    }
    const BBox b = r.quad.Bounds();
    if (b.x0 < 0.0 || b.y0 < 0.0 || b.x1 > w || b.y1 > h) {
      throw ValidationError(ErrorCode::kOutOfBounds, field + ".quad", "quad outside image");
    }
    if (!r.quad.IsSimple()) {
      throw ValidationError(ErrorCode::kInvalidQuad, field + ".quad", "quad is not simple");
    }
    if (!r.quad.IsClockwise()) {
      throw ValidationError(ErrorCode::kInvalidQuad, field + ".quad", "quad is not clockwise");
    }
    if (r.lines < 1) {
      throw ValidationError(ErrorCode::kInvalidValue, field + ".lines", "lines must be >= 1");
    }
    if (r.font_px < 0) {
      throw ValidationError(ErrorCode::kInvalidValue, field + ".font_px", "negative font size");
    }
    if (!std::isfinite(r.rotation_deg)) {
      throw ValidationError(ErrorCode::kInvalidValue, field + ".rotation_deg", "non-finite");
    }
  }
  for (size_t i = 0; i < sample.objects.size(); ++i) {
    const BBox& b = sample.objects[i].bbox;
    const std::string field = "objects[" + std::to_string(i) + "].bbox";
    if (!std::isfinite(b.x0) || !std::isfinite(b.y0) || !std::isfinite(b.x1) ||
        !std::isfinite(b.y1)) {
      throw ValidationError(ErrorCode::kInvalidValue, field, "non-finite coordinate");
    }
    if (!b.valid()) {
      throw ValidationError(ErrorCode::kDegenerateBBox, field, "degenerate bbox");
    }
    if (b.x0 < 0.0 || b.y0 < 0.0 || b.x1 > w || b.y1 > h) {
      throw ValidationError(ErrorCode::kOutOfBounds, field, "bbox outside image");
    }
  }
}

}  // namespace glyphfuse
