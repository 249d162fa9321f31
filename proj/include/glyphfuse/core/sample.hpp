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

#include <optional>
#include <string>
#include <vector>

#include "glyphfuse/core/geometry.hpp"

namespace glyphfuse {

/// One word-level text annotation: the content t_j and its glyph region.
struct TextRegion {
  std::string text;
  Quad quad;
  int font_px = 0;
  double rotation_deg = 0.0;
  int lines = 1;
  bool bold = false;
  bool border = false;

  friend bool operator==(const TextRegion&, const TextRegion&) = default;
};

struct ObjectBox {
  std::string category;
  BBox bbox;

  friend bool operator==(const ObjectBox&, const ObjectBox&) = default;
};

/// One dataset record. `width`/`height` are the pixel dimensions of the
/// referenced image; all geometry is checked against them.
struct Sample {
  std::string id;
  std::string image_ref;
  std::string depth_ref;
  std::string glyph_ref;
  std::string font;
  int width = 0;
  int height = 0;
  std::string caption;
  std::vector<TextRegion> text_regions;
  std::vector<ObjectBox> objects;

  friend bool operator==(const Sample&, const Sample&) = default;
};

/// Throws ValidationError naming the first field that breaks a structural
/// invariant (bounds, degenerate boxes, non-simple quads).
void CheckSampleInvariants(const Sample& sample);

}  // namespace glyphfuse
