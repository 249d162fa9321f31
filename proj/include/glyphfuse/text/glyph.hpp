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

#include <span>
#include <string_view>
#include <vector>

#include <opencv2/core.hpp>

#include "glyphfuse/core/geometry.hpp"
#include "glyphfuse/text/color.hpp"
#include "glyphfuse/text/font.hpp"

namespace glyphfuse::text {

/// Rendering style for one text region. Rotation is counter-clockwise as
/// displayed, in degrees.
struct TextStyle {
  int font_px = 24;
  double rotation_deg = 0.0;
  /// Amplitude (px) of the sinusoidal baseline displacement.
  double twist_amp = 0.0;
  bool bold = false;
  /// 1-px contrasting outline ring around the strokes.
  bool border = false;
  Rgb color{255, 255, 255};
};

constexpr int kMinFontPx = 6;

/// Wavelength of the twist displacement for a given font size.
inline double TwistWavelength(int font_px) { return 4.0 * font_px; }

/// Throws kInvalidValue when font_px < 6, |twist_amp| > 0.25 * font_px or
/// rotation is outside [-180, 180].
void CheckStyle(const TextStyle& style);

/// Rasterized text positioned in image coordinates.
struct GlyphPatch {
  cv::Mat coverage;  // CV_8UC1 anti-aliased coverage incl. any outline ring
  cv::Mat outline;   // CV_8UC1 ring coverage; all zero when border is off
  cv::Point origin;  // image position of coverage(0, 0)
  /// Rotated tight bounding quad of the strokes, clockwise from the text's
  /// own top-left corner.
  Quad effective_quad;

  cv::Rect rect() const { return {origin, coverage.size()}; }
};

/// Renders `text` (lines separated by '\n') centred on `placement`.
/// Twist is applied per column before rotation; bold is a 1-px dilation.
/// Throws kUncoveredCodepoint for glyphs missing from the font and
/// kTextDoesNotFit when the effective quad leaves `placement`.
GlyphPatch RasterizeGlyph(const FontFace& font, std::string_view text, const TextStyle& style,
                          const Quad& placement);

/// Max-composite onto a zero canvas. Throws kGlyphCollision when two
/// effective quads overlap and kOutOfBounds when a patch leaves the canvas.
cv::Mat ComposeGlyphImage(std::span<const GlyphPatch> patches, cv::Size dims);

}  // namespace glyphfuse::text
