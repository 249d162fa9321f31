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

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <opencv2/core.hpp>

namespace cv::freetype {
class FreeType2;
}

namespace glyphfuse::text {

/// Decodes UTF-8; throws kInvalidValue on malformed input.
std::vector<char32_t> DecodeUtf8(std::string_view text);

/// Glyph outline bounds in font units (from the `glyf` table).
struct GlyphBox {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;
  int y_max = 0;
};

/// Read-only view over the sfnt tables we need: character coverage (`cmap`),
/// advance widths (`hmtx`), outline bounds (`glyf`) and vertical metrics.
class FontMetrics {
 public:
  explicit FontMetrics(std::vector<std::uint8_t> data);

  int units_per_em() const { return units_per_em_; }
  int ascender() const { return ascender_; }
  int descender() const { return descender_; }
  int line_gap() const { return line_gap_; }

  /// 0 when the font has no glyph for `cp`.
  int GlyphIndex(char32_t cp) const;
  bool Covers(char32_t cp) const { return GlyphIndex(cp) != 0; }
  int AdvanceWidth(int glyph) const;
  /// Empty for glyphs without contours (e.g. space).
  std::optional<GlyphBox> Bounds(int glyph) const;

 private:
  std::uint16_t U16(size_t off) const;
  std::int16_t S16(size_t off) const;
  std::uint32_t U32(size_t off) const;
  size_t Table(const char tag[4]) const;
  void ParseCmap();

  std::vector<std::uint8_t> data_;
  int units_per_em_ = 0;
  int ascender_ = 0;
  int descender_ = 0;
  int line_gap_ = 0;
  int num_glyphs_ = 0;
  int num_hmetrics_ = 0;
  int loca_format_ = 0;
  size_t hmtx_ = 0;
  size_t loca_ = 0;
  size_t glyf_ = 0;
  size_t cmap_subtable_ = 0;
  int cmap_format_ = 0;
};

/// A scalable font loaded from disk. Metrics queries are lock-free; line
/// rendering is serialized internally so one face can be shared by workers.
class FontFace {
 public:
  explicit FontFace(const std::filesystem::path& path);
  ~FontFace();
  FontFace(const FontFace&) = delete;
  FontFace& operator=(const FontFace&) = delete;

  const std::filesystem::path& path() const { return path_; }
  const FontMetrics& metrics() const { return metrics_; }

  /// Throws kUncoveredCodepoint naming the first codepoint without a glyph.
  void CheckCoverage(std::string_view text) const;

  /// Sum of advance widths in pixels at `font_px` (em size).
  double AdvancePx(std::string_view text, int font_px) const;
  double AscentPx(int font_px) const;
  double DescentPx(int font_px) const;
  /// Baseline-to-baseline distance in pixels.
  int LinePitchPx(int font_px) const;

  /// Draws one anti-aliased line with its baseline at `baseline` onto an
  /// 8-bit single-channel canvas (max-composite).
  void RenderLine(cv::Mat& canvas, std::string_view text, cv::Point baseline, int font_px) const;

 private:
  std::filesystem::path path_;
  FontMetrics metrics_;
  mutable std::mutex render_mutex_;
  cv::Ptr<cv::freetype::FreeType2> renderer_;
};

/// Absolute path of the bundled default font.
std::filesystem::path DefaultFontPath();

}  // namespace glyphfuse::text
