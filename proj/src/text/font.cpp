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
#include "glyphfuse/text/font.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <opencv2/freetype.hpp>
#include <opencv2/imgproc.hpp>

#include "glyphfuse/error.hpp"

#ifndef GLYPHFUSE_DATA_DIR
#define GLYPHFUSE_DATA_DIR "data"
#endif

namespace glyphfuse::text {

std::vector<char32_t> DecodeUtf8(std::string_view text) {
  std::vector<char32_t> out;
  size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    int extra = 0;
    char32_t cp = 0;
    if (lead < 0x80) {
      cp = lead;
    } else if ((lead & 0xE0) == 0xC0) {
      extra = 1;
      cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
      extra = 2;
      cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
      extra = 3;
      cp = lead & 0x07;
    } else {
      throw Error(ErrorCode::kInvalidValue, "malformed UTF-8");
    }
    if (i + extra >= text.size()) {
      throw Error(ErrorCode::kInvalidValue, "truncated UTF-8 sequence");
    }
    for (int k = 1; k <= extra; ++k) {
      const auto c = static_cast<unsigned char>(text[i + k]);
      if ((c & 0xC0) != 0x80) throw Error(ErrorCode::kInvalidValue, "malformed UTF-8");
      cp = (cp << 6) | (c & 0x3F);
    }
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

FontMetrics::FontMetrics(std::vector<std::uint8_t> data) : data_(std::move(data)) {
  if (data_.size() < 12) throw Error(ErrorCode::kInvalidValue, "font file too short");
  const size_t head = Table("head");
  const size_t hhea = Table("hhea");
  const size_t maxp = Table("maxp");
  hmtx_ = Table("hmtx");
  loca_ = Table("loca");
  glyf_ = Table("glyf");
  units_per_em_ = U16(head + 18);
  loca_format_ = S16(head + 50);
  ascender_ = S16(hhea + 4);
  descender_ = S16(hhea + 6);
  line_gap_ = S16(hhea + 8);
  num_hmetrics_ = U16(hhea + 34);
  num_glyphs_ = U16(maxp + 4);
  if (units_per_em_ <= 0 || num_hmetrics_ <= 0) {
    throw Error(ErrorCode::kInvalidValue, "font header is inconsistent");
  }
  ParseCmap();
}

std::uint16_t FontMetrics::U16(size_t off) const {
  if (off + 2 > data_.size()) throw Error(ErrorCode::kInvalidValue, "font table overrun");
  return static_cast<std::uint16_t>(data_[off] << 8 | data_[off + 1]);
}

std::int16_t FontMetrics::S16(size_t off) const { return static_cast<std::int16_t>(U16(off)); }

std::uint32_t FontMetrics::U32(size_t off) const {
  return static_cast<std::uint32_t>(U16(off)) << 16 | U16(off + 2);
}

size_t FontMetrics::Table(const char tag[4]) const {
  const int num_tables = U16(4);
  for (int i = 0; i < num_tables; ++i) {
    const size_t rec = 12 + 16 * static_cast<size_t>(i);
    if (rec + 16 > data_.size()) break;
    if (std::memcmp(&data_[rec], tag, 4) == 0) return U32(rec + 8);
  }
  throw Error(ErrorCode::kInvalidValue, std::string("font lacks table ") + std::string(tag, 4));
}

void FontMetrics::ParseCmap() {
  const size_t cmap = Table("cmap");
  const int count = U16(cmap + 2);
  size_t best = 0;
  int best_rank = -1;
  for (int i = 0; i < count; ++i) {
    const size_t rec = cmap + 4 + 8 * static_cast<size_t>(i);
    const int platform = U16(rec);
    const int encoding = U16(rec + 2);
    const size_t sub = cmap + U32(rec + 4);
    const int format = U16(sub);
    int rank = -1;
    if (format == 12 && (platform == 0 || (platform == 3 && encoding == 10))) rank = 2;
    if (format == 4 && (platform == 0 || (platform == 3 && encoding == 1))) rank = 1;
    if (rank > best_rank) {
      best_rank = rank;
      best = sub;
    }
  }
  if (best_rank < 0) throw Error(ErrorCode::kInvalidValue, "font has no Unicode cmap");
  cmap_subtable_ = best;
  cmap_format_ = U16(best);
}

int FontMetrics::GlyphIndex(char32_t cp) const {
  const size_t sub = cmap_subtable_;
  if (cmap_format_ == 12) {
    const std::uint32_t groups = U32(sub + 12);
    for (std::uint32_t g = 0; g < groups; ++g) {
      const size_t rec = sub + 16 + 12 * static_cast<size_t>(g);
      const std::uint32_t start = U32(rec);
      const std::uint32_t end = U32(rec + 4);
      if (cp >= start && cp <= end) return static_cast<int>(U32(rec + 8) + (cp - start));
    }
    return 0;
  }
  if (cp > 0xFFFF) return 0;
  const int seg_x2 = U16(sub + 6);
  const size_t ends = sub + 14;
  const size_t starts = ends + seg_x2 + 2;
  const size_t deltas = starts + seg_x2;
  const size_t ranges = deltas + seg_x2;
  for (int s = 0; s < seg_x2 / 2; ++s) {
    const std::uint16_t end = U16(ends + 2 * s);
    if (cp > end) continue;
    const std::uint16_t start = U16(starts + 2 * s);
    if (cp < start) return 0;
    const std::uint16_t delta = U16(deltas + 2 * s);
    const std::uint16_t range = U16(ranges + 2 * s);
    if (range == 0) return static_cast<std::uint16_t>(cp + delta);
    const size_t addr = ranges + 2 * s + range + 2 * (cp - start);
    const std::uint16_t glyph = U16(addr);
    return glyph == 0 ? 0 : static_cast<std::uint16_t>(glyph + delta);
  }
  return 0;
}

int FontMetrics::AdvanceWidth(int glyph) const {
  const int idx = std::min(glyph, num_hmetrics_ - 1);
  return U16(hmtx_ + 4 * static_cast<size_t>(idx));
}

std::optional<GlyphBox> FontMetrics::Bounds(int glyph) const {
  if (glyph < 0 || glyph >= num_glyphs_) return std::nullopt;
  size_t begin = 0;
  size_t end = 0;
  if (loca_format_ == 0) {
    begin = 2 * static_cast<size_t>(U16(loca_ + 2 * glyph));
    end = 2 * static_cast<size_t>(U16(loca_ + 2 * (glyph + 1)));
  } else {
    begin = U32(loca_ + 4 * glyph);
    end = U32(loca_ + 4 * (glyph + 1));
  }
  if (end <= begin) return std::nullopt;
  const size_t g = glyf_ + begin;
  return GlyphBox{S16(g + 2), S16(g + 4), S16(g + 6), S16(g + 8)};
}

FontFace::FontFace(const std::filesystem::path& path)
    : path_(path), metrics_([&] {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error(ErrorCode::kIo, "cannot open font " + path.string());
        return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
      }()) {
  renderer_ = cv::freetype::createFreeType2();
  renderer_->loadFontData(path.string(), 0);
}

FontFace::~FontFace() = default;

void FontFace::CheckCoverage(std::string_view text) const {
  for (char32_t cp : DecodeUtf8(text)) {
    if (cp == U'\n') continue;
    if (!metrics_.Covers(cp)) {
      std::ostringstream os;
      os << "uncovered codepoint U+" << std::hex << std::uppercase << static_cast<unsigned>(cp);
      throw Error(ErrorCode::kUncoveredCodepoint, os.str());
    }
  }
}

double FontFace::AdvancePx(std::string_view text, int font_px) const {
  double units = 0.0;
  for (char32_t cp : DecodeUtf8(text)) units += metrics_.AdvanceWidth(metrics_.GlyphIndex(cp));
  return units * font_px / metrics_.units_per_em();
}

double FontFace::AscentPx(int font_px) const {
  return static_cast<double>(metrics_.ascender()) * font_px / metrics_.units_per_em();
}

double FontFace::DescentPx(int font_px) const {
  return static_cast<double>(-metrics_.descender()) * font_px / metrics_.units_per_em();
}

int FontFace::LinePitchPx(int font_px) const {
  const double units = metrics_.ascender() - metrics_.descender() + metrics_.line_gap();
  return static_cast<int>(std::ceil(units * font_px / metrics_.units_per_em()));
}

void FontFace::RenderLine(cv::Mat& canvas, std::string_view text, cv::Point baseline,
                          int font_px) const {
  CV_Assert(canvas.type() == CV_8UC1);
  cv::Mat color = cv::Mat::zeros(canvas.size(), CV_8UC3);
  {
    std::lock_guard<std::mutex> lock(render_mutex_);
    renderer_->putText(color, std::string(text), baseline, font_px, cv::Scalar::all(255), -1,
                       cv::LINE_AA, true);
  }
  cv::Mat gray;
  cv::extractChannel(color, gray, 0);
  cv::max(canvas, gray, canvas);
}

std::filesystem::path DefaultFontPath() {
  return std::filesystem::path(GLYPHFUSE_DATA_DIR) / "fonts" / "DejaVuSans.ttf";
}

}  // namespace glyphfuse::text
