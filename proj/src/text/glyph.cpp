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
#include "glyphfuse/text/glyph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include <opencv2/imgproc.hpp>

#include "glyphfuse/error.hpp"

namespace glyphfuse::text {
namespace {

std::vector<std::string_view> SplitLines(std::string_view text) {
  std::vector<std::string_view> lines;
  size_t start = 0;
  while (true) {
    const size_t nl = text.find('\n', start);
    lines.push_back(text.substr(start, nl == std::string_view::npos ? nl : nl - start));
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return lines;
}

cv::Mat RenderBlock(const FontFace& font, std::string_view text, int font_px) {
  const std::vector<std::string_view> lines = SplitLines(text);
  const int pad = 2 + font_px / 4;
  double widest = 0.0;
  for (std::string_view line : lines) widest = std::max(widest, font.AdvancePx(line, font_px));
  const int ascent = static_cast<int>(std::ceil(font.AscentPx(font_px)));
  const int descent = static_cast<int>(std::ceil(font.DescentPx(font_px)));
  const int pitch = font.LinePitchPx(font_px);
  const int width = static_cast<int>(std::ceil(widest)) + 2 * pad + font_px;
  const int height = ascent + descent + pitch * static_cast<int>(lines.size() - 1) + 2 * pad;
  cv::Mat canvas = cv::Mat::zeros(height, width, CV_8UC1);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    font.RenderLine(canvas, lines[i], {pad, pad + ascent + pitch * static_cast<int>(i)}, font_px);
  }
  return canvas;
}

cv::Mat ApplyTwist(const cv::Mat& src, double amplitude, double wavelength) {
  const int extra = static_cast<int>(std::ceil(std::abs(amplitude))) + 1;
  cv::Mat padded;
  cv::copyMakeBorder(src, padded, extra, extra, 0, 0, cv::BORDER_CONSTANT, cv::Scalar(0));
  cv::Mat map_x(padded.size(), CV_32FC1);
  cv::Mat map_y(padded.size(), CV_32FC1);
  for (int y = 0; y < padded.rows; ++y) {
    auto* mx = map_x.ptr<float>(y);
    auto* my = map_y.ptr<float>(y);
    for (int x = 0; x < padded.cols; ++x) {
      mx[x] = static_cast<float>(x);
      my[x] = static_cast<float>(y - amplitude * std::sin(2.0 * std::numbers::pi * x / wavelength));
    }
  }
  cv::Mat out;
  cv::remap(padded, out, map_x, map_y, cv::INTER_LINEAR, cv::BORDER_CONSTANT, cv::Scalar(0));
  return out;
}

cv::Mat Dilate1px(const cv::Mat& src) {
  cv::Mat out;
  cv::dilate(src, out, cv::getStructuringElement(cv::MORPH_RECT, {3, 3}), {-1, -1}, 1,
             cv::BORDER_CONSTANT, cv::Scalar(0));
  return out;
}

// Rotated canvas side, robust to cos/sin round-off at right angles.
int RotatedExtent(double a, double b) {
  return std::max(1, static_cast<int>(std::ceil(a + b - 1e-6)));
}

}  // namespace

void CheckStyle(const TextStyle& style) {
  if (style.font_px < kMinFontPx) {
    throw Error(ErrorCode::kInvalidValue, "font_px must be >= 6");
  }
  if (!std::isfinite(style.twist_amp) || std::abs(style.twist_amp) > 0.25 * style.font_px) {
    throw Error(ErrorCode::kInvalidValue, "twist amplitude exceeds 0.25 * font_px");
  }
  if (!std::isfinite(style.rotation_deg) || style.rotation_deg < -180.0 ||
      style.rotation_deg > 180.0) {
    throw Error(ErrorCode::kInvalidValue, "rotation outside [-180, 180]");
  }
}

GlyphPatch RasterizeGlyph(const FontFace& font, std::string_view text, const TextStyle& style,
                          const Quad& placement) {
  CheckStyle(style);
  font.CheckCoverage(text);

  cv::Mat block = RenderBlock(font, text, style.font_px);
  if (style.twist_amp != 0.0) {
    block = ApplyTwist(block, style.twist_amp, TwistWavelength(style.font_px));
  }
  // Room for the dilations below.
  cv::copyMakeBorder(block, block, 2, 2, 2, 2, cv::BORDER_CONSTANT, cv::Scalar(0));
  if (style.bold) block = Dilate1px(block);
  cv::Mat outline = cv::Mat::zeros(block.size(), CV_8UC1);
  if (style.border) {
    const cv::Mat grown = Dilate1px(block);
    cv::subtract(grown, block, outline);
    block = grown;
  }

  std::vector<cv::Point> ink;
  cv::findNonZero(block, ink);
  if (ink.empty()) throw Error(ErrorCode::kInvalidValue, "text renders no ink");
  const cv::Rect tight = cv::boundingRect(ink);
  const cv::Mat coverage0 = block(tight).clone();
  const cv::Mat outline0 = outline(tight).clone();

  const double w = coverage0.cols;
  const double h = coverage0.rows;
  const double theta = style.rotation_deg * std::numbers::pi / 180.0;
  const double cs = std::cos(theta);
  const double sn = std::sin(theta);
  const int out_w = RotatedExtent(std::abs(w * cs), std::abs(h * sn));
  const int out_h = RotatedExtent(std::abs(w * sn), std::abs(h * cs));

  // Continuous coordinates (pixel i spans [i, i+1)); counter-clockwise on
  // screen with y pointing down: (x, y) -> (c x + s y, -s x + c y).
  const cv::Point2d src_c(w / 2.0, h / 2.0);
  const cv::Point2d dst_c(out_w / 2.0, out_h / 2.0);
  auto rotate = [&](cv::Point2d p) {
    const cv::Point2d d = p - src_c;
    return cv::Point2d(cs * d.x + sn * d.y, -sn * d.x + cs * d.y) + dst_c;
  };

  cv::Mat affine(2, 3, CV_64FC1);
  affine.at<double>(0, 0) = cs;
  affine.at<double>(0, 1) = sn;
  affine.at<double>(1, 0) = -sn;
  affine.at<double>(1, 1) = cs;
  // Pixel index i has continuous center i + 0.5.
  const cv::Point2d t = rotate({0.5, 0.5}) - cv::Point2d(0.5, 0.5);
  affine.at<double>(0, 2) = t.x;
  affine.at<double>(1, 2) = t.y;

  GlyphPatch patch;
  cv::warpAffine(coverage0, patch.coverage, affine, {out_w, out_h}, cv::INTER_LINEAR,
                 cv::BORDER_CONSTANT, cv::Scalar(0));
  cv::warpAffine(outline0, patch.outline, affine, {out_w, out_h}, cv::INTER_LINEAR,
                 cv::BORDER_CONSTANT, cv::Scalar(0));

  const Point2 center = placement.Centroid();
  patch.origin = {static_cast<int>(std::lround(center.x - out_w / 2.0)),
                  static_cast<int>(std::lround(center.y - out_h / 2.0))};
  const cv::Point2d corners[4] = {{0, 0}, {w, 0}, {w, h}, {0, h}};
  for (int i = 0; i < 4; ++i) {
    const cv::Point2d p = rotate(corners[i]);
    patch.effective_quad.corners[i] = {p.x + patch.origin.x, p.y + patch.origin.y};
  }
  for (const Point2& p : patch.effective_quad.corners) {
    if (!placement.Contains(p)) {
      std::ostringstream os;
      os << "text does not fit: " << w << "x" << h << " block at " << style.rotation_deg
         << " deg exceeds placement quad";
      throw Error(ErrorCode::kTextDoesNotFit, os.str());
    }
  }
  return patch;
}

cv::Mat ComposeGlyphImage(std::span<const GlyphPatch> patches, cv::Size dims) {
  for (size_t i = 0; i < patches.size(); ++i) {
    for (size_t j = i + 1; j < patches.size(); ++j) {
      if (QuadsOverlap(patches[i].effective_quad, patches[j].effective_quad)) {
        throw Error(ErrorCode::kGlyphCollision,
                    "glyph collision between regions " + std::to_string(i) + " and " +
                        std::to_string(j));
      }
    }
  }
  cv::Mat canvas = cv::Mat::zeros(dims, CV_8UC1);
  const cv::Rect bounds({0, 0}, dims);
  for (const GlyphPatch& p : patches) {
    if ((p.rect() & bounds) != p.rect()) {
      throw Error(ErrorCode::kOutOfBounds, "glyph patch outside canvas");
    }
    cv::Mat roi = canvas(p.rect());
    cv::max(roi, p.coverage, roi);
  }
  return canvas;
}

}  // namespace glyphfuse::text
