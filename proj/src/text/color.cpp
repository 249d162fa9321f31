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
#include "glyphfuse/text/color.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "glyphfuse/error.hpp"

namespace glyphfuse::text {
namespace {

std::uint8_t Encode(double linear) {
  const double v = std::clamp(LinearToSrgb(std::clamp(linear, 0.0, 1.0)) * 255.0, 0.0, 255.0);
  return static_cast<std::uint8_t>(std::lround(v));
}

}  // namespace

double SrgbToLinear(double v) {
  return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

double LinearToSrgb(double v) {
  return v <= 0.0031308 ? 12.92 * v : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

double RelativeLuminance(Rgb c) {
  return 0.2126 * SrgbToLinear(c.r / 255.0) + 0.7152 * SrgbToLinear(c.g / 255.0) +
         0.0722 * SrgbToLinear(c.b / 255.0);
}

double ContrastRatio(Rgb a, Rgb b) {
  const double la = RelativeLuminance(a);
  const double lb = RelativeLuminance(b);
  return (std::max(la, lb) + 0.05) / (std::min(la, lb) + 0.05);
}

Rgb MeanColor(const cv::Mat& image_bgr, const cv::Mat& mask) {
  CV_Assert(image_bgr.type() == CV_8UC3 && mask.type() == CV_8UC1);
  if (cv::countNonZero(mask) == 0) {
    throw Error(ErrorCode::kInvalidValue, "empty region mask");
  }
  const cv::Scalar m = cv::mean(image_bgr, mask);
  auto to8 = [](double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0))); };
  return {to8(m[2]), to8(m[1]), to8(m[0])};
}

Rgb TextColorFor(Rgb background) {
  const double lin[3] = {SrgbToLinear(background.r / 255.0), SrgbToLinear(background.g / 255.0),
                         SrgbToLinear(background.b / 255.0)};
  const double yb = RelativeLuminance(background);

  // Luminance is linear in the mix fraction s towards white (Y = yb + s(1-yb))
  // or black (Y = (1-s) yb), so the threshold fractions have closed forms.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double s_white = kInf;
  const double y_white = kMinContrast * (yb + 0.05) - 0.05;
  if (y_white <= 1.0) s_white = yb >= 1.0 ? 0.0 : std::max(0.0, (y_white - yb) / (1.0 - yb));
  double s_black = kInf;
  const double y_black = (yb + 0.05) / kMinContrast - 0.05;
  if (y_black >= 0.0 && yb > 0.0) s_black = std::max(0.0, 1.0 - y_black / yb);

  const bool to_white = s_white <= s_black;
  const double s_threshold = to_white ? s_white : s_black;
  const double s = 0.5 * (1.0 + s_threshold);
  const double target = to_white ? 1.0 : 0.0;
  Rgb out{Encode((1.0 - s) * lin[0] + s * target), Encode((1.0 - s) * lin[1] + s * target),
          Encode((1.0 - s) * lin[2] + s * target)};
  if (ContrastRatio(out, background) < kMinContrast) {
    out = to_white ? Rgb{255, 255, 255} : Rgb{0, 0, 0};
  }
  return out;
}

Rgb ChooseTextColor(const cv::Mat& image_bgr, const cv::Mat& region_mask) {
  return TextColorFor(MeanColor(image_bgr, region_mask));
}

}  // namespace glyphfuse::text
