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

#include <opencv2/core.hpp>

namespace glyphfuse::text {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

constexpr double kMinContrast = 4.5;

/// sRGB transfer function on [0, 1].
double SrgbToLinear(double v);
double LinearToSrgb(double v);

/// WCAG relative luminance in [0, 1].
double RelativeLuminance(Rgb c);
/// WCAG contrast ratio, always >= 1.
double ContrastRatio(Rgb a, Rgb b);

/// Mean color of the nonzero-mask pixels of a BGR image.
Rgb MeanColor(const cv::Mat& image_bgr, const cv::Mat& mask);

/// Keeps the background's chromaticity and moves its luminance towards white
/// or black, whichever reaches 4.5:1 with the smaller shift, then halfway on
/// from that threshold towards the extreme.
Rgb TextColorFor(Rgb background);
Rgb ChooseTextColor(const cv::Mat& image_bgr, const cv::Mat& region_mask);

}  // namespace glyphfuse::text
