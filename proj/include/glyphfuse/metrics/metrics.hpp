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
#include <string>
#include <string_view>
#include <vector>

#include "glyphfuse/core/geometry.hpp"
#include "glyphfuse/core/sample.hpp"

namespace glyphfuse::metrics {

/// OCR output for one annotated region paired with its ground truth.
struct Transcription {
  std::string predicted;
  std::string ground_truth;
};

struct Detection {
  std::string category;
  BBox bbox;
  double confidence = 1.0;
};

/// Codepoint-level Levenshtein distance.
int EditDistance(std::string_view a, std::string_view b);

/// 1 - levenshtein / max(|a|, |b|); 1.0 when both are empty.
double Ned(std::string_view a, std::string_view b);

/// Fraction of regions whose prediction equals the ground truth after
/// trimming surrounding whitespace (case-sensitive). Throws kNoRegions on an
/// empty list.
double OcrWordAccuracy(std::span<const Transcription> transcriptions);

double Iou(const BBox& a, const BBox& b);

/// Mean over ground-truth categories of all-point interpolated AP. Detections
/// are matched greedily in descending confidence to the highest-IoU unmatched
/// ground truth of the same category; misses are false positives. Throws
/// kUndefinedAp without ground truth.
double AveragePrecision(std::span<const Detection> detections,
                        std::span<const ObjectBox> ground_truth, double iou_thresh = 0.5);

/// Detections and ground truth of one image.
struct ImageBoxes {
  std::vector<Detection> detections;
  std::vector<ObjectBox> ground_truth;
};

/// AP over a dataset: detections are ranked across all images but only match
/// ground truth of their own image.
double AveragePrecision(std::span<const ImageBoxes> images, double iou_thresh = 0.5);

/// Per-category precision/recall after each ranked detection.
struct PrCurve {
  std::vector<double> precision;
  std::vector<double> recall;
};

PrCurve PrecisionRecall(std::span<const ImageBoxes> images, const std::string& category,
                        double iou_thresh);

}  // namespace glyphfuse::metrics
