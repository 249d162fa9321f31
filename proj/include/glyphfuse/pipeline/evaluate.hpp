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
#include <span>
#include <string>
#include <vector>

#include "glyphfuse/core/manifest.hpp"
#include "glyphfuse/core/sample.hpp"

namespace glyphfuse::pipeline {

struct OcrFilterResult {
  std::vector<Sample> kept;
  /// Dropped sample ids with their mean NED.
  std::vector<std::pair<std::string, double>> dropped;
};

/// Mean over regions of ned(ground truth, prediction); samples without
/// regions score 1.
double MeanRegionNed(const Sample& sample, std::span<const std::string> predictions);

/// Drops samples whose mean region NED is below `threshold`. Every sample
/// needs a transcription record with one prediction per region, otherwise
/// kCoverageGap naming the sample.
OcrFilterResult OcrFilter(std::span<const Sample> samples,
                          std::span<const PredictionRecord> transcriptions, double threshold);

struct MetricSelection {
  bool ocr = true;
  bool ned = true;
  bool ap = true;
};

/// Parses a comma list drawn from {ocr, ned, ap}.
MetricSelection ParseMetricSelection(const std::string& list);

struct SampleScores {
  std::string id;
  std::optional<double> ocr_accuracy;
  std::optional<double> ned;
  std::optional<double> ap;
};

struct EvalReport {
  MetricSelection selection;
  int samples = 0;
  int regions = 0;
  std::optional<double> ocr_accuracy;  // over all regions
  std::optional<double> ned;           // mean over all regions
  std::optional<double> ap;            // dataset-level, IoU 0.5
  std::vector<SampleScores> per_sample;
};

/// Predictions and ground truth must list the same ids in the same order
/// (kIdMismatch) with matching region counts (kCoverageGap).
EvalReport Evaluate(std::span<const PredictionRecord> predictions,
                    std::span<const Sample> ground_truth, const MetricSelection& selection,
                    double iou_thresh = 0.5);

std::string EvalReportJson(const EvalReport& report);

}  // namespace glyphfuse::pipeline
