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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "glyphfuse/core/sample.hpp"

namespace glyphfuse {

/// A prediction record mirrors a dataset record and adds per-region OCR
/// output and per-object detector confidence.
struct PredictionRecord {
  Sample sample;
  std::vector<std::string> pred_text;  // parallel to sample.text_regions
  std::vector<double> confidence;      // parallel to sample.objects
};

/// Single-line JSON record, no trailing newline. Key order is fixed so equal
/// samples always serialize to identical bytes.
std::string SerializeSample(const Sample& sample);
Sample ParseSample(std::string_view record);

std::string SerializePrediction(const PredictionRecord& record);
/// Missing `pred_text` reads as "" and missing `confidence` as 1.0.
PredictionRecord ParsePrediction(std::string_view record);

/// One record per line; blank lines are skipped.
std::vector<Sample> ReadManifest(const std::filesystem::path& path);
std::vector<PredictionRecord> ReadPredictionManifest(const std::filesystem::path& path);
void WriteManifest(const std::filesystem::path& path, const std::vector<Sample>& samples);

}  // namespace glyphfuse
