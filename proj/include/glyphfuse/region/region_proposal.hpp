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

#include <array>
#include <filesystem>
#include <vector>

#include <opencv2/core.hpp>

#include "glyphfuse/core/geometry.hpp"

namespace glyphfuse::region {

/// Per-pixel depth, CV_64FC1, finite and positive (larger = farther).
struct DepthMap {
  cv::Mat values;

  int width() const { return values.cols; }
  int height() const { return values.rows; }
};

/// Throws ValidationError if the map is empty, not CV_64FC1, or holds a
/// non-finite or non-positive value.
void CheckDepthMap(const DepthMap& depth);

/// Loads a portable float map (.pfm) or a 16-bit single-channel PNG. PNG
/// depths are scaled by `depth_scale` read from a JSON sidecar next to the
/// file (`<stem>.json`).
DepthMap ReadDepthMap(const std::filesystem::path& path);
void WriteDepthMapPfm(const std::filesystem::path& path, const DepthMap& depth);

/// z = a*x + b*y + c over pixel centers; `normal`/`offset` describe the same
/// plane as n . (x, y, z) = offset with |n| = 1.
struct Plane {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  std::array<double, 3> normal{0.0, 0.0, 1.0};
  double offset = 0.0;
};

struct PlaneFit {
  Plane plane;
  double rmse = 0.0;
};

/// Ordinary least squares over the nonzero pixels of `mask` (CV_8UC1).
/// Requires at least 16 support pixels; throws kDegeneratePlane when the
/// support is collinear.
PlaneFit FitDepthPlane(const DepthMap& depth, const cv::Mat& mask);

struct SegmentationConfig {
  int cell_size = 16;
  /// Max Euclidean distance (8-bit RGB) between a cell's mean color and the
  /// running mean of the segment it joins.
  double tau_color = 20.0;
  /// Max difference between a cell's mean gradient magnitude and the
  /// segment's running mean gradient magnitude.
  double tau_texture = 4.0;
};

struct Segmentation {
  cv::Mat labels;  // CV_32SC1, values in [0, segment_count)
  std::vector<double> texture_score;
  std::vector<int> pixel_count;

  int segment_count() const { return static_cast<int>(texture_score.size()); }
};

/// Greedy cell-grid region growing. Every pixel receives a label. Throws
/// kImageTooSmall below 32x32.
Segmentation SegmentTexture(const cv::Mat& image_bgr, const SegmentationConfig& config = {});

struct ProposalConfig {
  SegmentationConfig segmentation;
  double texture_max = 8.0;
  /// Plane-fit RMSE limit as a fraction of the segment's median depth.
  double planarity_rel = 0.02;
  double min_extent_frac = 0.02;
  double margin_frac = 0.02;
};

struct CandidateRegion {
  cv::Mat mask;  // CV_8UC1, 255 inside the segment
  BBox rect;     // largest axis-aligned rectangle inside the eroded mask
  Quad quad;     // rect as a clockwise quad
  Plane plane;
  double texture_score = 0.0;
  double planarity_rmse = 0.0;
  double planarity_limit = 0.0;
};

/// Regions passing the texture, planarity and extent predicates, sorted by
/// rectangle area (largest first). Regions are pairwise disjoint.
std::vector<CandidateRegion> ProposeTextRegions(const cv::Mat& image_bgr, const DepthMap& depth,
                                                const ProposalConfig& config = {});

/// Largest-area axis-aligned rectangle of nonzero pixels; ties resolve to the
/// first found in row-major scan order of the bottom edge. Empty box if none.
BBox LargestInscribedRect(const cv::Mat& mask);

}  // namespace glyphfuse::region
