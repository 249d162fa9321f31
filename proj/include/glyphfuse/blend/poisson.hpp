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
#include <vector>

#include <opencv2/core.hpp>

namespace glyphfuse::blend {

/// Target gradient field on pixel edges. gx(y, x) is the guidance for the
/// edge from (x, y) to (x+1, y); gy(y, x) for the edge from (x, y) to
/// (x, y+1). Both CV_64FC1 with the image's size.
struct GuidanceField {
  cv::Mat gx;
  cv::Mat gy;
};

/// Forward differences of a single-channel CV_64FC1 image.
GuidanceField GradientOf(const cv::Mat& image);

/// Per edge, whichever of the source and target differences is larger in
/// magnitude (ties keep the source).
GuidanceField MixedGuidance(const cv::Mat& source, const cv::Mat& target);

/// 5-point Laplacian over the masked pixels with Dirichlet values taken from
/// the target on the surrounding ring. Rows follow raster order of `pixels`.
struct LinearSystem {
  int width = 0;
  int height = 0;
  std::vector<cv::Point> pixels;
  std::vector<int> index;  // width*height, -1 outside the interior
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<double> val;
  std::vector<double> rhs;
  /// Starting guess for the solver: the target restricted to the interior.
  std::vector<double> initial;

  int size() const { return static_cast<int>(pixels.size()); }
  void Multiply(std::span<const double> x, std::span<double> out) const;
  /// max_i |(Ax - b)_i|
  double ResidualInf(std::span<const double> x) const;
};

/// Throws kBoundaryRingMissing when the mask touches the image border and
/// kInvalidValue for an empty mask or non-finite guidance.
LinearSystem BuildSystem(const cv::Mat& mask, const cv::Mat& target,
                         const GuidanceField& guidance);

struct SolverOptions {
  double tol = 1e-6;
  /// <= 0 selects ceil(10 * sqrt(n)).
  int max_iter = 0;
};

struct SolveResult {
  std::vector<double> x;
  int iterations = 0;
  double residual = 0.0;  // ||Ax - b||_inf, recomputed from x
};

/// Jacobi-preconditioned conjugate gradient. Throws ConvergenceError with the
/// last residual when the iteration budget runs out.
SolveResult SolvePoisson(const LinearSystem& system, const SolverOptions& options = {});

enum class BlendMode { kImport, kMixed };

/// Single-channel compositing on CV_64FC1 planes, without clamping. Pixels
/// outside the mask are copied from the target.
cv::Mat SeamlessCloneLinear(const cv::Mat& target, const cv::Mat& source, const cv::Mat& mask,
                            BlendMode mode, const SolverOptions& options = {});

/// 8-bit BGR compositing. Channels are solved independently in linear light
/// (sRGB decoded to [0, 255]) and re-encoded with clamping.
cv::Mat SeamlessClone(const cv::Mat& target_bgr, const cv::Mat& source_bgr, const cv::Mat& mask,
                      BlendMode mode = BlendMode::kMixed, const SolverOptions& options = {});

}  // namespace glyphfuse::blend
