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
#include <memory>
#include <span>
#include <vector>

#include "glyphfuse/core/geometry.hpp"
#include "glyphfuse/fusion/conv.hpp"
#include "glyphfuse/fusion/schedule.hpp"
#include "glyphfuse/fusion/tensor.hpp"

namespace glyphfuse::fusion {

/// Mean squared error over all elements. `grad`, when given, receives
/// d/dpred.
template <typename T>
T LossCd(const Grid<T>& noise, const Grid<T>& pred, Grid<T>* grad = nullptr);

/// Integer pixel box [x0, x1) x [y0, y1).
struct CropBox {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  bool operator==(const CropBox&) const = default;
};

/// Tight box of each quad (floor of the minimum, ceil of the maximum), in
/// order. Throws kOutOfBounds when a box leaves the width x height frame and
/// kDegenerateBBox when it is empty.
std::vector<CropBox> CropBoxes(std::span<const Quad> quads, int width, int height);

template <typename T>
Grid<T> Crop(const Grid<T>& image, const CropBox& box);

template <typename T>
std::vector<Grid<T>> CropTextRegions(const Grid<T>& image, std::span<const Quad> quads);

/// Adds a crop-shaped gradient back into a full-size gradient.
template <typename T>
void ScatterCrop(const Grid<T>& crop_grad, const CropBox& box, Grid<T>& full);

/// Frozen feature extractor for the text loss.
template <typename T>
class FeatureFn {
 public:
  virtual ~FeatureFn() = default;
  virtual Grid<T> Forward(const Grid<T>& x) const = 0;
  /// d/dx given the upstream gradient on the features.
  virtual Grid<T> Backward(const Grid<T>& x, const Grid<T>& dfeatures) const = 0;
};

template <typename T>
class IdentityFeatures final : public FeatureFn<T> {
 public:
  Grid<T> Forward(const Grid<T>& x) const override { return x; }
  Grid<T> Backward(const Grid<T>&, const Grid<T>& dfeatures) const override { return dfeatures; }
};

/// Three 3x3 conv layers with tanh after each, randomly initialized from a
/// seed and never trained.
template <typename T>
class RandomConvFeatures final : public FeatureFn<T> {
 public:
  RandomConvFeatures(int in_channels, int width, std::uint64_t seed);
  Grid<T> Forward(const Grid<T>& x) const override;
  Grid<T> Backward(const Grid<T>& x, const Grid<T>& dfeatures) const override;

 private:
  std::vector<Conv3x3<T>> layers_;
};

/// sum_i phi(t) / (h_i w_i) * sum_{h,w} ||f(real_i) - f(pred_i)||^2 where
/// h_i x w_i is the spatial size of region i's feature map. `grad`, when
/// given, receives d/dpred_i; no gradient flows to the real crops. Throws
/// kShapeMismatch when the lists differ in length or a pair in shape.
template <typename T>
T LossText(std::span<const Grid<T>> real, std::span<const Grid<T>> pred, int t,
           const NoiseSchedule& schedule, const FeatureFn<T>& features,
           std::vector<Grid<T>>* grad = nullptr);

/// l_cd + lambda * l_text; lambda must be non-negative.
double TotalLoss(double loss_cd, double loss_text, double lambda);

}  // namespace glyphfuse::fusion
