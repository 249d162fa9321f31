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
#include "glyphfuse/fusion/losses.hpp"

#include <cmath>

#include "glyphfuse/seed.hpp"

namespace glyphfuse::fusion {

template <typename T>
T LossCd(const Grid<T>& noise, const Grid<T>& pred, Grid<T>* grad) {
  RequireShape(noise.SameShape(pred), "loss_cd operands");
  RequireShape(noise.size() > 0, "empty loss_cd operands");
  const T inv_n = T(1) / static_cast<T>(noise.size());
  T sum = 0;
  for (size_t i = 0; i < noise.size(); ++i) {
    const T d = pred.data[i] - noise.data[i];
    sum += d * d;
  }
  if (grad) {
    *grad = Grid<T>(pred.height, pred.width, pred.channels);
    for (size_t i = 0; i < noise.size(); ++i) {
      grad->data[i] = T(2) * inv_n * (pred.data[i] - noise.data[i]);
    }
  }
  return sum * inv_n;
}

std::vector<CropBox> CropBoxes(std::span<const Quad> quads, int width, int height) {
  std::vector<CropBox> boxes;
  boxes.reserve(quads.size());
  for (const Quad& q : quads) {
    const BBox b = q.Bounds();
    CropBox box{static_cast<int>(std::floor(b.x0)), static_cast<int>(std::floor(b.y0)),
                static_cast<int>(std::ceil(b.x1)), static_cast<int>(std::ceil(b.y1))};
    if (box.x0 < 0 || box.y0 < 0 || box.x1 > width || box.y1 > height) {
      throw Error(ErrorCode::kOutOfBounds, "text region outside the image");
    }
    if (box.width() <= 0 || box.height() <= 0) {
      throw Error(ErrorCode::kDegenerateBBox, "degenerate bbox");
    }
    boxes.push_back(box);
  }
  return boxes;
}

template <typename T>
Grid<T> Crop(const Grid<T>& image, const CropBox& box) {
  Grid<T> out(box.height(), box.width(), image.channels);
  for (int y = 0; y < box.height(); ++y) {
    for (int x = 0; x < box.width(); ++x) {
      for (int c = 0; c < image.channels; ++c) out.at(y, x, c) = image.at(box.y0 + y, box.x0 + x, c);
    }
  }
  return out;
}

template <typename T>
std::vector<Grid<T>> CropTextRegions(const Grid<T>& image, std::span<const Quad> quads) {
  std::vector<Grid<T>> crops;
  for (const CropBox& box : CropBoxes(quads, image.width, image.height)) {
    crops.push_back(Crop(image, box));
  }
  return crops;
}

template <typename T>
void ScatterCrop(const Grid<T>& crop_grad, const CropBox& box, Grid<T>& full) {
  RequireShape(crop_grad.height == box.height() && crop_grad.width == box.width() &&
                   crop_grad.channels == full.channels,
               "crop gradient");
  for (int y = 0; y < box.height(); ++y) {
    for (int x = 0; x < box.width(); ++x) {
      for (int c = 0; c < full.channels; ++c) {
        full.at(box.y0 + y, box.x0 + x, c) += crop_grad.at(y, x, c);
      }
    }
  }
}

template <typename T>
RandomConvFeatures<T>::RandomConvFeatures(int in_channels, int width, std::uint64_t seed) {
  std::mt19937_64 rng(Mix64(seed));
  layers_.push_back(Conv3x3<T>::Random(in_channels, width, rng));
  layers_.push_back(Conv3x3<T>::Random(width, width, rng));
  layers_.push_back(Conv3x3<T>::Random(width, width, rng));
}

template <typename T>
Grid<T> RandomConvFeatures<T>::Forward(const Grid<T>& x) const {
  Grid<T> h = x;
  for (const auto& layer : layers_) {
    h = Conv3x3Forward(layer, h);
    for (T& v : h.data) v = std::tanh(v);
  }
  return h;
}

template <typename T>
Grid<T> RandomConvFeatures<T>::Backward(const Grid<T>& x, const Grid<T>& dfeatures) const {
  std::vector<Grid<T>> inputs{x};
  std::vector<Grid<T>> outputs;
  for (const auto& layer : layers_) {
    Grid<T> h = Conv3x3Forward(layer, inputs.back());
    for (T& v : h.data) v = std::tanh(v);
    outputs.push_back(h);
    inputs.push_back(std::move(h));
  }
  Grid<T> g = dfeatures;
  for (int i = static_cast<int>(layers_.size()) - 1; i >= 0; --i) {
    for (size_t k = 0; k < g.data.size(); ++k) {
      const T a = outputs[i].data[k];
      g.data[k] *= T(1) - a * a;
    }
    Conv3x3<T> unused;
    g = Conv3x3Backward(layers_[i], inputs[i], g, unused);
  }
  return g;
}

template <typename T>
T LossText(std::span<const Grid<T>> real, std::span<const Grid<T>> pred, int t,
           const NoiseSchedule& schedule, const FeatureFn<T>& features,
           std::vector<Grid<T>>* grad) {
  RequireShape(real.size() == pred.size(), "text crop lists differ in length");
  const T phi = static_cast<T>(schedule.phi(t));
  if (grad) grad->clear();
  T total = 0;
  for (size_t i = 0; i < real.size(); ++i) {
    RequireShape(real[i].SameShape(pred[i]), "text crop pair");
    const Grid<T> f = features.Forward(real[i]);
    const Grid<T> fp = features.Forward(pred[i]);
    const T weight = phi / static_cast<T>(f.height * f.width);
    T sum = 0;
    Grid<T> df(fp.height, fp.width, fp.channels);
    for (size_t k = 0; k < f.data.size(); ++k) {
      const T d = fp.data[k] - f.data[k];
      sum += d * d;
      df.data[k] = T(2) * weight * d;
    }
    total += weight * sum;
    if (grad) grad->push_back(features.Backward(pred[i], df));
  }
  return total;
}

double TotalLoss(double loss_cd, double loss_text, double lambda) {
  if (!(lambda >= 0.0)) {
    throw ValidationError(ErrorCode::kInvalidValue, "lambda", "lambda must be non-negative");
  }
  return loss_cd + lambda * loss_text;
}

#define GLYPHFUSE_INSTANTIATE(T)                                                              \
  template T LossCd(const Grid<T>&, const Grid<T>&, Grid<T>*);                                \
  template Grid<T> Crop(const Grid<T>&, const CropBox&);                                      \
  template std::vector<Grid<T>> CropTextRegions(const Grid<T>&, std::span<const Quad>);       \
  template void ScatterCrop(const Grid<T>&, const CropBox&, Grid<T>&);                        \
  template class RandomConvFeatures<T>;                                                       \
  template T LossText(std::span<const Grid<T>>, std::span<const Grid<T>>, int,                \
                      const NoiseSchedule&, const FeatureFn<T>&, std::vector<Grid<T>>*);

GLYPHFUSE_INSTANTIATE(float)
GLYPHFUSE_INSTANTIATE(double)

}  // namespace glyphfuse::fusion
