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

#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "glyphfuse/error.hpp"

namespace glyphfuse::fusion {

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <typename T>
using MatrixMap = Eigen::Map<Matrix<T>>;
template <typename T>
using ConstMatrixMap = Eigen::Map<const Matrix<T>>;

/// Which tensor of the fusion block a feature map holds.
enum class FeatureRole { kObject, kText, kAttended, kFused, kOther };

/// Dense B x T x C tensor, row-major (channels fastest).
template <typename T>
struct FeatureMap {
  int batch = 0;
  int tokens = 0;
  int channels = 0;
  FeatureRole role = FeatureRole::kOther;
  std::vector<T> data;

  FeatureMap() = default;
  FeatureMap(int b, int t, int c, FeatureRole r = FeatureRole::kOther)
      : batch(b), tokens(t), channels(c), role(r),
        data(static_cast<size_t>(b) * t * c, T(0)) {}

  size_t size() const { return data.size(); }
  MatrixMap<T> Slice(int b) {
    return MatrixMap<T>(data.data() + static_cast<size_t>(b) * tokens * channels, tokens,
                        channels);
  }
  ConstMatrixMap<T> Slice(int b) const {
    return ConstMatrixMap<T>(data.data() + static_cast<size_t>(b) * tokens * channels, tokens,
                             channels);
  }
  T& at(int b, int t, int c) {
    return data[(static_cast<size_t>(b) * tokens + t) * channels + c];
  }
  T at(int b, int t, int c) const {
    return data[(static_cast<size_t>(b) * tokens + t) * channels + c];
  }
  bool SameShape(const FeatureMap& o) const {
    return batch == o.batch && tokens == o.tokens && channels == o.channels;
  }
};

/// Height x width x channels grid (HWC). A grid is also a tokens x channels
/// matrix with tokens = height * width in raster order.
template <typename T>
struct Grid {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<T> data;

  Grid() = default;
  Grid(int h, int w, int c) : height(h), width(w), channels(c), data(static_cast<size_t>(h) * w * c, T(0)) {}

  size_t size() const { return data.size(); }
  int tokens() const { return height * width; }
  T& at(int y, int x, int c) { return data[(static_cast<size_t>(y) * width + x) * channels + c]; }
  T at(int y, int x, int c) const {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  MatrixMap<T> AsMatrix() { return MatrixMap<T>(data.data(), tokens(), channels); }
  ConstMatrixMap<T> AsMatrix() const {
    return ConstMatrixMap<T>(data.data(), tokens(), channels);
  }
  bool SameShape(const Grid& o) const {
    return height == o.height && width == o.width && channels == o.channels;
  }
};

template <typename T>
bool AllFinite(const std::vector<T>& v) {
  for (T x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

inline void RequireShape(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kShapeMismatch, std::string("shape mismatch: ") + what);
}

}  // namespace glyphfuse::fusion
