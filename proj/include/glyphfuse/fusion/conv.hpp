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

#include <random>

#include "glyphfuse/fusion/tensor.hpp"

namespace glyphfuse::fusion {

/// 3x3 convolution, stride 1, zero padding. `weight` rows are ordered
/// (dy, dx, input channel); columns are output channels.
template <typename T>
struct Conv3x3 {
  Matrix<T> weight;  // 9*in x out
  Vector<T> bias;    // out

  int in_channels() const { return static_cast<int>(weight.rows() / 9); }
  int out_channels() const { return static_cast<int>(weight.cols()); }

  /// He-style normal init scaled by `gain`.
  static Conv3x3 Random(int in, int out, std::mt19937_64& rng, T gain = T(1));
  static Conv3x3 Zero(int in, int out);
};

template <typename T>
Matrix<T> Im2Col(const Grid<T>& x);

template <typename T>
Grid<T> Conv3x3Forward(const Conv3x3<T>& conv, const Grid<T>& x);

/// Returns d/dx; parameter gradients are accumulated into `dconv`.
template <typename T>
Grid<T> Conv3x3Backward(const Conv3x3<T>& conv, const Grid<T>& x, const Grid<T>& dout,
                        Conv3x3<T>& dconv);

}  // namespace glyphfuse::fusion
