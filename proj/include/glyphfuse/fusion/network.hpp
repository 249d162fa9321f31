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
#include <span>
#include <vector>

#include "glyphfuse/fusion/conv.hpp"
#include "glyphfuse/fusion/ops.hpp"
#include "glyphfuse/fusion/tensor.hpp"

namespace glyphfuse::fusion {

struct FusionConfig {
  /// Blocks followed by a fusion layer.
  std::vector<int> attach_indices{0, 1, 2, 3};
  double alpha_init = 0.0;
  int num_blocks = 4;
  int channels = 64;
  /// Swap attention roles: text tokens query the object branch.
  bool query_from_text = false;

  /// Throws kInvalidValue for negative, repeated or out-of-range indices.
  void Check() const;
  /// Position of `block` in attach_indices, or -1.
  int FusionSlot(int block) const;
};

/// Sinusoidal embedding of a timestep, `channels` wide.
template <typename T>
Vector<T> TimestepEmbedding(int t, int channels);

/// Small stand-in noise predictor: a 3x3 conv over (z_t, z_b) plus a timestep
/// embedding, residual tanh blocks with fusion layers after the configured
/// blocks, and a 3x3 conv back to latent channels. Glyph features reach the
/// network only through the text branch.
template <typename T>
struct DenoiserParams {
  Conv3x3<T> conv_in;
  Matrix<T> text_in;             // glyph channels x C
  std::vector<Matrix<T>> block;  // C x C each
  std::vector<AttentionParams<T>> attention;
  std::vector<T> alpha;
  std::vector<Matrix<T>> proj;  // 2C x C each
  Conv3x3<T> conv_out;

  static DenoiserParams Init(const FusionConfig& config, int latent_channels, int object_channels,
                             int glyph_channels, std::uint64_t seed);
  /// Same shapes, all zeros; used as a gradient accumulator.
  DenoiserParams ZeroLike() const;
  /// Every trainable buffer in a fixed order.
  std::vector<std::span<T>> Tensors();
};

template <typename T>
struct DenoiserInput {
  Grid<T> z_t;    // h x w x latent channels
  Grid<T> z_obj;  // h x w x object channels
  Grid<T> z_glyph;  // h x w x glyph channels
  int t = 0;
};

/// Intermediate values of one forward pass, kept for the backward pass.
template <typename T>
struct DenoiserTrace {
  Grid<T> conv_in_input;
  Matrix<T> glyph;  // z_glyph as tokens x channels
  Matrix<T> text;   // y_z
  std::vector<Matrix<T>> block_input;
  std::vector<Matrix<T>> block_act;  // tanh(y W)
  std::vector<Matrix<T>> fuse_input;
  std::vector<Matrix<T>> attended;
  std::vector<AttentionCache<T>> attention;
  std::vector<Matrix<T>> fused;
  Grid<T> conv_out_input;
};

template <typename T>
Grid<T> DenoiserForward(const FusionConfig& config, const DenoiserParams<T>& params,
                        const DenoiserInput<T>& input, DenoiserTrace<T>* trace = nullptr);

/// Accumulates parameter gradients for upstream gradient `dpred`.
template <typename T>
void DenoiserBackward(const FusionConfig& config, const DenoiserParams<T>& params,
                      const DenoiserTrace<T>& trace, const Grid<T>& dpred,
                      DenoiserParams<T>& grads);

}  // namespace glyphfuse::fusion
