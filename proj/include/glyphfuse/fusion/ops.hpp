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

// Row-wise RMS normalization with a per-channel gain.
template <typename T>
Matrix<T> RmsNorm(const Matrix<T>& x, const Vector<T>& gain, T eps);

// Returns d/dx; adds d/dgain into `dgain`.
template <typename T>
Matrix<T> RmsNormBackward(const Matrix<T>& x, const Vector<T>& gain, T eps, const Matrix<T>& dout,
                          Vector<T>& dgain);

// Single-head attention weights. The query gain normalizes the query side,
// the context gain the key/value side.
template <typename T>
struct AttentionParams {
  Matrix<T> wq, wk, wv;
  Vector<T> gain_query, gain_context;
  T eps = T(1e-6);

  int channels() const { return static_cast<int>(wq.rows()); }
  void Check() const;
  static AttentionParams Random(int channels, std::mt19937_64& rng, T scale);
  static AttentionParams Zero(int channels);
};

template <typename T>
struct AttentionCache {
  Matrix<T> xq, xk;  // normalized query / context
  Matrix<T> q, k, v;
  Matrix<T> attn;  // query tokens x context tokens, rows sum to 1
};

// softmax(Q K^T / sqrt(C)) V with Q from `query` and K, V from `context`.
template <typename T>
Matrix<T> CrossAttention(const Matrix<T>& query, const Matrix<T>& context,
                         const AttentionParams<T>& params, AttentionCache<T>* cache = nullptr);

// Parameter gradients are accumulated into `dparams`.
template <typename T>
void CrossAttentionBackward(const Matrix<T>& query, const Matrix<T>& context,
                            const AttentionParams<T>& params, const AttentionCache<T>& cache,
                            const Matrix<T>& dout, AttentionParams<T>& dparams, Matrix<T>& dquery,
                            Matrix<T>& dcontext);

template <typename T>
struct GateParam {
  T alpha = T(0);
};

// [y, y + tanh(alpha) * attended] along channels.
template <typename T>
Matrix<T> AdaptiveFuse(const Matrix<T>& y, const Matrix<T>& attended, const GateParam<T>& gate);

template <typename T>
void AdaptiveFuseBackward(const Matrix<T>& attended, const GateParam<T>& gate,
                          const Matrix<T>& dout, Matrix<T>& dy, Matrix<T>& dattended,
                          T& dalpha);

// 2C x C projection, initialized so that the first half passes through.
template <typename T>
Matrix<T> IdentityProjection(int channels);

template <typename T>
Matrix<T> ProjectFused(const Matrix<T>& fused, const Matrix<T>& proj);

// Returns d/dfused; adds d/dproj into `dproj`.
template <typename T>
Matrix<T> ProjectFusedBackward(const Matrix<T>& fused, const Matrix<T>& proj,
                               const Matrix<T>& dout, Matrix<T>& dproj);

// Batched wrappers over FeatureMap. Non-finite entries raise kInvalidValue,
// incompatible shapes kShapeMismatch. With `query_from_text` the text branch
// supplies the queries and the object branch the keys and values.
template <typename T>
FeatureMap<T> CrossAttention(const FeatureMap<T>& y, const FeatureMap<T>& y_text,
                             const AttentionParams<T>& params, bool query_from_text = false);

template <typename T>
FeatureMap<T> AdaptiveFuse(const FeatureMap<T>& y, const FeatureMap<T>& attended,
                           const GateParam<T>& gate);

template <typename T>
FeatureMap<T> ProjectFused(const FeatureMap<T>& fused, const Matrix<T>& proj);

}  // namespace glyphfuse::fusion
