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
#include "glyphfuse/fusion/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>

#include "glyphfuse/seed.hpp"

namespace glyphfuse::fusion {

void FusionConfig::Check() const {
  if (num_blocks < 1) {
    throw ValidationError(ErrorCode::kInvalidValue, "num_blocks", "need at least one block");
  }
  if (channels < 1) {
    throw ValidationError(ErrorCode::kInvalidValue, "channels", "channels must be positive");
  }
  if (!std::isfinite(alpha_init)) {
    throw ValidationError(ErrorCode::kInvalidValue, "alpha_init", "alpha_init must be finite");
  }
  std::set<int> seen;
  for (int i : attach_indices) {
    if (i < 0 || i >= num_blocks) {
      throw ValidationError(ErrorCode::kInvalidValue, "attach_indices",
                            "attach index " + std::to_string(i) + " outside [0, " +
                                std::to_string(num_blocks) + ")");
    }
    if (!seen.insert(i).second) {
      throw ValidationError(ErrorCode::kInvalidValue, "attach_indices",
                            "attach index " + std::to_string(i) + " repeated");
    }
  }
}

int FusionConfig::FusionSlot(int block) const {
  const auto it = std::find(attach_indices.begin(), attach_indices.end(), block);
  return it == attach_indices.end() ? -1 : static_cast<int>(it - attach_indices.begin());
}

template <typename T>
Vector<T> TimestepEmbedding(int t, int channels) {
  Vector<T> e(channels);
  const int half = std::max(1, channels / 2);
  for (int i = 0; i < channels; ++i) {
    const int k = i / 2;
    const double freq = std::pow(10000.0, -static_cast<double>(k) / half);
    e[i] = static_cast<T>(i % 2 == 0 ? std::sin(t * freq) : std::cos(t * freq));
  }
  return e;
}

template <typename T>
DenoiserParams<T> DenoiserParams<T>::Init(const FusionConfig& config, int latent_channels,
                                          int object_channels, int glyph_channels,
                                          std::uint64_t seed) {
  config.Check();
  std::mt19937_64 rng(Mix64(seed));
  std::normal_distribution<double> normal(0.0, 1.0);
  const int c = config.channels;
  auto random = [&](int rows, int cols, double scale) {
    Matrix<T> m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<T>(normal(rng) * scale);
    return m;
  };

  DenoiserParams p;
  p.conv_in = Conv3x3<T>::Random(latent_channels + object_channels, c, rng);
  p.text_in = random(glyph_channels, c, 1.0 / std::sqrt(static_cast<double>(glyph_channels)));
  for (int b = 0; b < config.num_blocks; ++b) {
    p.block.push_back(random(c, c, 0.5 / std::sqrt(static_cast<double>(c))));
  }
  for (size_t k = 0; k < config.attach_indices.size(); ++k) {
    p.attention.push_back(
        AttentionParams<T>::Random(c, rng, static_cast<T>(1.0 / std::sqrt(static_cast<double>(c)))));
    p.alpha.push_back(static_cast<T>(config.alpha_init));
    p.proj.push_back(IdentityProjection<T>(c));
  }
  p.conv_out = Conv3x3<T>::Random(c, latent_channels, rng, static_cast<T>(0.1));
  return p;
}

template <typename T>
DenoiserParams<T> DenoiserParams<T>::ZeroLike() const {
  DenoiserParams z = *this;
  for (std::span<T> s : z.Tensors()) std::fill(s.begin(), s.end(), T(0));
  for (auto& a : z.attention) a.eps = T(0);
  return z;
}

template <typename T>
std::vector<std::span<T>> DenoiserParams<T>::Tensors() {
  std::vector<std::span<T>> out;
  auto add = [&out](auto& m) { out.emplace_back(m.data(), static_cast<size_t>(m.size())); };
  add(conv_in.weight);
  add(conv_in.bias);
  add(text_in);
  for (auto& m : block) add(m);
  for (size_t k = 0; k < attention.size(); ++k) {
    add(attention[k].wq);
    add(attention[k].wk);
    add(attention[k].wv);
    add(attention[k].gain_query);
    add(attention[k].gain_context);
    out.emplace_back(&alpha[k], 1);
    add(proj[k]);
  }
  add(conv_out.weight);
  add(conv_out.bias);
  return out;
}

namespace {

template <typename T>
Grid<T> ConcatChannels(const Grid<T>& a, const Grid<T>& b) {
  RequireShape(a.height == b.height && a.width == b.width, "conditioning grid size");
  Grid<T> out(a.height, a.width, a.channels + b.channels);
  out.AsMatrix().leftCols(a.channels) = a.AsMatrix();
  out.AsMatrix().rightCols(b.channels) = b.AsMatrix();
  return out;
}

}  // namespace

template <typename T>
Grid<T> DenoiserForward(const FusionConfig& config, const DenoiserParams<T>& params,
                        const DenoiserInput<T>& input, DenoiserTrace<T>* trace) {
  DenoiserTrace<T> local;
  DenoiserTrace<T>& tr = trace ? *trace : local;
  const int c = config.channels;
  RequireShape(static_cast<int>(params.block.size()) == config.num_blocks &&
                   params.attention.size() == config.attach_indices.size(),
               "denoiser params vs config");

  tr.conv_in_input = ConcatChannels(input.z_t, input.z_obj);
  Grid<T> h = Conv3x3Forward(params.conv_in, tr.conv_in_input);
  const Vector<T> temb = TimestepEmbedding<T>(input.t, c);
  Matrix<T> y = h.AsMatrix().rowwise() + temb.transpose();

  tr.glyph = input.z_glyph.AsMatrix();
  RequireShape(tr.glyph.cols() == params.text_in.rows(), "glyph channels");
  tr.text = tr.glyph * params.text_in;
  if (config.query_from_text) RequireShape(tr.text.rows() == y.rows(), "text vs object tokens");

  tr.block_input.assign(config.num_blocks, {});
  tr.block_act.assign(config.num_blocks, {});
  const size_t slots = config.attach_indices.size();
  tr.fuse_input.assign(slots, {});
  tr.attended.assign(slots, {});
  tr.attention.assign(slots, {});
  tr.fused.assign(slots, {});
  for (int b = 0; b < config.num_blocks; ++b) {
    tr.block_input[b] = y;
    tr.block_act[b] = (y * params.block[b]).array().tanh().matrix();
    y += tr.block_act[b];
    const int k = config.FusionSlot(b);
    if (k < 0) continue;
    tr.fuse_input[k] = y;
    tr.attended[k] = config.query_from_text
                         ? CrossAttention<T>(tr.text, y, params.attention[k], &tr.attention[k])
                         : CrossAttention<T>(y, tr.text, params.attention[k], &tr.attention[k]);
    tr.fused[k] = AdaptiveFuse<T>(y, tr.attended[k], GateParam<T>{params.alpha[k]});
    y = ProjectFused<T>(tr.fused[k], params.proj[k]);
  }
  tr.conv_out_input = Grid<T>(input.z_t.height, input.z_t.width, c);
  tr.conv_out_input.AsMatrix() = y;
  return Conv3x3Forward(params.conv_out, tr.conv_out_input);
}

template <typename T>
void DenoiserBackward(const FusionConfig& config, const DenoiserParams<T>& params,
                      const DenoiserTrace<T>& trace, const Grid<T>& dpred,
                      DenoiserParams<T>& grads) {
  const Grid<T> dlast = Conv3x3Backward(params.conv_out, trace.conv_out_input, dpred, grads.conv_out);
  Matrix<T> dy = dlast.AsMatrix();
  Matrix<T> dtext = Matrix<T>::Zero(trace.text.rows(), trace.text.cols());
  for (int b = config.num_blocks - 1; b >= 0; --b) {
    const int k = config.FusionSlot(b);
    if (k >= 0) {
      const Matrix<T> dfused = ProjectFusedBackward(trace.fused[k], params.proj[k], dy, grads.proj[k]);
      Matrix<T> dy_in, dattended;
      AdaptiveFuseBackward(trace.attended[k], GateParam<T>{params.alpha[k]}, dfused, dy_in,
                           dattended, grads.alpha[k]);
      Matrix<T> dquery, dcontext;
      if (config.query_from_text) {
        CrossAttentionBackward(trace.text, trace.fuse_input[k], params.attention[k],
                               trace.attention[k], dattended, grads.attention[k], dquery,
                               dcontext);
        dtext += dquery;
        dy_in += dcontext;
      } else {
        CrossAttentionBackward(trace.fuse_input[k], trace.text, params.attention[k],
                               trace.attention[k], dattended, grads.attention[k], dquery,
                               dcontext);
        dy_in += dquery;
        dtext += dcontext;
      }
      dy = std::move(dy_in);
    }
    const Matrix<T> du =
        (dy.array() * (T(1) - trace.block_act[b].array().square())).matrix();
    grads.block[b] += trace.block_input[b].transpose() * du;
    dy += du * params.block[b].transpose();
  }
  grads.text_in += trace.glyph.transpose() * dtext;

  Grid<T> dh(trace.conv_in_input.height, trace.conv_in_input.width, config.channels);
  dh.AsMatrix() = dy;
  Conv3x3Backward(params.conv_in, trace.conv_in_input, dh, grads.conv_in);
}

#define GLYPHFUSE_INSTANTIATE(T)                                                              \
  template Vector<T> TimestepEmbedding<T>(int, int);                                          \
  template struct DenoiserParams<T>;                                                          \
  template Grid<T> DenoiserForward(const FusionConfig&, const DenoiserParams<T>&,             \
                                   const DenoiserInput<T>&, DenoiserTrace<T>*);               \
  template void DenoiserBackward(const FusionConfig&, const DenoiserParams<T>&,               \
                                 const DenoiserTrace<T>&, const Grid<T>&, DenoiserParams<T>&);

GLYPHFUSE_INSTANTIATE(float)
GLYPHFUSE_INSTANTIATE(double)

}  // namespace glyphfuse::fusion
