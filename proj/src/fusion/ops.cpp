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
#include "glyphfuse/fusion/ops.hpp"

#include <cmath>

namespace glyphfuse::fusion {
namespace {

template <typename T>
void RequireFinite(const FeatureMap<T>& m, const char* what) {
  if (!AllFinite(m.data)) {
    throw Error(ErrorCode::kInvalidValue, std::string("non-finite entries in ") + what);
  }
}

template <typename T>
Matrix<T> RandomMatrix(int rows, int cols, std::mt19937_64& rng, T scale) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix<T> m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = static_cast<T>(normal(rng)) * scale;
  }
  return m;
}

}  // namespace

template <typename T>
Matrix<T> RmsNorm(const Matrix<T>& x, const Vector<T>& gain, T eps) {
  RequireShape(gain.size() == x.cols(), "rms_norm gain");
  Matrix<T> out(x.rows(), x.cols());
  const T inv_c = T(1) / static_cast<T>(x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const T r = T(1) / std::sqrt(x.row(i).squaredNorm() * inv_c + eps);
    out.row(i) = (x.row(i).array() * gain.transpose().array() * r).matrix();
  }
  return out;
}

template <typename T>
Matrix<T> RmsNormBackward(const Matrix<T>& x, const Vector<T>& gain, T eps, const Matrix<T>& dout,
                          Vector<T>& dgain) {
  RequireShape(dout.rows() == x.rows() && dout.cols() == x.cols(), "rms_norm grad");
  if (dgain.size() != x.cols()) dgain = Vector<T>::Zero(x.cols());
  Matrix<T> dx(x.rows(), x.cols());
  const T inv_c = T(1) / static_cast<T>(x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const T r = T(1) / std::sqrt(x.row(i).squaredNorm() * inv_c + eps);
    const auto gd = (gain.transpose().array() * dout.row(i).array()).eval();
    dgain += (dout.row(i).array() * x.row(i).array() * r).matrix().transpose();
    const T proj = (gd * x.row(i).array()).sum();
    dx.row(i) = (gd * r - x.row(i).array() * (r * r * r * inv_c * proj)).matrix();
  }
  return dx;
}

template <typename T>
void AttentionParams<T>::Check() const {
  const auto c = wq.rows();
  const bool shapes = wq.cols() == c && wk.rows() == c && wk.cols() == c && wv.rows() == c &&
                      wv.cols() == c && gain_query.size() == c && gain_context.size() == c;
  RequireShape(shapes, "attention params");
  if (!(eps > T(0)) || !std::isfinite(eps)) {
    throw ValidationError(ErrorCode::kInvalidValue, "eps", "eps must be positive");
  }
  if (!wq.allFinite() || !wk.allFinite() || !wv.allFinite() || !gain_query.allFinite() ||
      !gain_context.allFinite()) {
    throw Error(ErrorCode::kInvalidValue, "non-finite attention params");
  }
}

template <typename T>
AttentionParams<T> AttentionParams<T>::Random(int channels, std::mt19937_64& rng, T scale) {
  AttentionParams p;
  p.wq = RandomMatrix<T>(channels, channels, rng, scale);
  p.wk = RandomMatrix<T>(channels, channels, rng, scale);
  p.wv = RandomMatrix<T>(channels, channels, rng, scale);
  p.gain_query = Vector<T>::Ones(channels);
  p.gain_context = Vector<T>::Ones(channels);
  return p;
}

template <typename T>
AttentionParams<T> AttentionParams<T>::Zero(int channels) {
  AttentionParams p;
  p.wq = Matrix<T>::Zero(channels, channels);
  p.wk = Matrix<T>::Zero(channels, channels);
  p.wv = Matrix<T>::Zero(channels, channels);
  p.gain_query = Vector<T>::Zero(channels);
  p.gain_context = Vector<T>::Zero(channels);
  p.eps = T(0);
  return p;
}

template <typename T>
Matrix<T> CrossAttention(const Matrix<T>& query, const Matrix<T>& context,
                         const AttentionParams<T>& params, AttentionCache<T>* cache) {
  const auto c = params.wq.rows();
  RequireShape(query.cols() == c && context.cols() == c, "attention channels");
  RequireShape(context.rows() > 0, "empty attention context");
  AttentionCache<T> local;
  AttentionCache<T>& k = cache ? *cache : local;
  k.xq = RmsNorm(query, params.gain_query, params.eps);
  k.xk = RmsNorm(context, params.gain_context, params.eps);
  k.q = k.xq * params.wq;
  k.k = k.xk * params.wk;
  k.v = k.xk * params.wv;
  const T scale = T(1) / std::sqrt(static_cast<T>(c));
  k.attn = (k.q * k.k.transpose()) * scale;
  for (Eigen::Index i = 0; i < k.attn.rows(); ++i) {
    auto row = k.attn.row(i);
    row.array() = (row.array() - row.maxCoeff()).exp();
    row /= row.sum();
  }
  return k.attn * k.v;
}

template <typename T>
void CrossAttentionBackward(const Matrix<T>& query, const Matrix<T>& context,
                            const AttentionParams<T>& params, const AttentionCache<T>& cache,
                            const Matrix<T>& dout, AttentionParams<T>& dparams, Matrix<T>& dquery,
                            Matrix<T>& dcontext) {
  const auto c = params.wq.rows();
  const T scale = T(1) / std::sqrt(static_cast<T>(c));
  const Matrix<T>& a = cache.attn;
  const Matrix<T> dv = a.transpose() * dout;
  const Matrix<T> da = dout * cache.v.transpose();
  Matrix<T> ds(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const T dot = (da.row(i).array() * a.row(i).array()).sum();
    ds.row(i) = (a.row(i).array() * (da.row(i).array() - dot)).matrix();
  }
  ds *= scale;
  const Matrix<T> dq = ds * cache.k;
  const Matrix<T> dk = ds.transpose() * cache.q;

  auto accumulate = [c](Matrix<T>& dst, const Matrix<T>& g) {
    if (dst.rows() != c || dst.cols() != c) dst = Matrix<T>::Zero(c, c);
    dst += g;
  };
  accumulate(dparams.wq, cache.xq.transpose() * dq);
  accumulate(dparams.wk, cache.xk.transpose() * dk);
  accumulate(dparams.wv, cache.xk.transpose() * dv);

  const Matrix<T> dxq = dq * params.wq.transpose();
  const Matrix<T> dxk = dk * params.wk.transpose() + dv * params.wv.transpose();
  dquery = RmsNormBackward(query, params.gain_query, params.eps, dxq, dparams.gain_query);
  dcontext = RmsNormBackward(context, params.gain_context, params.eps, dxk, dparams.gain_context);
}

template <typename T>
Matrix<T> AdaptiveFuse(const Matrix<T>& y, const Matrix<T>& attended, const GateParam<T>& gate) {
  RequireShape(y.rows() == attended.rows() && y.cols() == attended.cols(), "fuse inputs");
  const auto c = y.cols();
  Matrix<T> out(y.rows(), 2 * c);
  out.leftCols(c) = y;
  out.rightCols(c) = y + std::tanh(gate.alpha) * attended;
  return out;
}

template <typename T>
void AdaptiveFuseBackward(const Matrix<T>& attended, const GateParam<T>& gate,
                          const Matrix<T>& dout, Matrix<T>& dy, Matrix<T>& dattended,
                          T& dalpha) {
  const auto c = attended.cols();
  RequireShape(dout.cols() == 2 * c && dout.rows() == attended.rows(), "fuse grad");
  const T g = std::tanh(gate.alpha);
  dy = dout.leftCols(c) + dout.rightCols(c);
  dattended = g * dout.rightCols(c);
  dalpha += (T(1) - g * g) * (dout.rightCols(c).array() * attended.array()).sum();
}

template <typename T>
Matrix<T> IdentityProjection(int channels) {
  Matrix<T> p = Matrix<T>::Zero(2 * channels, channels);
  p.topRows(channels).setIdentity();
  return p;
}

template <typename T>
Matrix<T> ProjectFused(const Matrix<T>& fused, const Matrix<T>& proj) {
  RequireShape(proj.rows() == 2 * proj.cols() && fused.cols() == proj.rows(), "projection");
  return fused * proj;
}

template <typename T>
Matrix<T> ProjectFusedBackward(const Matrix<T>& fused, const Matrix<T>& proj,
                               const Matrix<T>& dout, Matrix<T>& dproj) {
  if (dproj.rows() != proj.rows() || dproj.cols() != proj.cols()) {
    dproj = Matrix<T>::Zero(proj.rows(), proj.cols());
  }
  dproj += fused.transpose() * dout;
  return dout * proj.transpose();
}

template <typename T>
FeatureMap<T> CrossAttention(const FeatureMap<T>& y, const FeatureMap<T>& y_text,
                             const AttentionParams<T>& params, bool query_from_text) {
  RequireShape(y.batch == y_text.batch && y.channels == y_text.channels, "attention inputs");
  RequireFinite(y, "object branch");
  RequireFinite(y_text, "text branch");
  params.Check();
  const FeatureMap<T>& q = query_from_text ? y_text : y;
  const FeatureMap<T>& kv = query_from_text ? y : y_text;
  FeatureMap<T> out(q.batch, q.tokens, q.channels, FeatureRole::kAttended);
  for (int b = 0; b < q.batch; ++b) {
    out.Slice(b) = CrossAttention<T>(q.Slice(b), kv.Slice(b), params);
  }
  return out;
}

template <typename T>
FeatureMap<T> AdaptiveFuse(const FeatureMap<T>& y, const FeatureMap<T>& attended,
                           const GateParam<T>& gate) {
  RequireShape(y.SameShape(attended), "fuse inputs");
  RequireFinite(y, "object branch");
  RequireFinite(attended, "attended features");
  if (!std::isfinite(gate.alpha)) throw Error(ErrorCode::kInvalidValue, "non-finite gate");
  FeatureMap<T> out(y.batch, y.tokens, 2 * y.channels, FeatureRole::kFused);
  for (int b = 0; b < y.batch; ++b) {
    out.Slice(b) = AdaptiveFuse<T>(y.Slice(b), attended.Slice(b), gate);
  }
  return out;
}

template <typename T>
FeatureMap<T> ProjectFused(const FeatureMap<T>& fused, const Matrix<T>& proj) {
  RequireShape(fused.channels == proj.rows() && proj.rows() == 2 * proj.cols(), "projection");
  RequireFinite(fused, "fused features");
  FeatureMap<T> out(fused.batch, fused.tokens, static_cast<int>(proj.cols()), FeatureRole::kObject);
  for (int b = 0; b < fused.batch; ++b) out.Slice(b) = fused.Slice(b) * proj;
  return out;
}

#define GLYPHFUSE_INSTANTIATE(T)                                                              \
  template Matrix<T> RmsNorm(const Matrix<T>&, const Vector<T>&, T);                          \
  template Matrix<T> RmsNormBackward(const Matrix<T>&, const Vector<T>&, T, const Matrix<T>&, \
                                     Vector<T>&);                                             \
  template struct AttentionParams<T>;                                                         \
  template Matrix<T> CrossAttention(const Matrix<T>&, const Matrix<T>&,                       \
                                    const AttentionParams<T>&, AttentionCache<T>*);           \
  template void CrossAttentionBackward(const Matrix<T>&, const Matrix<T>&,                    \
                                       const AttentionParams<T>&, const AttentionCache<T>&,   \
                                       const Matrix<T>&, AttentionParams<T>&, Matrix<T>&,     \
                                       Matrix<T>&);                                           \
  template Matrix<T> AdaptiveFuse(const Matrix<T>&, const Matrix<T>&, const GateParam<T>&);   \
  template void AdaptiveFuseBackward(const Matrix<T>&, const GateParam<T>&, const Matrix<T>&, \
                                     Matrix<T>&, Matrix<T>&, T&);                             \
  template Matrix<T> IdentityProjection<T>(int);                                              \
  template Matrix<T> ProjectFused(const Matrix<T>&, const Matrix<T>&);                        \
  template Matrix<T> ProjectFusedBackward(const Matrix<T>&, const Matrix<T>&,                 \
                                          const Matrix<T>&, Matrix<T>&);                      \
  template FeatureMap<T> CrossAttention(const FeatureMap<T>&, const FeatureMap<T>&,           \
                                        const AttentionParams<T>&, bool);                     \
  template FeatureMap<T> AdaptiveFuse(const FeatureMap<T>&, const FeatureMap<T>&,             \
                                      const GateParam<T>&);                                   \
  template FeatureMap<T> ProjectFused(const FeatureMap<T>&, const Matrix<T>&);

GLYPHFUSE_INSTANTIATE(float)
GLYPHFUSE_INSTANTIATE(double)

}  // namespace glyphfuse::fusion
