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

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Core>

namespace testing {

/// Central differences of f with respect to every entry of `x`, restoring x.
inline std::vector<double> CentralDifferences(std::vector<double*> x,
                                              const std::function<double()>& f,
                                              double h = 1e-6) {
  std::vector<double> g;
  for (double* p : x) {
    const double keep = *p;
    *p = keep + h;
    const double up = f();
    *p = keep - h;
    const double down = f();
    *p = keep;
    g.push_back((up - down) / (2 * h));
  }
  return g;
}

/// ||a - b|| / max(||a||, ||b||), zero when both vanish.
inline double NormRelError(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0, na = 0, nb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double denom = std::sqrt(std::max(na, nb));
  return denom == 0 ? 0.0 : std::sqrt(diff) / denom;
}

template <typename M>
std::vector<double*> Entries(M& m) {
  std::vector<double*> out;
  for (Eigen::Index i = 0; i < m.size(); ++i) out.push_back(m.data() + i);
  return out;
}

template <typename M>
std::vector<double> Values(const M& m) {
  return std::vector<double>(m.data(), m.data() + m.size());
}

/// Loop-level reference for one attention call: RMS-normalize both inputs,
/// project, softmax(q k^T / sqrt(C)) row by row, mix the values.
template <typename M, typename V>
M ReferenceAttention(const M& query, const M& context, const M& wq, const M& wk, const M& wv,
                     const V& gq, const V& gc, double eps) {
  const int c = static_cast<int>(query.cols());
  auto norm = [&](const M& x, const V& g) {
    M out = x;
    for (int i = 0; i < x.rows(); ++i) {
      double ms = 0;
      for (int j = 0; j < c; ++j) ms += x(i, j) * x(i, j);
      const double r = 1.0 / std::sqrt(ms / c + eps);
      for (int j = 0; j < c; ++j) out(i, j) = x(i, j) * r * g(j);
    }
    return out;
  };
  auto matmul = [](const M& a, const M& b) {
    M out = M::Zero(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
      for (int j = 0; j < b.cols(); ++j)
        for (int k = 0; k < a.cols(); ++k) out(i, j) += a(i, k) * b(k, j);
    return out;
  };
  const M q = matmul(norm(query, gq), wq);
  const M k = matmul(norm(context, gc), wk);
  const M v = matmul(norm(context, gc), wv);
  M out = M::Zero(query.rows(), c);
  for (int i = 0; i < q.rows(); ++i) {
    std::vector<double> logits(k.rows());
    for (int j = 0; j < k.rows(); ++j) {
      double s = 0;
      for (int d = 0; d < c; ++d) s += q(i, d) * k(j, d);
      logits[j] = s / std::sqrt(double(c));
    }
    const double mx = *std::max_element(logits.begin(), logits.end());
    double z = 0;
    for (double& l : logits) z += (l = std::exp(l - mx));
    for (int j = 0; j < k.rows(); ++j)
      for (int d = 0; d < c; ++d) out(i, d) += logits[j] / z * v(j, d);
  }
  return out;
}

}  // namespace testing
