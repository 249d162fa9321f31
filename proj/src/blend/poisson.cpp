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
#include "glyphfuse/blend/poisson.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <opencv2/imgproc.hpp>

#include "glyphfuse/error.hpp"

namespace glyphfuse::blend {
namespace {

double NormInf(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

const std::array<double, 256>& SrgbDecodeTable() {
  static const std::array<double, 256> table = [] {
    std::array<double, 256> t{};
    for (int i = 0; i < 256; ++i) {
      const double v = i / 255.0;
      t[i] = 255.0 * (v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4));
    }
    return t;
  }();
  return table;
}

uchar SrgbEncode(double linear255) {
  const double v = std::clamp(linear255 / 255.0, 0.0, 1.0);
  const double s = v <= 0.0031308 ? 12.92 * v : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
  return static_cast<uchar>(std::lround(std::clamp(s * 255.0, 0.0, 255.0)));
}

}  // namespace

GuidanceField GradientOf(const cv::Mat& image) {
  CV_Assert(image.type() == CV_64FC1);
  GuidanceField g{cv::Mat::zeros(image.size(), CV_64FC1), cv::Mat::zeros(image.size(), CV_64FC1)};
  for (int y = 0; y < image.rows; ++y) {
    const double* row = image.ptr<double>(y);
    const double* next = y + 1 < image.rows ? image.ptr<double>(y + 1) : nullptr;
    double* gx = g.gx.ptr<double>(y);
    double* gy = g.gy.ptr<double>(y);
    for (int x = 0; x < image.cols; ++x) {
      if (x + 1 < image.cols) gx[x] = row[x + 1] - row[x];
      if (next) gy[x] = next[x] - row[x];
    }
  }
  return g;
}

GuidanceField MixedGuidance(const cv::Mat& source, const cv::Mat& target) {
  CV_Assert(source.size() == target.size());
  GuidanceField s = GradientOf(source);
  const GuidanceField t = GradientOf(target);
  for (int y = 0; y < source.rows; ++y) {
    double* sx = s.gx.ptr<double>(y);
    double* sy = s.gy.ptr<double>(y);
    const double* tx = t.gx.ptr<double>(y);
    const double* ty = t.gy.ptr<double>(y);
    for (int x = 0; x < source.cols; ++x) {
      if (std::abs(tx[x]) > std::abs(sx[x])) sx[x] = tx[x];
      if (std::abs(ty[x]) > std::abs(sy[x])) sy[x] = ty[x];
    }
  }
  return s;
}

void LinearSystem::Multiply(std::span<const double> x, std::span<double> out) const {
  for (int i = 0; i < size(); ++i) {
    double s = 0.0;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
    out[i] = s;
  }
}

double LinearSystem::ResidualInf(std::span<const double> x) const {
  std::vector<double> ax(size());
  Multiply(x, ax);
  double m = 0.0;
  for (int i = 0; i < size(); ++i) m = std::max(m, std::abs(ax[i] - rhs[i]));
  return m;
}

LinearSystem BuildSystem(const cv::Mat& mask, const cv::Mat& target,
                         const GuidanceField& guidance) {
  CV_Assert(mask.type() == CV_8UC1 && target.type() == CV_64FC1);
  CV_Assert(mask.size() == target.size() && guidance.gx.size() == mask.size() &&
            guidance.gy.size() == mask.size());
  LinearSystem sys;
  sys.width = mask.cols;
  sys.height = mask.rows;
  sys.index.assign(static_cast<size_t>(mask.cols) * mask.rows, -1);
  for (int y = 0; y < mask.rows; ++y) {
    const uchar* m = mask.ptr<uchar>(y);
    for (int x = 0; x < mask.cols; ++x) {
      if (!m[x]) continue;
      if (x == 0 || y == 0 || x == mask.cols - 1 || y == mask.rows - 1) {
        throw Error(ErrorCode::kBoundaryRingMissing, "boundary ring missing");
      }
      sys.index[static_cast<size_t>(y) * mask.cols + x] = static_cast<int>(sys.pixels.size());
      sys.pixels.emplace_back(x, y);
    }
  }
  if (sys.pixels.empty()) throw Error(ErrorCode::kInvalidValue, "empty blend mask");

  const int n = sys.size();
  sys.row_ptr.reserve(n + 1);
  sys.row_ptr.push_back(0);
  sys.rhs.resize(n);
  sys.initial.resize(n);
  for (int i = 0; i < n; ++i) {
    const cv::Point p = sys.pixels[i];
    // v_pq = f_p - f_q along each of the four edges.
    const double v_left = guidance.gx.at<double>(p.y, p.x - 1);
    const double v_right = -guidance.gx.at<double>(p.y, p.x);
    const double v_up = guidance.gy.at<double>(p.y - 1, p.x);
    const double v_down = -guidance.gy.at<double>(p.y, p.x);
    const std::array<std::array<int, 2>, 4> offsets{{{0, -1}, {-1, 0}, {1, 0}, {0, 1}}};
    const std::array<double, 4> v{v_up, v_left, v_right, v_down};
    double b = 0.0;
    std::array<std::pair<int, double>, 5> entries{};
    int count = 0;
    for (int k = 0; k < 4; ++k) {
      if (!std::isfinite(v[k])) throw Error(ErrorCode::kInvalidValue, "non-finite guidance");
      b += v[k];
      const int qx = p.x + offsets[k][0];
      const int qy = p.y + offsets[k][1];
      const int j = sys.index[static_cast<size_t>(qy) * sys.width + qx];
      if (j >= 0) {
        entries[count++] = {j, -1.0};
      } else {
        b += target.at<double>(qy, qx);
      }
    }
    entries[count++] = {i, 4.0};
    std::sort(entries.begin(), entries.begin() + count);
    for (int k = 0; k < count; ++k) {
      sys.col.push_back(entries[k].first);
      sys.val.push_back(entries[k].second);
    }
    sys.row_ptr.push_back(static_cast<int>(sys.col.size()));
    sys.rhs[i] = b;
    sys.initial[i] = target.at<double>(p);
  }
  return sys;
}

SolveResult SolvePoisson(const LinearSystem& system, const SolverOptions& options) {
  const int n = system.size();
  const int max_iter = options.max_iter > 0
                           ? options.max_iter
                           : static_cast<int>(std::ceil(10.0 * std::sqrt(static_cast<double>(n))));
  std::vector<double> inv_diag(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int k = system.row_ptr[i]; k < system.row_ptr[i + 1]; ++k) {
      if (system.col[k] == i) inv_diag[i] = 1.0 / system.val[k];
    }
  }

  SolveResult result;
  result.x = system.initial.empty() ? std::vector<double>(n, 0.0) : system.initial;
  std::vector<double>& x = result.x;
  std::vector<double> r(n), z(n), p(n), ap(n);

  auto restart = [&] {
    system.Multiply(x, ap);
    for (int i = 0; i < n; ++i) r[i] = system.rhs[i] - ap[i];
    for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    return Dot(r, z);
  };

  double rz = restart();
  double res = NormInf(r);
  int it = 0;
  while (true) {
    if (res <= options.tol) {
      // The recurrence drifts; accept only on the recomputed residual.
      const double true_res = system.ResidualInf(x);
      if (true_res <= options.tol) {
        result.residual = true_res;
        break;
      }
      rz = restart();
      res = NormInf(r);
      if (res <= options.tol) {
        result.residual = res;
        break;
      }
    }
    if (it >= max_iter) throw ConvergenceError(system.ResidualInf(x), it);
    system.Multiply(p, ap);
    const double pap = Dot(p, ap);
    if (!(pap > 0.0)) {
      rz = restart();
      res = NormInf(r);
      ++it;
      continue;
    }
    const double alpha = rz / pap;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_next = Dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    res = NormInf(r);
    ++it;
  }
  result.iterations = it;
  return result;
}

cv::Mat SeamlessCloneLinear(const cv::Mat& target, const cv::Mat& source, const cv::Mat& mask,
                            BlendMode mode, const SolverOptions& options) {
  CV_Assert(target.type() == CV_64FC1 && source.type() == CV_64FC1);
  if (target.size() != source.size() || mask.size() != target.size()) {
    throw Error(ErrorCode::kShapeMismatch, "target, source and mask sizes differ");
  }
  cv::Mat out = target.clone();
  if (cv::countNonZero(mask) == 0) return out;
  const GuidanceField guidance =
      mode == BlendMode::kImport ? GradientOf(source) : MixedGuidance(source, target);
  const LinearSystem sys = BuildSystem(mask, target, guidance);
  const SolveResult sol = SolvePoisson(sys, options);
  for (int i = 0; i < sys.size(); ++i) out.at<double>(sys.pixels[i]) = sol.x[i];
  return out;
}

cv::Mat SeamlessClone(const cv::Mat& target_bgr, const cv::Mat& source_bgr, const cv::Mat& mask,
                      BlendMode mode, const SolverOptions& options) {
  CV_Assert(target_bgr.type() == CV_8UC3 && source_bgr.type() == CV_8UC3 &&
            mask.type() == CV_8UC1);
  if (target_bgr.size() != source_bgr.size() || mask.size() != target_bgr.size()) {
    throw Error(ErrorCode::kShapeMismatch, "target, source and mask sizes differ");
  }
  cv::Mat out = target_bgr.clone();
  if (cv::countNonZero(mask) == 0) return out;

  // Solve on the mask's bounding box plus the Dirichlet ring.
  cv::Rect roi = cv::boundingRect(mask);
  roi.x -= 1;
  roi.y -= 1;
  roi.width += 2;
  roi.height += 2;
  if ((roi & cv::Rect({0, 0}, mask.size())) != roi) {
    throw Error(ErrorCode::kBoundaryRingMissing, "boundary ring missing");
  }
  const auto& decode = SrgbDecodeTable();
  const cv::Mat mask_roi = mask(roi);
  for (int c = 0; c < 3; ++c) {
    cv::Mat t(roi.size(), CV_64FC1);
    cv::Mat s(roi.size(), CV_64FC1);
    for (int y = 0; y < roi.height; ++y) {
      const auto* tp = target_bgr.ptr<cv::Vec3b>(roi.y + y) + roi.x;
      const auto* sp = source_bgr.ptr<cv::Vec3b>(roi.y + y) + roi.x;
      for (int x = 0; x < roi.width; ++x) {
        t.at<double>(y, x) = decode[tp[x][c]];
        s.at<double>(y, x) = decode[sp[x][c]];
      }
    }
    const cv::Mat solved = SeamlessCloneLinear(t, s, mask_roi, mode, options);
    for (int y = 0; y < roi.height; ++y) {
      const uchar* m = mask_roi.ptr<uchar>(y);
      auto* op = out.ptr<cv::Vec3b>(roi.y + y) + roi.x;
      for (int x = 0; x < roi.width; ++x) {
        if (m[x]) op[x][c] = SrgbEncode(solved.at<double>(y, x));
      }
    }
  }
  return out;
}

}  // namespace glyphfuse::blend
