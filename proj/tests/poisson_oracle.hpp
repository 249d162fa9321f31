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

#include <vector>

#include <Eigen/Dense>
#include <opencv2/core.hpp>

namespace testing {

/// Dense Poisson system written out from the discrete equations: for every
/// masked pixel p, 4 f_p - sum of masked neighbours = sum of boundary target
/// values + sum over the four edges of (guidance at p minus guidance at q).
/// Guidance is given as edge differences gx(y,x) = g(x+1) - g(x), gy likewise.
struct DenseSystem {
  std::vector<cv::Point> pixels;  // raster order
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
};

inline DenseSystem BuildDense(const cv::Mat& mask, const cv::Mat& target, const cv::Mat& gx,
                              const cv::Mat& gy) {
  DenseSystem s;
  cv::Mat id(mask.size(), CV_32SC1, cv::Scalar(-1));
  for (int y = 0; y < mask.rows; ++y)
    for (int x = 0; x < mask.cols; ++x)
      if (mask.at<uchar>(y, x)) {
        id.at<int>(y, x) = static_cast<int>(s.pixels.size());
        s.pixels.emplace_back(x, y);
      }
  const int n = static_cast<int>(s.pixels.size());
  s.a = Eigen::MatrixXd::Zero(n, n);
  s.b = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    const cv::Point p = s.pixels[i];
    s.a(i, i) = 4.0;
    // Neighbour q and the guided difference f_p - f_q on the edge p-q.
    const struct {
      cv::Point q;
      double diff;
    } edges[4] = {
        {{p.x - 1, p.y}, gx.at<double>(p.y, p.x - 1)},
        {{p.x + 1, p.y}, -gx.at<double>(p.y, p.x)},
        {{p.x, p.y - 1}, gy.at<double>(p.y - 1, p.x)},
        {{p.x, p.y + 1}, -gy.at<double>(p.y, p.x)},
    };
    for (const auto& e : edges) {
      s.b(i) += e.diff;
      const int j = id.at<int>(e.q);
      if (j >= 0) {
        s.a(i, j) = -1.0;
      } else {
        s.b(i) += target.at<double>(e.q);
      }
    }
  }
  return s;
}

inline Eigen::VectorXd DenseSolve(const DenseSystem& s) { return s.a.partialPivLu().solve(s.b); }

/// Forward differences, zero on the last column / row.
inline void EdgeDifferences(const cv::Mat& img, cv::Mat& gx, cv::Mat& gy) {
  gx = cv::Mat::zeros(img.size(), CV_64FC1);
  gy = cv::Mat::zeros(img.size(), CV_64FC1);
  for (int y = 0; y < img.rows; ++y)
    for (int x = 0; x < img.cols; ++x) {
      if (x + 1 < img.cols) gx.at<double>(y, x) = img.at<double>(y, x + 1) - img.at<double>(y, x);
      if (y + 1 < img.rows) gy.at<double>(y, x) = img.at<double>(y + 1, x) - img.at<double>(y, x);
    }
}

/// Composite computed with the dense oracle: target outside the mask, the
/// dense solution inside.
inline cv::Mat DenseComposite(const cv::Mat& target, const cv::Mat& mask, const cv::Mat& gx,
                              const cv::Mat& gy) {
  const DenseSystem s = BuildDense(mask, target, gx, gy);
  const Eigen::VectorXd f = DenseSolve(s);
  cv::Mat out = target.clone();
  for (size_t i = 0; i < s.pixels.size(); ++i) out.at<double>(s.pixels[i]) = f(static_cast<int>(i));
  return out;
}

}  // namespace testing
