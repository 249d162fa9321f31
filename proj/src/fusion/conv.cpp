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
#include "glyphfuse/fusion/conv.hpp"

#include <cmath>

namespace glyphfuse::fusion {

template <typename T>
Conv3x3<T> Conv3x3<T>::Random(int in, int out, std::mt19937_64& rng, T gain) {
  std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / (9.0 * in)));
  Conv3x3 c;
  c.weight.resize(9 * in, out);
  for (Eigen::Index i = 0; i < c.weight.size(); ++i) {
    c.weight.data()[i] = static_cast<T>(normal(rng)) * gain;
  }
  c.bias = Vector<T>::Zero(out);
  return c;
}

template <typename T>
Conv3x3<T> Conv3x3<T>::Zero(int in, int out) {
  return Conv3x3{Matrix<T>::Zero(9 * in, out), Vector<T>::Zero(out)};
}

template <typename T>
Matrix<T> Im2Col(const Grid<T>& x) {
  const int c = x.channels;
  Matrix<T> cols = Matrix<T>::Zero(x.tokens(), 9 * c);
  for (int y = 0; y < x.height; ++y) {
    for (int xx = 0; xx < x.width; ++xx) {
      T* row = cols.data() + static_cast<Eigen::Index>(y * x.width + xx) * 9 * c;
      for (int dy = -1; dy <= 1; ++dy) {
        const int sy = y + dy;
        if (sy < 0 || sy >= x.height) continue;
        for (int dx = -1; dx <= 1; ++dx) {
          const int sx = xx + dx;
          if (sx < 0 || sx >= x.width) continue;
          const int tap = (dy + 1) * 3 + (dx + 1);
          for (int ch = 0; ch < c; ++ch) row[tap * c + ch] = x.at(sy, sx, ch);
        }
      }
    }
  }
  return cols;
}

template <typename T>
Grid<T> Conv3x3Forward(const Conv3x3<T>& conv, const Grid<T>& x) {
  RequireShape(x.channels == conv.in_channels() && conv.weight.rows() % 9 == 0 &&
                   conv.bias.size() == conv.weight.cols(),
               "conv input channels");
  Grid<T> out(x.height, x.width, conv.out_channels());
  out.AsMatrix() = (Im2Col(x) * conv.weight).rowwise() + conv.bias.transpose();
  return out;
}

template <typename T>
Grid<T> Conv3x3Backward(const Conv3x3<T>& conv, const Grid<T>& x, const Grid<T>& dout,
                        Conv3x3<T>& dconv) {
  RequireShape(dout.height == x.height && dout.width == x.width &&
                   dout.channels == conv.out_channels(),
               "conv grad");
  if (dconv.weight.rows() != conv.weight.rows() || dconv.weight.cols() != conv.weight.cols()) {
    dconv = Conv3x3<T>::Zero(conv.in_channels(), conv.out_channels());
  }
  const Matrix<T> cols = Im2Col(x);
  const auto g = dout.AsMatrix();
  dconv.weight += cols.transpose() * g;
  dconv.bias += g.colwise().sum().transpose();
  const Matrix<T> dcols = g * conv.weight.transpose();

  const int c = x.channels;
  Grid<T> dx(x.height, x.width, c);
  for (int y = 0; y < x.height; ++y) {
    for (int xx = 0; xx < x.width; ++xx) {
      const T* row = dcols.data() + static_cast<Eigen::Index>(y * x.width + xx) * 9 * c;
      for (int dy = -1; dy <= 1; ++dy) {
        const int sy = y + dy;
        if (sy < 0 || sy >= x.height) continue;
        for (int ddx = -1; ddx <= 1; ++ddx) {
          const int sx = xx + ddx;
          if (sx < 0 || sx >= x.width) continue;
          const int tap = (dy + 1) * 3 + (ddx + 1);
          for (int ch = 0; ch < c; ++ch) dx.at(sy, sx, ch) += row[tap * c + ch];
        }
      }
    }
  }
  return dx;
}

template struct Conv3x3<float>;
template struct Conv3x3<double>;
template Matrix<float> Im2Col(const Grid<float>&);
template Matrix<double> Im2Col(const Grid<double>&);
template Grid<float> Conv3x3Forward(const Conv3x3<float>&, const Grid<float>&);
template Grid<double> Conv3x3Forward(const Conv3x3<double>&, const Grid<double>&);
template Grid<float> Conv3x3Backward(const Conv3x3<float>&, const Grid<float>&,
                                     const Grid<float>&, Conv3x3<float>&);
template Grid<double> Conv3x3Backward(const Conv3x3<double>&, const Grid<double>&,
                                      const Grid<double>&, Conv3x3<double>&);

}  // namespace glyphfuse::fusion
