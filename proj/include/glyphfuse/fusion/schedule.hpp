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

#include "glyphfuse/fusion/tensor.hpp"

namespace glyphfuse::fusion {

/// Linear beta schedule with cumulative products. Values are held in double
/// regardless of the tensor precision.
class NoiseSchedule {
 public:
  explicit NoiseSchedule(int steps = 1000, double beta_start = 1e-4, double beta_end = 2e-2);

  int steps() const { return static_cast<int>(beta_.size()); }
  double beta(int t) const { return beta_.at(Check(t)); }
  double alpha_bar(int t) const { return alpha_bar_.at(Check(t)); }
  /// Coefficient of z_0 in the corruption closed form; weights the text loss.
  double signal(int t) const;
  double noise(int t) const;
  double phi(int t) const { return signal(t); }

 private:
  int Check(int t) const;

  std::vector<double> beta_;
  std::vector<double> alpha_bar_;
};

/// sqrt(abar_t) * z0 + sqrt(1 - abar_t) * noise. Throws kTimestepOutOfRange
/// and kShapeMismatch.
template <typename T>
Grid<T> CorruptLatent(const Grid<T>& z0, int t, const Grid<T>& noise, const NoiseSchedule& schedule);

}  // namespace glyphfuse::fusion
