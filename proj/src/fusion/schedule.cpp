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
#include "glyphfuse/fusion/schedule.hpp"

#include <cmath>
#include <string>

namespace glyphfuse::fusion {

NoiseSchedule::NoiseSchedule(int steps, double beta_start, double beta_end) {
  if (steps < 1) throw ValidationError(ErrorCode::kInvalidValue, "steps", "steps must be >= 1");
  if (!(beta_start > 0.0 && beta_end < 1.0 && beta_start <= beta_end)) {
    throw ValidationError(ErrorCode::kInvalidValue, "beta", "need 0 < beta_start <= beta_end < 1");
  }
  beta_.resize(steps);
  alpha_bar_.resize(steps);
  double prod = 1.0;
  for (int t = 0; t < steps; ++t) {
    beta_[t] = steps == 1 ? beta_start
                          : beta_start + (beta_end - beta_start) * t / static_cast<double>(steps - 1);
    prod *= 1.0 - beta_[t];
    alpha_bar_[t] = prod;
  }
}

int NoiseSchedule::Check(int t) const {
  if (t < 0 || t >= steps()) {
    throw Error(ErrorCode::kTimestepOutOfRange,
                "timestep " + std::to_string(t) + " outside [0, " + std::to_string(steps()) + ")");
  }
  return t;
}

double NoiseSchedule::signal(int t) const { return std::sqrt(alpha_bar(t)); }

double NoiseSchedule::noise(int t) const { return std::sqrt(1.0 - alpha_bar(t)); }

template <typename T>
Grid<T> CorruptLatent(const Grid<T>& z0, int t, const Grid<T>& noise,
                      const NoiseSchedule& schedule) {
  const T s = static_cast<T>(schedule.signal(t));
  const T n = static_cast<T>(schedule.noise(t));
  RequireShape(z0.SameShape(noise), "latent and noise");
  Grid<T> out(z0.height, z0.width, z0.channels);
  for (size_t i = 0; i < out.data.size(); ++i) out.data[i] = s * z0.data[i] + n * noise.data[i];
  return out;
}

template Grid<float> CorruptLatent(const Grid<float>&, int, const Grid<float>&,
                                   const NoiseSchedule&);
template Grid<double> CorruptLatent(const Grid<double>&, int, const Grid<double>&,
                                    const NoiseSchedule&);

}  // namespace glyphfuse::fusion
