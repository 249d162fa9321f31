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
#include <iosfwd>
#include <vector>

#include "glyphfuse/core/geometry.hpp"
#include "glyphfuse/fusion/losses.hpp"
#include "glyphfuse/fusion/network.hpp"
#include "glyphfuse/fusion/schedule.hpp"

namespace glyphfuse::fusion {

/// Synthetic denoising task. Each sample draws a random +-1 code m; the clean
/// latent is m at every position and the glyph features carry the same code,
/// so the noise is only recoverable by reading the text branch.
struct ToyTask {
  int samples = 16;
  int height = 8;
  int width = 8;
  int latent_channels = 4;
  int object_channels = 4;
  int glyph_channels = 4;
  /// Regions (in latent pixels) compared by the text loss.
  std::vector<Quad> text_regions{Quad::FromBBox({1, 2, 7, 6})};
  std::uint64_t seed = 7;
};

template <typename T>
struct ToySample {
  Grid<T> z0, noise, z_obj, z_glyph;
  int t = 0;
};

template <typename T>
std::vector<ToySample<T>> MakeToyDataset(const ToyTask& task, const NoiseSchedule& schedule);

enum class Optimizer { kAdam, kSgd };

struct TrainOptions {
  int steps = 500;
  double lr = 2e-3;
  double lambda = 0.01;
  Optimizer optimizer = Optimizer::kAdam;
  std::uint64_t seed = 1;
  /// Channel width of the frozen text-loss feature stack.
  int feature_width = 8;
};

struct TraceRecord {
  int step = 0;
  double loss_cd = 0.0;
  double loss_text = 0.0;
  double total = 0.0;
  std::vector<double> alpha;
};

/// Losses and gradients of the whole dataset for fixed parameters.
template <typename T>
struct BatchLoss {
  double loss_cd = 0.0;
  double loss_text = 0.0;
  double total = 0.0;
  DenoiserParams<T> grads;
};

/// Mean over samples of loss_cd + lambda * loss_text, where the text loss
/// compares crops of z0 against the clean latent implied by the prediction.
template <typename T>
BatchLoss<T> EvaluateBatch(const FusionConfig& config, const DenoiserParams<T>& params,
                           const std::vector<ToySample<T>>& data, const ToyTask& task,
                           const NoiseSchedule& schedule, const FeatureFn<T>& features,
                           double lambda, bool with_grads);

/// Full-batch training in float. One record per step, taken before the
/// update. Throws kDivergence on a non-finite loss, naming the step.
std::vector<TraceRecord> ToyTrain(const FusionConfig& config, const ToyTask& task,
                                  const TrainOptions& options);

/// One JSON object per line.
void WriteTrace(std::ostream& out, const std::vector<TraceRecord>& trace);

}  // namespace glyphfuse::fusion
