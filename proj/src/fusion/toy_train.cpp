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
#include "glyphfuse/fusion/toy_train.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <string>

#include "json.hpp"

#include "glyphfuse/seed.hpp"

namespace glyphfuse::fusion {

template <typename T>
std::vector<ToySample<T>> MakeToyDataset(const ToyTask& task, const NoiseSchedule& schedule) {
  if (task.samples < 1 || task.height < 1 || task.width < 1 || task.latent_channels < 1 ||
      task.object_channels < 1 || task.glyph_channels < 1) {
    throw ValidationError(ErrorCode::kInvalidValue, "task", "toy task sizes must be positive");
  }
  std::mt19937_64 rng(Mix64(task.seed));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> step(0, schedule.steps() - 1);
  std::bernoulli_distribution coin(0.5);

  std::vector<ToySample<T>> data;
  for (int i = 0; i < task.samples; ++i) {
    ToySample<T> s;
    std::vector<T> code(task.latent_channels);
    for (T& v : code) v = coin(rng) ? T(1) : T(-1);
    s.z0 = Grid<T>(task.height, task.width, task.latent_channels);
    s.noise = Grid<T>(task.height, task.width, task.latent_channels);
    s.z_obj = Grid<T>(task.height, task.width, task.object_channels);
    s.z_glyph = Grid<T>(task.height, task.width, task.glyph_channels);
    for (int y = 0; y < task.height; ++y) {
      for (int x = 0; x < task.width; ++x) {
        for (int c = 0; c < task.latent_channels; ++c) s.z0.at(y, x, c) = code[c];
        for (int c = 0; c < task.glyph_channels; ++c) {
          s.z_glyph.at(y, x, c) = code[c % task.latent_channels];
        }
      }
    }
    for (T& v : s.noise.data) v = static_cast<T>(normal(rng));
    for (T& v : s.z_obj.data) v = static_cast<T>(normal(rng));
    s.t = step(rng);
    data.push_back(std::move(s));
  }
  return data;
}

template <typename T>
BatchLoss<T> EvaluateBatch(const FusionConfig& config, const DenoiserParams<T>& params,
                           const std::vector<ToySample<T>>& data, const ToyTask& task,
                           const NoiseSchedule& schedule, const FeatureFn<T>& features,
                           double lambda, bool with_grads) {
  if (data.empty()) throw Error(ErrorCode::kInvalidValue, "empty toy dataset");
  BatchLoss<T> out;
  if (with_grads) out.grads = params.ZeroLike();
  const std::vector<CropBox> boxes = CropBoxes(task.text_regions, task.width, task.height);
  const T inv_n = T(1) / static_cast<T>(data.size());

  for (const ToySample<T>& s : data) {
    const T sig = static_cast<T>(schedule.signal(s.t));
    const T noi = static_cast<T>(schedule.noise(s.t));
    DenoiserInput<T> in{CorruptLatent(s.z0, s.t, s.noise, schedule), s.z_obj, s.z_glyph, s.t};
    DenoiserTrace<T> trace;
    const Grid<T> pred = DenoiserForward(config, params, in, with_grads ? &trace : nullptr);

    Grid<T> dpred;
    const T lcd = LossCd(s.noise, pred, with_grads ? &dpred : nullptr);

    // Clean latent implied by the prediction.
    Grid<T> recon(pred.height, pred.width, pred.channels);
    for (size_t i = 0; i < recon.data.size(); ++i) {
      recon.data[i] = (in.z_t.data[i] - noi * pred.data[i]) / sig;
    }
    std::vector<Grid<T>> real, fake;
    for (const CropBox& b : boxes) {
      real.push_back(Crop(s.z0, b));
      fake.push_back(Crop(recon, b));
    }
    std::vector<Grid<T>> dfake;
    const T ltext = LossText<T>(real, fake, s.t, schedule, features, with_grads ? &dfake : nullptr);

    out.loss_cd += static_cast<double>(lcd * inv_n);
    out.loss_text += static_cast<double>(ltext * inv_n);
    if (!with_grads) continue;

    Grid<T> drecon(pred.height, pred.width, pred.channels);
    for (size_t i = 0; i < boxes.size(); ++i) ScatterCrop(dfake[i], boxes[i], drecon);
    const T text_scale = static_cast<T>(lambda) * (-noi / sig);
    for (size_t i = 0; i < dpred.data.size(); ++i) {
      dpred.data[i] = inv_n * (dpred.data[i] + text_scale * drecon.data[i]);
    }
    DenoiserBackward(config, params, trace, dpred, out.grads);
  }
  out.total = TotalLoss(out.loss_cd, out.loss_text, lambda);
  return out;
}

std::vector<TraceRecord> ToyTrain(const FusionConfig& config, const ToyTask& task,
                                  const TrainOptions& options) {
  if (options.steps < 1) {
    throw ValidationError(ErrorCode::kInvalidValue, "steps", "steps must be >= 1");
  }
  if (!(options.lr >= 0.0) || !std::isfinite(options.lr)) {
    throw ValidationError(ErrorCode::kInvalidValue, "lr", "lr must be finite and non-negative");
  }
  TotalLoss(0.0, 0.0, options.lambda);  // validates lambda
  config.Check();

  using T = float;
  const NoiseSchedule schedule;
  const auto data = MakeToyDataset<T>(task, schedule);
  auto params = DenoiserParams<T>::Init(config, task.latent_channels, task.object_channels,
                                        task.glyph_channels, options.seed);
  const RandomConvFeatures<T> features(task.latent_channels, options.feature_width,
                                       DeriveSeed(options.seed, 1));

  const auto tensors = params.Tensors();
  std::vector<std::vector<T>> m1, m2;
  for (const auto& s : tensors) {
    m1.emplace_back(s.size(), T(0));
    m2.emplace_back(s.size(), T(0));
  }
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;

  std::vector<TraceRecord> trace;
  for (int step = 0; step < options.steps; ++step) {
    BatchLoss<T> batch =
        EvaluateBatch(config, params, data, task, schedule, features, options.lambda, true);
    TraceRecord rec{step, batch.loss_cd, batch.loss_text, batch.total, {}};
    for (T a : params.alpha) rec.alpha.push_back(a);
    trace.push_back(rec);
    if (!std::isfinite(batch.total)) {
      throw Error(ErrorCode::kDivergence, "non-finite loss at step " + std::to_string(step));
    }

    const auto grads = batch.grads.Tensors();
    const double bc1 = 1.0 - std::pow(kBeta1, step + 1);
    const double bc2 = 1.0 - std::pow(kBeta2, step + 1);
    for (size_t k = 0; k < tensors.size(); ++k) {
      for (size_t i = 0; i < tensors[k].size(); ++i) {
        const T g = grads[k][i];
        if (options.optimizer == Optimizer::kSgd) {
          tensors[k][i] -= static_cast<T>(options.lr) * g;
          continue;
        }
        m1[k][i] = static_cast<T>(kBeta1 * m1[k][i] + (1.0 - kBeta1) * g);
        m2[k][i] = static_cast<T>(kBeta2 * m2[k][i] + (1.0 - kBeta2) * g * g);
        const double mh = m1[k][i] / bc1;
        const double vh = m2[k][i] / bc2;
        tensors[k][i] -= static_cast<T>(options.lr * mh / (std::sqrt(vh) + kEps));
      }
    }
  }
  return trace;
}

void WriteTrace(std::ostream& out, const std::vector<TraceRecord>& trace) {
  for (const TraceRecord& r : trace) {
    nlohmann::ordered_json j;
    j["step"] = r.step;
    j["loss_cd"] = r.loss_cd;
    j["loss_text"] = r.loss_text;
    j["total"] = r.total;
    j["alpha"] = r.alpha;
    out << j.dump() << '\n';
  }
}

template std::vector<ToySample<float>> MakeToyDataset(const ToyTask&, const NoiseSchedule&);
template std::vector<ToySample<double>> MakeToyDataset(const ToyTask&, const NoiseSchedule&);
template BatchLoss<float> EvaluateBatch(const FusionConfig&, const DenoiserParams<float>&,
                                        const std::vector<ToySample<float>>&, const ToyTask&,
                                        const NoiseSchedule&, const FeatureFn<float>&, double,
                                        bool);
template BatchLoss<double> EvaluateBatch(const FusionConfig&, const DenoiserParams<double>&,
                                         const std::vector<ToySample<double>>&, const ToyTask&,
                                         const NoiseSchedule&, const FeatureFn<double>&, double,
                                         bool);

}  // namespace glyphfuse::fusion
