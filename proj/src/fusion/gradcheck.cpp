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
#include "glyphfuse/fusion/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include "json.hpp"

#include "glyphfuse/fusion/losses.hpp"
#include "glyphfuse/fusion/ops.hpp"
#include "glyphfuse/fusion/schedule.hpp"
#include "glyphfuse/fusion/toy_train.hpp"
#include "glyphfuse/seed.hpp"

namespace glyphfuse::fusion {

double RelativeError(std::span<const double> analytic, std::span<const double> numeric) {
  double diff = 0.0, na = 0.0, nn = 0.0;
  for (size_t i = 0; i < analytic.size(); ++i) {
    diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
    na += analytic[i] * analytic[i];
    nn += numeric[i] * numeric[i];
  }
  const double denom = std::sqrt(std::max(na, nn));
  return denom == 0.0 ? 0.0 : std::sqrt(diff) / denom;
}

std::vector<double> NumericGradient(std::span<double> param, const std::function<double()>& loss,
                                    double step) {
  std::vector<double> g(param.size());
  for (size_t i = 0; i < param.size(); ++i) {
    const double keep = param[i];
    param[i] = keep + step;
    const double up = loss();
    param[i] = keep - step;
    const double down = loss();
    param[i] = keep;
    g[i] = (up - down) / (2.0 * step);
  }
  return g;
}

bool FuseCheckReport::pass() const {
  return std::all_of(gradients.begin(), gradients.end(), [](const auto& g) { return g.pass; }) &&
         std::all_of(invariants.begin(), invariants.end(), [](const auto& c) { return c.pass; });
}

namespace {

using M = Matrix<double>;
using V = Vector<double>;

struct Checker {
  std::mt19937_64 rng;
  double tolerance;
  FuseCheckReport* report;

  M Random(Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    M m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
    return m;
  }
  V RandomVec(Eigen::Index n, double mean, double scale) {
    std::normal_distribution<double> d(mean, scale);
    V v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = d(rng);
    return v;
  }

  // Gradient of `loss` w.r.t. several buffers at once, compared norm-wise.
  void Compare(const std::string& name, std::vector<std::span<double>> params,
               const std::vector<std::vector<double>>& analytic,
               const std::function<double()>& loss) {
    std::vector<double> a, n;
    for (size_t k = 0; k < params.size(); ++k) {
      const auto g = NumericGradient(params[k], loss);
      n.insert(n.end(), g.begin(), g.end());
      a.insert(a.end(), analytic[k].begin(), analytic[k].end());
    }
    const double err = RelativeError(a, n);
    report->gradients.push_back({name, err, tolerance, err < tolerance});
  }

  void Invariant(const std::string& name, double deviation, double tol) {
    report->invariants.push_back({name, deviation, tol, deviation <= tol});
  }
};

template <typename Mat>
std::span<double> Span(Mat& m) {
  return {m.data(), static_cast<size_t>(m.size())};
}
template <typename Mat>
std::vector<double> Vec(const Mat& m) {
  return std::vector<double>(m.data(), m.data() + m.size());
}

}  // namespace

FuseCheckReport RunFuseCheck(std::uint64_t seed, int batch, int tokens, int channels,
                             const std::vector<int>& layers, double tolerance) {
  if (batch < 1 || tokens < 1 || channels < 1) {
    throw ValidationError(ErrorCode::kInvalidValue, "dims", "dimensions must be positive");
  }
  FuseCheckReport report;
  report.seed = seed;
  report.batch = batch;
  report.tokens = tokens;
  report.channels = channels;
  report.layers = layers;
  Checker ck{std::mt19937_64(Mix64(seed)), tolerance, &report};
  const int rows = batch * tokens;

  {  // rms_norm
    M x = ck.Random(rows, channels);
    V gain = ck.RandomVec(channels, 1.0, 0.3);
    const M w = ck.Random(rows, channels);
    const double eps = 1e-6;
    V dgain = V::Zero(channels);
    const M dx = RmsNormBackward<double>(x, gain, eps, w, dgain);
    ck.Compare("rms_norm", {Span(x), Span(gain)}, {Vec(dx), Vec(dgain)},
               [&] { return (RmsNorm<double>(x, gain, eps).array() * w.array()).sum(); });
  }

  // Per-batch attention on (tokens x C) slices.
  auto params = AttentionParams<double>::Random(channels, ck.rng, 1.0 / std::sqrt(channels));
  params.gain_query = ck.RandomVec(channels, 1.0, 0.3);
  params.gain_context = ck.RandomVec(channels, 1.0, 0.3);
  std::vector<M> ys, yzs, ws;
  for (int b = 0; b < batch; ++b) {
    ys.push_back(ck.Random(tokens, channels));
    yzs.push_back(ck.Random(tokens, channels));
    ws.push_back(ck.Random(tokens, channels));
  }
  {
    auto grads = AttentionParams<double>::Zero(channels);
    std::vector<double> dy_all, dz_all;
    for (int b = 0; b < batch; ++b) {
      AttentionCache<double> cache;
      CrossAttention<double>(ys[b], yzs[b], params, &cache);
      M dq, dc;
      CrossAttentionBackward<double>(ys[b], yzs[b], params, cache, ws[b], grads, dq, dc);
      const auto a = Vec(dq), c = Vec(dc);
      dy_all.insert(dy_all.end(), a.begin(), a.end());
      dz_all.insert(dz_all.end(), c.begin(), c.end());
    }
    auto loss = [&] {
      double s = 0.0;
      for (int b = 0; b < batch; ++b) {
        s += (CrossAttention<double>(ys[b], yzs[b], params).array() * ws[b].array()).sum();
      }
      return s;
    };
    std::vector<std::span<double>> spans;
    for (auto& m : ys) spans.push_back(Span(m));
    for (auto& m : yzs) spans.push_back(Span(m));
    spans.insert(spans.end(), {Span(params.wq), Span(params.wk), Span(params.wv),
                               Span(params.gain_query), Span(params.gain_context)});
    std::vector<std::vector<double>> analytic;
    for (int b = 0; b < batch; ++b) {
      analytic.emplace_back(dy_all.begin() + b * tokens * channels,
                            dy_all.begin() + (b + 1) * tokens * channels);
    }
    for (int b = 0; b < batch; ++b) {
      analytic.emplace_back(dz_all.begin() + b * tokens * channels,
                            dz_all.begin() + (b + 1) * tokens * channels);
    }
    for (const auto* m : {&grads.wq, &grads.wk, &grads.wv}) analytic.push_back(Vec(*m));
    analytic.push_back(Vec(grads.gain_query));
    analytic.push_back(Vec(grads.gain_context));
    ck.Compare("cross_attention", spans, analytic, loss);
  }

  {  // adaptive_fuse
    M y = ck.Random(rows, channels);
    M ya = ck.Random(rows, channels);
    GateParam<double> gate{std::normal_distribution<double>(0.0, 1.0)(ck.rng)};
    const M w = ck.Random(rows, 2 * channels);
    M dy, dya;
    double dalpha = 0.0;
    AdaptiveFuseBackward<double>(ya, gate, w, dy, dya, dalpha);
    std::span<double> alpha_span(&gate.alpha, 1);
    ck.Compare("adaptive_fuse", {Span(y), Span(ya), alpha_span}, {Vec(dy), Vec(dya), {dalpha}},
               [&] { return (AdaptiveFuse<double>(y, ya, gate).array() * w.array()).sum(); });
  }

  {  // project_fused
    M yf = ck.Random(rows, 2 * channels);
    M proj = ck.Random(2 * channels, channels, 1.0 / std::sqrt(channels));
    const M w = ck.Random(rows, channels);
    M dproj;
    const M dyf = ProjectFusedBackward<double>(yf, proj, w, dproj);
    ck.Compare("project_fused", {Span(yf), Span(proj)}, {Vec(dyf), Vec(dproj)},
               [&] { return (ProjectFused<double>(yf, proj).array() * w.array()).sum(); });
  }

  {  // loss_cd
    Grid<double> eps(tokens, batch, channels), pred(tokens, batch, channels);
    std::normal_distribution<double> n(0.0, 1.0);
    for (auto& v : eps.data) v = n(ck.rng);
    for (auto& v : pred.data) v = n(ck.rng);
    Grid<double> g;
    LossCd(eps, pred, &g);
    ck.Compare("loss_cd", {std::span<double>(pred.data)}, {g.data},
               [&] { return LossCd(eps, pred); });
  }

  const NoiseSchedule schedule;
  {  // loss_text through a random conv feature stack
    const RandomConvFeatures<double> features(channels, 4, DeriveSeed(seed, 11));
    std::vector<Grid<double>> real, fake;
    std::normal_distribution<double> n(0.0, 1.0);
    for (int b = 0; b < batch; ++b) {
      real.emplace_back(3, tokens, channels);
      fake.emplace_back(3, tokens, channels);
      for (auto& v : real.back().data) v = n(ck.rng);
      for (auto& v : fake.back().data) v = n(ck.rng);
    }
    const int t = std::uniform_int_distribution<int>(0, schedule.steps() - 1)(ck.rng);
    std::vector<Grid<double>> grad;
    LossText<double>(real, fake, t, schedule, features, &grad);
    std::vector<std::span<double>> spans;
    std::vector<std::vector<double>> analytic;
    for (int b = 0; b < batch; ++b) {
      spans.emplace_back(fake[b].data);
      analytic.push_back(grad[b].data);
    }
    ck.Compare("loss_text", spans, analytic,
               [&] { return LossText<double>(real, fake, t, schedule, features); });
  }

  {  // composed denoiser loss over every parameter
    FusionConfig config;
    config.attach_indices = layers;
    config.num_blocks = layers.empty() ? 1 : *std::max_element(layers.begin(), layers.end()) + 1;
    config.channels = channels;
    config.alpha_init = 0.5;
    config.Check();
    ToyTask task;
    task.samples = batch;
    task.height = 1;
    task.width = tokens;
    task.latent_channels = 2;
    task.object_channels = 2;
    task.glyph_channels = 2;
    task.text_regions = {Quad::FromBBox({0, 0, static_cast<double>(tokens), 1})};
    task.seed = DeriveSeed(seed, 12);
    const auto data = MakeToyDataset<double>(task, schedule);
    auto net = DenoiserParams<double>::Init(config, 2, 2, 2, DeriveSeed(seed, 13));
    const RandomConvFeatures<double> features(2, 4, DeriveSeed(seed, 14));
    const double lambda = 0.01;
    const BatchLoss<double> full =
        EvaluateBatch(config, net, data, task, schedule, features, lambda, true);
    auto grads = full.grads;
    auto analytic_spans = grads.Tensors();
    std::vector<std::vector<double>> analytic;
    for (auto s : analytic_spans) analytic.emplace_back(s.begin(), s.end());
    ck.Compare("composition", net.Tensors(), analytic, [&] {
      return EvaluateBatch(config, net, data, task, schedule, features, lambda, false).total;
    });

    // The total's gradient splits into its two terms.
    const auto cd = EvaluateBatch(config, net, data, task, schedule, features, 0.0, true);
    const auto with_two = EvaluateBatch(config, net, data, task, schedule, features, 2 * lambda, true);
    auto g1 = grads;
    auto g0 = cd.grads;
    auto g2 = with_two.grads;
    double dev = 0.0, scale = 0.0;
    auto t1 = g1.Tensors(), t0 = g0.Tensors(), t2 = g2.Tensors();
    for (size_t k = 0; k < t1.size(); ++k) {
      for (size_t i = 0; i < t1[k].size(); ++i) {
        // g(2 lambda) - g(lambda) = lambda * grad(l_text) = g(lambda) - g(0)
        dev = std::max(dev, std::abs((t2[k][i] - t1[k][i]) - (t1[k][i] - t0[k][i])));
        scale = std::max(scale, std::abs(t1[k][i]));
      }
    }
    ck.Invariant("total_gradient_additive", dev / std::max(scale, 1e-300), 1e-10);
  }

  {  // attention rows, convex combination, permutation invariance
    AttentionCache<double> cache;
    const M out = CrossAttention<double>(ys[0], yzs[0], params, &cache);
    double row_dev = 0.0, hull_dev = 0.0;
    for (Eigen::Index i = 0; i < cache.attn.rows(); ++i) {
      row_dev = std::max(row_dev, std::abs(cache.attn.row(i).sum() - 1.0));
      for (Eigen::Index c = 0; c < out.cols(); ++c) {
        const double lo = cache.v.col(c).minCoeff(), hi = cache.v.col(c).maxCoeff();
        hull_dev = std::max({hull_dev, lo - out(i, c) - 1e-12, out(i, c) - hi - 1e-12, 0.0});
      }
    }
    ck.Invariant("attention_rows_sum_to_one", row_dev, 1e-12);
    ck.Invariant("attention_convex_hull", hull_dev, 0.0);
    std::vector<int> perm(tokens);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), ck.rng);
    M permuted(tokens, channels);
    for (int i = 0; i < tokens; ++i) permuted.row(i) = yzs[0].row(perm[i]);
    const M out_perm = CrossAttention<double>(ys[0], permuted, params);
    ck.Invariant("text_token_permutation", (out - out_perm).cwiseAbs().maxCoeff(), 1e-12);
  }

  {  // gate at zero is an exact identity; gate law elsewhere
    FeatureMap<double> y(batch, tokens, channels, FeatureRole::kObject);
    FeatureMap<double> yz(batch, tokens, channels, FeatureRole::kText);
    std::normal_distribution<double> n(0.0, 1.0);
    for (auto& v : y.data) v = n(ck.rng);
    for (auto& v : yz.data) v = n(ck.rng);
    const auto ya = CrossAttention(y, yz, params);
    const auto out = ProjectFused(AdaptiveFuse(y, ya, GateParam<double>{0.0}),
                                  IdentityProjection<double>(channels));
    double mismatches = 0.0;
    for (size_t i = 0; i < y.data.size(); ++i) mismatches += out.data[i] != y.data[i] ? 1.0 : 0.0;
    ck.Invariant("alpha_zero_identity", mismatches, 0.0);
    double gate_dev = 0.0;
    for (double alpha : {-2.0, -0.5, 0.0, 0.5, 2.0}) {
      const auto fused = AdaptiveFuse(y, ya, GateParam<double>{alpha});
      for (int b = 0; b < batch; ++b) {
        for (int t = 0; t < tokens; ++t) {
          for (int c = 0; c < channels; ++c) {
            const double want = y.at(b, t, c) + std::tanh(alpha) * ya.at(b, t, c);
            gate_dev = std::max(gate_dev, std::abs(fused.at(b, t, channels + c) - want));
          }
        }
      }
    }
    ck.Invariant("gate_law", gate_dev, 1e-12);
  }

  {  // schedule
    double dev = 0.0;
    bool decreasing = true;
    for (int t = 0; t < schedule.steps(); ++t) {
      const double s = schedule.signal(t);
      dev = std::max(dev, std::abs(s * s + (1.0 - schedule.alpha_bar(t)) - 1.0));
      if (t > 0 && !(schedule.alpha_bar(t) < schedule.alpha_bar(t - 1))) decreasing = false;
    }
    ck.Invariant("schedule_identity", dev, 1e-15);
    ck.Invariant("alpha_bar_decreasing", decreasing ? 0.0 : 1.0, 0.0);
  }
  return report;
}

void WriteFuseCheckReport(std::ostream& out, const FuseCheckReport& report) {
  nlohmann::ordered_json j;
  j["seed"] = report.seed;
  j["dims"] = {report.batch, report.tokens, report.channels};
  j["layers"] = report.layers;
  j["pass"] = report.pass();
  j["gradients"] = nlohmann::ordered_json::array();
  for (const auto& g : report.gradients) {
    j["gradients"].push_back(
        {{"name", g.name}, {"rel_error", g.rel_error}, {"tolerance", g.tolerance}, {"pass", g.pass}});
  }
  j["invariants"] = nlohmann::ordered_json::array();
  for (const auto& c : report.invariants) {
    j["invariants"].push_back({{"name", c.name},
                               {"deviation", c.deviation},
                               {"tolerance", c.tolerance},
                               {"pass", c.pass}});
  }
  out << j.dump(2) << '\n';
}

}  // namespace glyphfuse::fusion
