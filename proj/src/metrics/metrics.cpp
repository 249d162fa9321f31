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
#include "glyphfuse/metrics/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "glyphfuse/error.hpp"
#include "glyphfuse/text/font.hpp"

namespace glyphfuse::metrics {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

int EditDistance(std::string_view a, std::string_view b) {
  const std::vector<char32_t> s = text::DecodeUtf8(a);
  const std::vector<char32_t> t = text::DecodeUtf8(b);
  std::vector<int> prev(t.size() + 1);
  std::vector<int> cur(t.size() + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (size_t i = 1; i <= s.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= t.size(); ++j) {
      const int sub = prev[j - 1] + (s[i - 1] == t[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[t.size()];
}

double Ned(std::string_view a, std::string_view b) {
  const size_t len = std::max(text::DecodeUtf8(a).size(), text::DecodeUtf8(b).size());
  if (len == 0) return 1.0;
  return 1.0 - static_cast<double>(EditDistance(a, b)) / static_cast<double>(len);
}

double OcrWordAccuracy(std::span<const Transcription> transcriptions) {
  if (transcriptions.empty()) throw Error(ErrorCode::kNoRegions, "no regions");
  const auto hits = std::count_if(transcriptions.begin(), transcriptions.end(),
                                  [](const Transcription& t) {
                                    return Trim(t.predicted) == Trim(t.ground_truth);
                                  });
  return static_cast<double>(hits) / static_cast<double>(transcriptions.size());
}

double Iou(const BBox& a, const BBox& b) {
  const double iw = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
  const double ih = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

PrCurve PrecisionRecall(std::span<const ImageBoxes> images, const std::string& category,
                        double iou_thresh) {
  struct Ranked {
    double confidence;
    size_t image;
    const Detection* det;
  };
  std::vector<Ranked> dets;
  std::vector<std::vector<const ObjectBox*>> gts(images.size());
  size_t gt_total = 0;
  for (size_t i = 0; i < images.size(); ++i) {
    for (const ObjectBox& g : images[i].ground_truth) {
      if (g.category == category) gts[i].push_back(&g);
    }
    gt_total += gts[i].size();
    for (const Detection& d : images[i].detections) {
      if (d.category == category) dets.push_back({d.confidence, i, &d});
    }
  }
  std::stable_sort(dets.begin(), dets.end(),
                   [](const Ranked& a, const Ranked& b) { return a.confidence > b.confidence; });

  PrCurve curve;
  std::vector<std::vector<bool>> matched(images.size());
  for (size_t i = 0; i < images.size(); ++i) matched[i].assign(gts[i].size(), false);
  int tp = 0;
  for (size_t k = 0; k < dets.size(); ++k) {
    const auto& cands = gts[dets[k].image];
    auto& used = matched[dets[k].image];
    int best = -1;
    double best_iou = -1.0;
    for (size_t g = 0; g < cands.size(); ++g) {
      if (used[g]) continue;
      const double v = Iou(dets[k].det->bbox, cands[g]->bbox);
      if (v > best_iou) {
        best_iou = v;
        best = static_cast<int>(g);
      }
    }
    if (best >= 0 && best_iou >= iou_thresh) {
      used[best] = true;
      ++tp;
    }
    curve.precision.push_back(static_cast<double>(tp) / static_cast<double>(k + 1));
    curve.recall.push_back(gt_total == 0 ? 0.0
                                         : static_cast<double>(tp) / static_cast<double>(gt_total));
  }
  return curve;
}

double AveragePrecision(std::span<const ImageBoxes> images, double iou_thresh) {
  if (!(iou_thresh > 0.0 && iou_thresh < 1.0)) {
    throw Error(ErrorCode::kInvalidValue, "iou_thresh must lie in (0, 1)");
  }
  std::set<std::string> categories;
  for (const ImageBoxes& im : images) {
    for (const ObjectBox& g : im.ground_truth) categories.insert(g.category);
  }
  if (categories.empty()) throw Error(ErrorCode::kUndefinedAp, "undefined AP");

  double sum = 0.0;
  for (const std::string& cat : categories) {
    const PrCurve c = PrecisionRecall(images, cat, iou_thresh);
    // All-point interpolation: precision envelope from the right.
    std::vector<double> envelope = c.precision;
    for (int i = static_cast<int>(envelope.size()) - 2; i >= 0; --i) {
      envelope[i] = std::max(envelope[i], envelope[i + 1]);
    }
    double ap = 0.0;
    double prev_recall = 0.0;
    for (size_t i = 0; i < envelope.size(); ++i) {
      ap += (c.recall[i] - prev_recall) * envelope[i];
      prev_recall = c.recall[i];
    }
    sum += ap;
  }
  return sum / static_cast<double>(categories.size());
}

double AveragePrecision(std::span<const Detection> detections,
                        std::span<const ObjectBox> ground_truth, double iou_thresh) {
  const ImageBoxes one{{detections.begin(), detections.end()},
                       {ground_truth.begin(), ground_truth.end()}};
  return AveragePrecision(std::span<const ImageBoxes>(&one, 1), iou_thresh);
}

}  // namespace glyphfuse::metrics
