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
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "glyphfuse/metrics/metrics.hpp"

namespace testing {

/// Textbook Wagner-Fischer table over bytes; callers pass ASCII.
inline int LevenshteinTable(const std::string& a, const std::string& b) {
  std::vector<std::vector<int>> d(a.size() + 1, std::vector<int>(b.size() + 1));
  for (size_t i = 0; i <= a.size(); ++i) d[i][0] = static_cast<int>(i);
  for (size_t j = 0; j <= b.size(); ++j) d[0][j] = static_cast<int>(j);
  for (size_t i = 1; i <= a.size(); ++i)
    for (size_t j = 1; j <= b.size(); ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
  return d[a.size()][b.size()];
}

inline double IouOracle(const glyphfuse::BBox& a, const glyphfuse::BBox& b) {
  const double iw = std::max(0.0, std::min(a.x1, b.x1) - std::max(a.x0, b.x0));
  const double ih = std::max(0.0, std::min(a.y1, b.y1) - std::max(a.y0, b.y0));
  const double inter = iw * ih;
  const double uni = (a.x1 - a.x0) * (a.y1 - a.y0) + (b.x1 - b.x0) * (b.y1 - b.y0) - inter;
  return uni > 0 ? inter / uni : 0.0;
}

/// Brute-force AP: rank every detection of a category across images, mark
/// each true or false positive by greedy matching, then for every rank
/// compute precision and recall explicitly and integrate the interpolated
/// precision max_{k' >= k} p(k') over the recall increments.
inline double BruteForceAp(const std::vector<glyphfuse::metrics::ImageBoxes>& images,
                           double thresh) {
  std::set<std::string> cats;
  for (const auto& im : images)
    for (const auto& g : im.ground_truth) cats.insert(g.category);
  double sum = 0.0;
  for (const std::string& cat : cats) {
    struct Ranked {
      double conf;
      size_t image;
      glyphfuse::BBox box;
    };
    std::vector<Ranked> ranked;
    int total_gt = 0;
    for (size_t i = 0; i < images.size(); ++i) {
      for (const auto& d : images[i].detections)
        if (d.category == cat) ranked.push_back({d.confidence, i, d.bbox});
      for (const auto& g : images[i].ground_truth) total_gt += g.category == cat;
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const Ranked& a, const Ranked& b) { return a.conf > b.conf; });
    std::map<std::pair<size_t, size_t>, bool> used;
    std::vector<int> tp;
    for (const Ranked& r : ranked) {
      double best = -1.0;
      size_t best_j = 0;
      const auto& gts = images[r.image].ground_truth;
      for (size_t j = 0; j < gts.size(); ++j) {
        if (gts[j].category != cat || used[{r.image, j}]) continue;
        const double iou = IouOracle(r.box, gts[j].bbox);
        if (iou > best) best = iou, best_j = j;
      }
      if (best >= thresh) {
        used[{r.image, best_j}] = true;
        tp.push_back(1);
      } else {
        tp.push_back(0);
      }
    }
    std::vector<double> prec, rec;
    for (size_t k = 0; k < tp.size(); ++k) {
      int hits = 0;
      for (size_t m = 0; m <= k; ++m) hits += tp[m];
      prec.push_back(double(hits) / double(k + 1));
      rec.push_back(double(hits) / total_gt);
    }
    double ap = 0.0, prev_rec = 0.0;
    for (size_t k = 0; k < tp.size(); ++k) {
      if (!tp[k]) continue;
      double interp = 0.0;
      for (size_t m = k; m < tp.size(); ++m) interp = std::max(interp, prec[m]);
      ap += (rec[k] - prev_rec) * interp;
      prev_rec = rec[k];
    }
    sum += ap;
  }
  return sum / static_cast<double>(cats.size());
}

/// Every string over {a, b, c} of length at most max_len, shortest first.
inline std::vector<std::string> AllStrings(int max_len) {
  std::vector<std::string> out{""};
  for (size_t start = 0; start < out.size(); ++start) {
    if (static_cast<int>(out[start].size()) == max_len) continue;
    for (char c : {'a', 'b', 'c'}) out.push_back(out[start] + c);
  }
  return out;
}

/// Random detection scene: 1-3 images with up to 5 boxes and 5 detections each,
/// half of the detections jittered copies of a ground-truth box.
inline std::vector<glyphfuse::metrics::ImageBoxes> RandomScene(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> images(1, 3);
  std::uniform_int_distribution<int> boxes(0, 5);
  std::uniform_real_distribution<double> pos(0, 40), ext(5, 25), jitter(-8, 8), conf(0, 1);
  const char* cats[] = {"dog", "car"};
  std::vector<glyphfuse::metrics::ImageBoxes> scene(images(rng));
  int gt_total = 0;
  for (glyphfuse::metrics::ImageBoxes& im : scene) {
    const int g = boxes(rng);
    for (int i = 0; i < g; ++i) {
      const double x = pos(rng), y = pos(rng);
      im.ground_truth.push_back({cats[rng() % 2], {x, y, x + ext(rng), y + ext(rng)}});
    }
    gt_total += g;
    const int d = boxes(rng);
    for (int i = 0; i < d; ++i) {
      // Half of the detections perturb a ground-truth box, the rest are random.
      glyphfuse::BBox b;
      std::string cat = cats[rng() % 2];
      if (!im.ground_truth.empty() && rng() % 2) {
        const glyphfuse::ObjectBox& src = im.ground_truth[rng() % im.ground_truth.size()];
        b = {src.bbox.x0 + jitter(rng), src.bbox.y0 + jitter(rng), src.bbox.x1 + jitter(rng),
             src.bbox.y1 + jitter(rng)};
        if (b.x1 <= b.x0) std::swap(b.x0, b.x1);
        if (b.y1 <= b.y0) std::swap(b.y0, b.y1);
        cat = src.category;
      } else {
        const double x = pos(rng), y = pos(rng);
        b = {x, y, x + ext(rng), y + ext(rng)};
      }
      im.detections.push_back({cat, b, conf(rng)});
    }
  }
  if (gt_total == 0) scene[0].ground_truth.push_back({"dog", {1, 1, 10, 10}});
  return scene;
}

}  // namespace testing
