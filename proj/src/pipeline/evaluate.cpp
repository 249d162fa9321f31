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
#include "glyphfuse/pipeline/evaluate.hpp"

#include <map>
#include <sstream>

#include "json.hpp"

#include "glyphfuse/error.hpp"
#include "glyphfuse/metrics/metrics.hpp"

namespace glyphfuse::pipeline {

double MeanRegionNed(const Sample& sample, std::span<const std::string> predictions) {
  if (predictions.size() != sample.text_regions.size()) {
    throw Error(ErrorCode::kCoverageGap, "coverage gap in sample " + sample.id);
  }
  if (predictions.empty()) return 1.0;
  double sum = 0.0;
  for (size_t i = 0; i < predictions.size(); ++i) {
    sum += metrics::Ned(sample.text_regions[i].text, predictions[i]);
  }
  return sum / static_cast<double>(predictions.size());
}

OcrFilterResult OcrFilter(std::span<const Sample> samples,
                          std::span<const PredictionRecord> transcriptions, double threshold) {
  std::map<std::string, const PredictionRecord*> by_id;
  for (const PredictionRecord& r : transcriptions) by_id[r.sample.id] = &r;
  OcrFilterResult out;
  for (const Sample& s : samples) {
    const auto it = by_id.find(s.id);
    if (it == by_id.end()) {
      throw Error(ErrorCode::kCoverageGap, "coverage gap: no transcription for sample " + s.id);
    }
    const double ned = MeanRegionNed(s, it->second->pred_text);
    if (ned < threshold) {
      out.dropped.emplace_back(s.id, ned);
    } else {
      out.kept.push_back(s);
    }
  }
  return out;
}

MetricSelection ParseMetricSelection(const std::string& list) {
  MetricSelection sel{false, false, false};
  std::stringstream ss(list);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item == "ocr") {
      sel.ocr = true;
    } else if (item == "ned") {
      sel.ned = true;
    } else if (item == "ap") {
      sel.ap = true;
    } else if (item == "all") {
      sel = {true, true, true};
    } else {
      throw ValidationError(ErrorCode::kInvalidValue, "metrics", "unknown metric '" + item + "'");
    }
  }
  return sel;
}

EvalReport Evaluate(std::span<const PredictionRecord> predictions,
                    std::span<const Sample> ground_truth, const MetricSelection& selection,
                    double iou_thresh) {
  std::map<std::string, const PredictionRecord*> by_id;
  for (const PredictionRecord& p : predictions) {
    if (!by_id.emplace(p.sample.id, &p).second) {
      throw Error(ErrorCode::kIdMismatch, "id mismatch: duplicate prediction " + p.sample.id);
    }
  }
  if (by_id.size() != ground_truth.size()) {
    throw Error(ErrorCode::kIdMismatch, "id mismatch: " + std::to_string(by_id.size()) +
                                            " predictions for " +
                                            std::to_string(ground_truth.size()) + " samples");
  }

  EvalReport report;
  report.selection = selection;
  report.samples = static_cast<int>(ground_truth.size());
  std::vector<metrics::Transcription> all_text;
  double ned_sum = 0.0;
  std::vector<metrics::ImageBoxes> images;
  for (const Sample& gt : ground_truth) {
    const auto it = by_id.find(gt.id);
    if (it == by_id.end()) throw Error(ErrorCode::kIdMismatch, "id mismatch: no prediction for " + gt.id);
    const PredictionRecord& pred = *it->second;
    if (pred.pred_text.size() != gt.text_regions.size()) {
      throw Error(ErrorCode::kCoverageGap, "coverage gap in sample " + gt.id);
    }
    SampleScores row;
    row.id = gt.id;
    std::vector<metrics::Transcription> text;
    for (size_t i = 0; i < gt.text_regions.size(); ++i) {
      text.push_back({pred.pred_text[i], gt.text_regions[i].text});
    }
    if (!text.empty()) {
      if (selection.ocr) row.ocr_accuracy = metrics::OcrWordAccuracy(text);
      double s = 0.0;
      for (const auto& t : text) s += metrics::Ned(t.ground_truth, t.predicted);
      ned_sum += s;
      if (selection.ned) row.ned = s / static_cast<double>(text.size());
    }
    all_text.insert(all_text.end(), text.begin(), text.end());

    metrics::ImageBoxes boxes;
    boxes.ground_truth = gt.objects;
    for (size_t i = 0; i < pred.sample.objects.size(); ++i) {
      boxes.detections.push_back({pred.sample.objects[i].category, pred.sample.objects[i].bbox,
                                  pred.confidence[i]});
    }
    if (selection.ap && !gt.objects.empty()) {
      row.ap = metrics::AveragePrecision(std::span<const metrics::ImageBoxes>(&boxes, 1), iou_thresh);
    }
    images.push_back(std::move(boxes));
    report.per_sample.push_back(std::move(row));
  }
  report.regions = static_cast<int>(all_text.size());
  if (!all_text.empty()) {
    if (selection.ocr) report.ocr_accuracy = metrics::OcrWordAccuracy(all_text);
    if (selection.ned) report.ned = ned_sum / static_cast<double>(all_text.size());
  }
  if (selection.ap) {
    bool any_gt = false;
    for (const auto& im : images) any_gt = any_gt || !im.ground_truth.empty();
    if (any_gt) report.ap = metrics::AveragePrecision(images, iou_thresh);
  }
  return report;
}

std::string EvalReportJson(const EvalReport& report) {
  using json = nlohmann::ordered_json;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json j;
  j["samples"] = report.samples;
  j["regions"] = report.regions;
  json agg = json::object();
  if (report.selection.ocr) agg["ocr_accuracy"] = opt(report.ocr_accuracy);
  if (report.selection.ned) agg["ned"] = opt(report.ned);
  if (report.selection.ap) agg["ap"] = opt(report.ap);
  j["aggregate"] = agg;
  j["per_sample"] = json::array();
  for (const SampleScores& s : report.per_sample) {
    json row;
    row["id"] = s.id;
    if (report.selection.ocr) row["ocr_accuracy"] = opt(s.ocr_accuracy);
    if (report.selection.ned) row["ned"] = opt(s.ned);
    if (report.selection.ap) row["ap"] = opt(s.ap);
    j["per_sample"].push_back(row);
  }
  return j.dump(2) + "\n";
}

}  // namespace glyphfuse::pipeline
