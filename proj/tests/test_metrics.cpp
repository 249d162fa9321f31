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
#include <cmath>
#include <random>

#include "doctest.h"

#include "glyphfuse/error.hpp"
#include "glyphfuse/metrics/metrics.hpp"
#include "metrics_oracle.hpp"

using namespace glyphfuse;
using namespace glyphfuse::metrics;

TEST_CASE("normalized edit distance") {
  CHECK(Ned("cafe", "cafe") == 1.0);
  CHECK(Ned("", "abc") == 0.0);
  CHECK(Ned("", "") == 1.0);
  CHECK(Ned("kitten", "sitting") == doctest::Approx(1.0 - 3.0 / 7.0).epsilon(1e-15));
  CHECK(testing::LevenshteinTable("kitten", "sitting") == 3);
  // Distances count codepoints, not bytes.
  CHECK(EditDistance("café", "cafe") == 1);
  CHECK(Ned("東京", "東") == doctest::Approx(0.5));
}

TEST_CASE("edit distance matches the DP table on every pair up to length 4") {
  const auto strings = testing::AllStrings(4);
  REQUIRE(strings.size() == 121);
  for (const auto& a : strings) {
    for (const auto& b : strings) {
      const int d = testing::LevenshteinTable(a, b);
      REQUIRE(EditDistance(a, b) == d);
      const double want = a.empty() && b.empty() ? 1.0 : 1.0 - double(d) / std::max(a.size(), b.size());
      REQUIRE(Ned(a, b) == want);
    }
  }
}

TEST_CASE("ocr word accuracy") {
  CHECK(OcrWordAccuracy(std::vector<Transcription>{{"OPEN", "OPEN"}, {"a", "a"}}) == 1.0);
  CHECK(OcrWordAccuracy(std::vector<Transcription>{
            {"OPEN", "OPEN"}, {"x", "a"}, {"y", "b"}, {"z", "c"}}) == 0.25);
  CHECK(OcrWordAccuracy(std::vector<Transcription>{{"OPEN ", "OPEN"}}) == 1.0);
  CHECK(OcrWordAccuracy(std::vector<Transcription>{{"open", "OPEN"}}) == 0.0);
  try {
    OcrWordAccuracy({});
    FAIL("expected no regions");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNoRegions);
  }
}

TEST_CASE("intersection over union") {
  CHECK(Iou({0, 0, 2, 2}, {0, 0, 2, 2}) == 1.0);
  CHECK(Iou({0, 0, 1, 1}, {2, 2, 3, 3}) == 0.0);
  CHECK(Iou({0, 0, 2, 2}, {1, 1, 3, 3}) == doctest::Approx(1.0 / 7.0).epsilon(1e-15));
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0, 10);
  for (int i = 0; i < 500; ++i) {
    const BBox a{u(rng), u(rng), 10 + u(rng), 10 + u(rng)}, b{u(rng), u(rng), 10 + u(rng), 10 + u(rng)};
    const double dx = u(rng), dy = u(rng);
    CHECK(Iou(a, b) == Iou(b, a));
    CHECK(Iou(a, b) == doctest::Approx(testing::IouOracle(a, b)));
    CHECK(Iou(a, b) == doctest::Approx(Iou({a.x0 + dx, a.y0 + dy, a.x1 + dx, a.y1 + dy},
                                           {b.x0 + dx, b.y0 + dy, b.x1 + dx, b.y1 + dy})));
  }
}

TEST_CASE("average precision") {
  const std::vector<ObjectBox> gt{{"dog", {0, 0, 10, 10}}, {"dog", {20, 20, 30, 30}}};
  SUBCASE("perfect detector") {
    const std::vector<Detection> det{{"dog", {0, 0, 10, 10}, 1.0}, {"dog", {20, 20, 30, 30}, 1.0}};
    CHECK(AveragePrecision(det, gt) == 1.0);
  }
  SUBCASE("IoU 0.3 never matches at 0.5") {
    // (0,0,10,10) vs (0,0,10,x): IoU = x / 10 when x <= 10.
    const std::vector<ObjectBox> one{{"dog", {0, 0, 10, 10}}};
    const std::vector<Detection> det{{"dog", {0, 0, 10, 3}, 0.9}};
    REQUIRE(Iou(det[0].bbox, one[0].bbox) == doctest::Approx(0.3));
    CHECK(AveragePrecision(det, one) == 0.0);
  }
  SUBCASE("three detections, two ground truths") {
    const std::vector<Detection> det{
        {"dog", {1, 1, 11, 11}, 0.9}, {"dog", {50, 50, 60, 60}, 0.8}, {"dog", {20, 21, 30, 30}, 0.7}};
    const std::vector<ImageBoxes> scene{{det, gt}};
    const double want = testing::BruteForceAp(scene, 0.5);
    // Ranks: TP, FP, TP -> precision 1, 1/2, 2/3 at recall 1/2, 1/2, 1.
    CHECK(want == doctest::Approx(0.5 * 1.0 + 0.5 * (2.0 / 3.0)));
    CHECK(AveragePrecision(det, gt) == doctest::Approx(want).epsilon(1e-12));
  }
  SUBCASE("categories without ground truth are ignored; missing ground truth is an error") {
    const std::vector<Detection> det{{"dog", {0, 0, 10, 10}, 1.0}, {"dog", {20, 20, 30, 30}, 0.5},
                                     {"cat", {0, 0, 5, 5}, 0.9}};
    CHECK(AveragePrecision(det, gt) == 1.0);
    try {
      AveragePrecision(det, std::vector<ObjectBox>{});
      FAIL("expected undefined AP");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kUndefinedAp);
    }
  }
  SUBCASE("detections only match ground truth in their own image") {
    const std::vector<ImageBoxes> scene{
        {{{"dog", {0, 0, 10, 10}, 0.9}}, {}},
        {{}, {{"dog", {0, 0, 10, 10}}}},
    };
    CHECK(AveragePrecision(scene) == 0.0);
  }
}

TEST_CASE("average precision matches brute force on random scenes") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const auto scene = testing::RandomScene(rng);
    const double want = testing::BruteForceAp(scene, 0.5);
    const double got = AveragePrecision(scene, 0.5);
    REQUIRE(got == doctest::Approx(want).epsilon(1e-12));

    auto rescaled = scene;
    for (auto& im : rescaled)
      for (auto& d : im.detections) d.confidence = std::exp(5.0 * d.confidence) - 7.0;
    REQUIRE(AveragePrecision(rescaled, 0.5) == got);
  }
}

TEST_CASE("precision-recall curve") {
  const std::vector<ImageBoxes> scene{{{{"dog", {1, 1, 11, 11}, 0.9}, {"dog", {50, 50, 60, 60}, 0.8}},
                                       {{"dog", {0, 0, 10, 10}}}}};
  const PrCurve pr = PrecisionRecall(scene, "dog", 0.5);
  CHECK(pr.precision == std::vector<double>{1.0, 0.5});
  CHECK(pr.recall == std::vector<double>{1.0, 1.0});
}
