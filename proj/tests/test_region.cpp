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

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "doctest.h"

#include "glyphfuse/error.hpp"
#include "glyphfuse/region/region_proposal.hpp"
#include "support.hpp"

using namespace glyphfuse;
using namespace glyphfuse::region;

namespace {

cv::Mat NoiseImage(int w, int h, std::uint64_t seed) {
  cv::Mat img(h, w, CV_8UC3);
  cv::RNG rng(seed);
  rng.fill(img, cv::RNG::UNIFORM, 0, 256);
  return img;
}

DepthMap ConstantDepth(int w, int h, double d) { return {cv::Mat(h, w, CV_64FC1, cv::Scalar(d))}; }

// Test-side texture measure: per-pixel central-difference gradient of the
// luma, averaged over each 16x16 cell. Any segment's score is a weighted
// mean of cell means, so it can never drop below the smallest cell mean.
double MinCellGradient(const cv::Mat& bgr, cv::Rect area) {
  cv::Mat lum(bgr.size(), CV_64FC1);
  for (int y = 0; y < bgr.rows; ++y) {
    for (int x = 0; x < bgr.cols; ++x) {
      const cv::Vec3b p = bgr.at<cv::Vec3b>(y, x);
      lum.at<double>(y, x) = 0.114 * p[0] + 0.587 * p[1] + 0.299 * p[2];
    }
  }
  auto L = [&](int y, int x) {
    return lum.at<double>(std::clamp(y, 0, bgr.rows - 1), std::clamp(x, 0, bgr.cols - 1));
  };
  double best = 1e300;
  for (int cy = area.y; cy < area.y + area.height; cy += 16) {
    for (int cx = area.x; cx < area.x + area.width; cx += 16) {
      double sum = 0.0;
      int n = 0;
      for (int y = cy; y < std::min(cy + 16, bgr.rows); ++y) {
        for (int x = cx; x < std::min(cx + 16, bgr.cols); ++x) {
          const double gx = 0.5 * (L(y, x + 1) - L(y, x - 1));
          const double gy = 0.5 * (L(y + 1, x) - L(y - 1, x));
          sum += std::hypot(gx, gy);
          ++n;
        }
      }
      best = std::min(best, sum / n);
    }
  }
  return best;
}

BBox BruteForceLargestRect(const cv::Mat& mask) {
  BBox best{};
  double best_area = 0.0;
  for (int y0 = 0; y0 < mask.rows; ++y0)
    for (int x0 = 0; x0 < mask.cols; ++x0)
      for (int y1 = y0 + 1; y1 <= mask.rows; ++y1)
        for (int x1 = x0 + 1; x1 <= mask.cols; ++x1) {
          const double area = double(x1 - x0) * (y1 - y0);
          if (area <= best_area) continue;
          if (cv::countNonZero(mask(cv::Rect(x0, y0, x1 - x0, y1 - y0))) == (x1 - x0) * (y1 - y0)) {
            best_area = area;
            best = {double(x0), double(y0), double(x1), double(y1)};
          }
        }
  return best;
}

}  // namespace

TEST_CASE("plane fit") {
  const int w = 64, h = 48;
  cv::Mat mask(h, w, CV_8UC1, cv::Scalar(0));
  cv::circle(mask, {30, 24}, 18, cv::Scalar(255), cv::FILLED);

  SUBCASE("constant depth") {
    const PlaneFit fit = FitDepthPlane(ConstantDepth(w, h, 4.25), mask);
    CHECK(std::abs(fit.plane.a) < 1e-12);
    CHECK(std::abs(fit.plane.b) < 1e-12);
    CHECK(fit.plane.c == doctest::Approx(4.25).epsilon(1e-12));
    CHECK(fit.rmse < 1e-12);
  }
  SUBCASE("exact linear field") {
    DepthMap d{cv::Mat(h, w, CV_64FC1)};
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) d.values.at<double>(y, x) = 0.5 * x + 0.2 * y + 3.0;
    const PlaneFit fit = FitDepthPlane(d, mask);
    CHECK(std::abs(fit.plane.a - 0.5) < 1e-9);
    CHECK(std::abs(fit.plane.b - 0.2) < 1e-9);
    CHECK(std::abs(fit.plane.c - 3.0) < 1e-9);
    CHECK(fit.rmse < 1e-9);
    const double n = std::hypot(std::hypot(fit.plane.normal[0], fit.plane.normal[1]), fit.plane.normal[2]);
    CHECK(n == doctest::Approx(1.0));
  }
  SUBCASE("noisy linear field: rmse tracks sigma") {
    const double sigma = 0.05;
    std::mt19937_64 rng(11);
    std::normal_distribution<double> noise(0.0, sigma);
    DepthMap d{cv::Mat(h, w, CV_64FC1)};
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) d.values.at<double>(y, x) = 0.01 * x - 0.02 * y + 5.0 + noise(rng);
    cv::Mat box(h, w, CV_8UC1, cv::Scalar(0));
    box(cv::Rect(0, 0, 40, 25)).setTo(255);  // 1000 pixels
    REQUIRE(cv::countNonZero(box) == 1000);
    const PlaneFit fit = FitDepthPlane(d, box);
    CHECK(std::abs(fit.rmse - sigma) < 0.2 * sigma);
  }
  SUBCASE("collinear support is degenerate") {
    cv::Mat line(h, w, CV_8UC1, cv::Scalar(0));
    line.row(10).setTo(255);
    CHECK_THROWS_AS(FitDepthPlane(ConstantDepth(w, h, 1.0), line), ValidationError);
    try {
      FitDepthPlane(ConstantDepth(w, h, 1.0), line);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kDegeneratePlane);
    }
  }
}

TEST_CASE("texture segmentation") {
  SUBCASE("uniform gray image is one flat segment") {
    const cv::Mat gray(96, 128, CV_8UC3, cv::Scalar(128, 128, 128));
    const Segmentation seg = SegmentTexture(gray);
    REQUIRE(seg.segment_count() == 1);
    CHECK(seg.texture_score[0] == 0.0);
    CHECK(seg.pixel_count[0] == 96 * 128);
  }
  SUBCASE("noise image has no smooth segment") {
    const cv::Mat noise = NoiseImage(128, 128, 3);
    const double floor = MinCellGradient(noise, {0, 0, 128, 128});
    const double texture_max = ProposalConfig{}.texture_max;
    REQUIRE(floor > texture_max);
    const Segmentation seg = SegmentTexture(noise);
    for (double s : seg.texture_score) CHECK(s >= floor - 1e-9);
  }
  SUBCASE("half smooth, half noise") {
    cv::Mat img = NoiseImage(128, 128, 4);
    img(cv::Rect(0, 0, 64, 128)).setTo(cv::Scalar(90, 140, 200));
    REQUIRE(MinCellGradient(img, {64, 0, 64, 128}) > ProposalConfig{}.texture_max);
    const Segmentation seg = SegmentTexture(img);
    int smooth = 0;
    for (int l = 0; l < seg.segment_count(); ++l) {
      if (seg.texture_score[l] > ProposalConfig{}.texture_max) continue;
      ++smooth;
      const cv::Mat m = seg.labels == l;
      CHECK(cv::countNonZero(m(cv::Rect(64, 0, 64, 128))) == 0);
    }
    CHECK(smooth == 1);
  }
  SUBCASE("labels cover every pixel") {
    const Segmentation seg = SegmentTexture(NoiseImage(80, 48, 5));
    double lo, hi;
    cv::minMaxLoc(seg.labels, &lo, &hi);
    CHECK(lo >= 0);
    CHECK(hi < seg.segment_count());
    int total = 0;
    for (int c : seg.pixel_count) total += c;
    CHECK(total == 80 * 48);
  }
  SUBCASE("tiny images are rejected") {
    try {
      SegmentTexture(cv::Mat(31, 64, CV_8UC3, cv::Scalar(0)));
      FAIL("expected image too small");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kImageTooSmall);
    }
  }
}

TEST_CASE("largest inscribed rectangle matches brute force") {
  std::mt19937_64 rng(21);
  std::bernoulli_distribution on(0.75);
  for (int trial = 0; trial < 40; ++trial) {
    cv::Mat mask(7, 9, CV_8UC1);
    for (int y = 0; y < mask.rows; ++y)
      for (int x = 0; x < mask.cols; ++x) mask.at<uchar>(y, x) = on(rng) ? 255 : 0;
    const BBox got = LargestInscribedRect(mask);
    const BBox want = BruteForceLargestRect(mask);
    CHECK(got.area() == want.area());
    if (got.valid()) {
      const cv::Rect r(int(got.x0), int(got.y0), int(got.width()), int(got.height()));
      CHECK(cv::countNonZero(mask(r)) == r.area());
    }
  }
  CHECK_FALSE(LargestInscribedRect(cv::Mat(5, 5, CV_8UC1, cv::Scalar(0))).valid());
}

TEST_CASE("candidate proposal") {
  SUBCASE("uniform image and flat depth give one candidate inside the margin") {
    const cv::Mat img(200, 300, CV_8UC3, cv::Scalar(60, 120, 180));
    const auto c = ProposeTextRegions(img, ConstantDepth(300, 200, 3.0));
    REQUIRE(c.size() == 1);
    // 2% margin: round(0.02 * 300) = 6 and round(0.02 * 200) = 4 pixels.
    CHECK(c[0].rect == BBox{6, 4, 294, 196});
    CHECK(c[0].quad == Quad::FromBBox(c[0].rect));
  }
  SUBCASE("noise image gives nothing") {
    const cv::Mat img = NoiseImage(128, 128, 6);
    CHECK(ProposeTextRegions(img, ConstantDepth(128, 128, 3.0)).empty());
  }
  SUBCASE("smooth wall next to foliage gives one candidate on the wall") {
    cv::Mat img = NoiseImage(256, 160, 7);
    img(cv::Rect(0, 0, 128, 160)).setTo(cv::Scalar(200, 200, 190));
    DepthMap d = ConstantDepth(256, 160, 4.0);
    cv::Mat foliage = d.values(cv::Rect(128, 0, 128, 160));
    cv::randu(foliage, 1.0, 3.0);
    const auto c = ProposeTextRegions(img, d);
    REQUIRE(c.size() == 1);
    CHECK(cv::countNonZero(c[0].mask(cv::Rect(128, 0, 128, 160))) == 0);
    CHECK(c[0].rect.x1 <= 128);
    CHECK(c[0].texture_score < ProposalConfig{}.texture_max);
  }
  SUBCASE("a smooth but curved surface fails the planarity test") {
    const cv::Mat img(128, 128, CV_8UC3, cv::Scalar(100, 100, 100));
    DepthMap d{cv::Mat(128, 128, CV_64FC1)};
    for (int y = 0; y < 128; ++y)
      for (int x = 0; x < 128; ++x) d.values.at<double>(y, x) = 1.0 + 0.001 * (x - 64) * (x - 64);
    CHECK(ProposeTextRegions(img, d).empty());
  }
  SUBCASE("deterministic and pairwise disjoint on fixture images") {
    const cv::Mat img = cv::imread((testing::kFixture / "images/1000001.png").string());
    const DepthMap d = ReadDepthMap(testing::kFixture / "depths/1000001.pfm");
    const auto a = ProposeTextRegions(img, d);
    const auto b = ProposeTextRegions(img, d);
    REQUIRE(a.size() == b.size());
    REQUIRE(!a.empty());
    for (size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].rect == b[i].rect);
      CHECK(cv::countNonZero(a[i].mask != b[i].mask) == 0);
      if (i > 0) CHECK(a[i - 1].rect.area() >= a[i].rect.area());
      for (size_t j = 0; j < i; ++j) CHECK(cv::countNonZero(a[i].mask & a[j].mask) == 0);
    }
  }
  SUBCASE("size mismatch") {
    const cv::Mat img(64, 64, CV_8UC3, cv::Scalar(0));
    CHECK_THROWS_AS(ProposeTextRegions(img, ConstantDepth(32, 64, 1.0)), Error);
  }
}

TEST_CASE("depth map files") {
  testing::TempDir dir("depth");
  DepthMap d{cv::Mat(20, 30, CV_64FC1)};
  cv::randu(d.values, 0.5, 9.5);
  WriteDepthMapPfm(dir / "a.pfm", d);
  const DepthMap back = ReadDepthMap(dir / "a.pfm");
  REQUIRE(back.values.size() == d.values.size());
  // PFM stores float32.
  CHECK(cv::norm(back.values, d.values, cv::NORM_INF) < 1e-6 * 9.5);

  cv::Mat raw(20, 30, CV_16UC1, cv::Scalar(2500));
  cv::imwrite((dir / "b.png").string(), raw);
  try {
    ReadDepthMap(dir / "b.png");
    FAIL("expected missing sidecar");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIo);
  }
  testing::WriteFile(dir / "b.json", R"({"depth_scale": 0.002})");
  CHECK(ReadDepthMap(dir / "b.png").values.at<double>(3, 4) == doctest::Approx(5.0));

  DepthMap bad{cv::Mat(4, 4, CV_64FC1, cv::Scalar(1.0))};
  bad.values.at<double>(2, 2) = -1.0;
  CHECK_THROWS_AS(CheckDepthMap(bad), ValidationError);
}
