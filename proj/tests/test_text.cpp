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
#include <array>
#include <cmath>
#include <random>

#include <boost/math/distributions/chi_squared.hpp>
#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>

#include "doctest.h"

#include "glyphfuse/error.hpp"
#include "glyphfuse/text/color.hpp"
#include "glyphfuse/text/font.hpp"
#include "glyphfuse/text/glyph.hpp"
#include "glyphfuse/text/layout.hpp"
#include "support.hpp"

using namespace glyphfuse;
using namespace glyphfuse::text;

namespace {

const FontFace& Font() {
  static const FontFace face(DefaultFontPath());
  return face;
}

cv::Mat Binary(const cv::Mat& coverage) { return coverage >= 128; }

// Every ink pixel of `a` lies within one pixel of ink in `b`.
bool WithinOnePixel(const cv::Mat& a, const cv::Mat& b) {
  cv::Mat grown;
  cv::dilate(b, grown, cv::getStructuringElement(cv::MORPH_RECT, {3, 3}));
  return cv::countNonZero(a & ~grown) == 0;
}

region::CandidateRegion Candidate(BBox rect) {
  region::CandidateRegion c;
  c.rect = rect;
  c.quad = Quad::FromBBox(rect);
  return c;
}

const Quad kGenerous = Quad::FromBBox({0, 0, 400, 400});

}  // namespace

TEST_CASE("utf-8 decoding") {
  CHECK(DecodeUtf8("aé東") == std::vector<char32_t>{U'a', U'é', U'東'});
  CHECK_THROWS_AS(DecodeUtf8("\xC3"), Error);
  CHECK_THROWS_AS(DecodeUtf8("\xFF"), Error);
}

TEST_CASE("font metrics") {
  const FontMetrics& m = Font().metrics();
  CHECK(m.units_per_em() > 0);
  CHECK(m.ascender() > 0);
  CHECK(m.descender() < 0);
  const int space = m.GlyphIndex(U' ');
  REQUIRE(space != 0);
  CHECK_FALSE(m.Bounds(space).has_value());
  CHECK(m.AdvanceWidth(space) > 0);
  CHECK_FALSE(Font().metrics().Covers(U'東'));
  // Advances add up across a string.
  const int px = 40;
  CHECK(Font().AdvancePx("II", px) == doctest::Approx(2 * Font().AdvancePx("I", px)));
}

TEST_CASE("single stroke ink span follows the outline bounds") {
  const int px = 64;
  const FontMetrics& m = Font().metrics();
  const auto box = m.Bounds(m.GlyphIndex(U'I'));
  REQUIRE(box.has_value());
  const double expected = double(box->x_max - box->x_min) * px / m.units_per_em();
  const GlyphPatch p = RasterizeGlyph(Font(), "I", {.font_px = px}, kGenerous);
  std::vector<cv::Point> ink;
  cv::findNonZero(p.coverage, ink);
  const cv::Rect r = cv::boundingRect(ink);
  CHECK(std::abs(r.width - expected) <= 1.0);
  // The advance is wider than the ink by the two side bearings.
  CHECK(Font().AdvancePx("I", px) > r.width);
}

TEST_CASE("uncovered codepoints are reported") {
  try {
    RasterizeGlyph(Font(), "ok東", {}, kGenerous);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUncoveredCodepoint);
  }
}

TEST_CASE("rotating by 90 degrees transposes and flips the mask") {
  for (const char* text : {"Hg", "OPEN\nSALE", "b"}) {
    const GlyphPatch a = RasterizeGlyph(Font(), text, {.font_px = 32}, kGenerous);
    const GlyphPatch b =
        RasterizeGlyph(Font(), text, {.font_px = 32, .rotation_deg = 90.0}, kGenerous);
    cv::Mat turned;
    cv::rotate(a.coverage, turned, cv::ROTATE_90_COUNTERCLOCKWISE);
    REQUIRE(std::abs(turned.cols - b.coverage.cols) <= 1);
    REQUIRE(std::abs(turned.rows - b.coverage.rows) <= 1);
    const cv::Rect common(0, 0, std::min(turned.cols, b.coverage.cols),
                          std::min(turned.rows, b.coverage.rows));
    const cv::Mat x = Binary(turned(common)), y = Binary(b.coverage(common));
    CHECK(WithinOnePixel(x, y));
    CHECK(WithinOnePixel(y, x));
  }
}

TEST_CASE("bold is a superset of plain") {
  const GlyphPatch plain = RasterizeGlyph(Font(), "Bold", {.font_px = 28}, kGenerous);
  const GlyphPatch bold = RasterizeGlyph(Font(), "Bold", {.font_px = 28, .bold = true}, kGenerous);
  // Both are cropped to their ink; the dilation grows the box by one pixel a side.
  REQUIRE(bold.coverage.cols == plain.coverage.cols + 2);
  REQUIRE(bold.coverage.rows == plain.coverage.rows + 2);
  const cv::Mat inner = bold.coverage(cv::Rect(1, 1, plain.coverage.cols, plain.coverage.rows));
  cv::Mat below;
  cv::compare(inner, plain.coverage, below, cv::CMP_LT);
  CHECK(cv::countNonZero(below) == 0);
}

TEST_CASE("border ring sits outside the strokes") {
  const GlyphPatch p =
      RasterizeGlyph(Font(), "Ring", {.font_px = 28, .border = true}, kGenerous);
  CHECK(cv::countNonZero(p.outline) > 0);
  const GlyphPatch q = RasterizeGlyph(Font(), "Ring", {.font_px = 28}, kGenerous);
  CHECK(cv::countNonZero(q.outline) == 0);
}

TEST_CASE("style limits") {
  CHECK_THROWS_AS(CheckStyle({.font_px = 5}), Error);
  CHECK_THROWS_AS(CheckStyle({.font_px = 20, .twist_amp = 5.01}), Error);
  CHECK_NOTHROW(CheckStyle({.font_px = 20, .twist_amp = 5.0}));
  CHECK_THROWS_AS(CheckStyle({.font_px = 20, .rotation_deg = 181}), Error);
}

TEST_CASE("effective quad stays inside the placement or the call fails") {
  const Quad small = Quad::FromBBox({100, 100, 140, 120});
  try {
    RasterizeGlyph(Font(), "MARKET", {.font_px = 30}, small);
    FAIL("expected text does not fit");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kTextDoesNotFit);
  }
  const Quad place = Quad::FromBBox({50, 60, 350, 260});
  const GlyphPatch p =
      RasterizeGlyph(Font(), "twisted", {.font_px = 30, .rotation_deg = -30, .twist_amp = 4},
                     place);
  for (const Point2& c : p.effective_quad.corners) CHECK(place.Contains(c));
  CHECK(p.effective_quad.IsClockwise());
  const Point2 mid = p.effective_quad.Centroid();
  CHECK(std::abs(mid.x - 200) <= 1.0);
  CHECK(std::abs(mid.y - 160) <= 1.0);
}

TEST_CASE("glyph composition") {
  const cv::Size dims(300, 200);
  SUBCASE("no patches") {
    CHECK(cv::countNonZero(ComposeGlyphImage({}, dims)) == 0);
  }
  const GlyphPatch a = RasterizeGlyph(Font(), "left", {.font_px = 20}, Quad::FromBBox({10, 10, 140, 90}));
  const GlyphPatch b =
      RasterizeGlyph(Font(), "right", {.font_px = 20, .rotation_deg = 20}, Quad::FromBBox({160, 100, 290, 190}));
  SUBCASE("one patch is placed at its origin") {
    const cv::Mat canvas = ComposeGlyphImage(std::vector{a}, dims);
    CHECK(cv::norm(canvas(a.rect()), a.coverage, cv::NORM_INF) == 0);
    cv::Mat rest = canvas.clone();
    rest(a.rect()).setTo(0);
    CHECK(cv::countNonZero(rest) == 0);
  }
  SUBCASE("disjoint patches keep their own pixels") {
    const cv::Mat canvas = ComposeGlyphImage(std::vector{a, b}, dims);
    CHECK(cv::norm(canvas(a.rect()), a.coverage, cv::NORM_INF) == 0);
    CHECK(cv::norm(canvas(b.rect()), b.coverage, cv::NORM_INF) == 0);
  }
  SUBCASE("overlap is a collision") {
    const GlyphPatch c =
        RasterizeGlyph(Font(), "left", {.font_px = 20}, Quad::FromBBox({20, 20, 150, 100}));
    try {
      ComposeGlyphImage(std::vector{a, c}, dims);
      FAIL("expected a collision");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kGlyphCollision);
    }
  }
  SUBCASE("a patch outside the canvas") {
    CHECK_THROWS_AS(ComposeGlyphImage(std::vector{b}, cv::Size(200, 150)), Error);
  }
}

TEST_CASE("text color contrast") {
  SUBCASE("black background") {
    const Rgb c = TextColorFor({0, 0, 0});
    CHECK(c.r == c.g);
    CHECK(c.g == c.b);
    CHECK(c.r >= 179);
    CHECK(ContrastRatio(c, {0, 0, 0}) >= kMinContrast);
  }
  SUBCASE("white background") {
    // Solve (1 + 0.05) / (L + 0.05) = 4.5 for the gray level by bisection.
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      const double lum = mid <= 0.04045 ? mid / 12.92 : std::pow((mid + 0.055) / 1.055, 2.4);
      (1.05 / (lum + 0.05) >= 4.5 ? lo : hi) = mid;
    }
    const Rgb c = TextColorFor({255, 255, 255});
    CHECK(c.r <= 96);
    CHECK(c.r / 255.0 <= lo);
    CHECK(ContrastRatio(c, {255, 255, 255}) >= kMinContrast);
  }
  SUBCASE("every gray and a spread of colors reach 4.5:1") {
    for (int v = 0; v < 256; ++v) {
      const Rgb bg{std::uint8_t(v), std::uint8_t(v), std::uint8_t(v)};
      CHECK(ContrastRatio(TextColorFor(bg), bg) >= kMinContrast);
    }
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> ch(0, 255);
    for (int i = 0; i < 2000; ++i) {
      const Rgb bg{std::uint8_t(ch(rng)), std::uint8_t(ch(rng)), std::uint8_t(ch(rng))};
      CHECK(ContrastRatio(TextColorFor(bg), bg) >= kMinContrast);
    }
  }
  SUBCASE("ratio is symmetric and at least one") {
    CHECK(ContrastRatio({10, 20, 30}, {200, 100, 50}) == ContrastRatio({200, 100, 50}, {10, 20, 30}));
    CHECK(ContrastRatio({0, 0, 0}, {255, 255, 255}) == doctest::Approx(21.0));
    CHECK(ContrastRatio({7, 7, 7}, {7, 7, 7}) == 1.0);
  }
  SUBCASE("mean color reads only masked pixels") {
    cv::Mat img(10, 10, CV_8UC3, cv::Scalar(0, 0, 255));
    img(cv::Rect(0, 0, 5, 10)).setTo(cv::Scalar(255, 0, 0));
    cv::Mat mask(10, 10, CV_8UC1, cv::Scalar(0));
    mask(cv::Rect(0, 0, 5, 10)).setTo(255);
    CHECK(MeanColor(img, mask) == Rgb{0, 0, 255});
  }
}

TEST_CASE("layout sampling") {
  const std::vector<std::string> lexicon{"alpha", "beta", "gamma"};
  SUBCASE("a single candidate forces one region") {
    const std::vector c{Candidate({0, 0, 200, 100})};
    for (std::uint64_t s = 0; s < 50; ++s) CHECK(SampleLayout(c, lexicon, s).region_count() == 1);
  }
  SUBCASE("same seed, same draw") {
    std::vector<region::CandidateRegion> c;
    for (int i = 0; i < 5; ++i) c.push_back(Candidate({0, i * 100.0, 300, i * 100.0 + 90}));
    const LayoutDraw a = SampleLayout(c, lexicon, 77);
    const LayoutDraw b = SampleLayout(c, lexicon, 77);
    REQUIRE(a.region_count() == b.region_count());
    for (int i = 0; i < a.region_count(); ++i) {
      CHECK(a.regions[i].candidate == b.regions[i].candidate);
      CHECK(a.regions[i].lines == b.regions[i].lines);
    }
  }
  SUBCASE("region count is uniform over 1..8 (chi-squared)") {
    std::vector<region::CandidateRegion> c;
    for (int i = 0; i < 8; ++i) c.push_back(Candidate({0, i * 120.0, 400, i * 120.0 + 110}));
    std::array<int, 8> counts{};
    const int draws = 10000;
    for (int s = 0; s < draws; ++s) {
      const LayoutDraw d = SampleLayout(c, lexicon, 1000 + s);
      REQUIRE(d.region_count() >= 1);
      REQUIRE(d.region_count() <= 8);
      ++counts[d.region_count() - 1];
      std::vector<int> used;
      for (const auto& r : d.regions) used.push_back(r.candidate);
      std::sort(used.begin(), used.end());
      REQUIRE(std::adjacent_find(used.begin(), used.end()) == used.end());
    }
    double chi2 = 0.0;
    const double expected = draws / 8.0;
    for (int k : counts) chi2 += (k - expected) * (k - expected) / expected;
    const boost::math::chi_squared dist(7);
    CHECK(boost::math::cdf(boost::math::complement(dist, chi2)) > 0.01);
  }
  SUBCASE("line counts respect the height at the minimum font size") {
    const std::vector c{Candidate({0, 0, 300, 20})};  // 20 / (1.17 * 6) -> 2 lines
    CHECK(MaxLinesFor(20, LayoutConfig{}) == 2);
    for (std::uint64_t s = 0; s < 200; ++s) {
      const LayoutDraw d = SampleLayout(c, lexicon, s);
      CHECK(d.regions[0].line_count() >= 1);
      CHECK(d.regions[0].line_count() <= 2);
      for (const auto& line : d.regions[0].lines) {
        CHECK(line.size() >= 1);
        CHECK(line.size() <= 2);
      }
    }
  }
  SUBCASE("no feasible candidate") {
    const std::vector c{Candidate({0, 0, 300, 6})};
    try {
      SampleLayout(c, lexicon, 1);
      FAIL("expected no feasible layout");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kNoFeasibleLayout);
    }
  }
  SUBCASE("text joins words and lines") {
    LayoutRegion r;
    r.lines = {{"a", "b"}, {"c"}};
    CHECK(r.Text() == "a b\nc");
  }
}

TEST_CASE("lexicon file") {
  testing::TempDir dir("lex");
  testing::WriteFile(dir / "lex.txt", "  OPEN \n\nSALE\r\n");
  CHECK(ReadLexicon(dir / "lex.txt") == std::vector<std::string>{"OPEN", "SALE"});
  testing::WriteFile(dir / "empty.txt", "\n \n");
  CHECK_THROWS_AS(ReadLexicon(dir / "empty.txt"), Error);
}
