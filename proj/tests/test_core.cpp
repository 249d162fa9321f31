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
#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include "doctest.h"
#include "json.hpp"

#include "glyphfuse/core/manifest.hpp"
#include "glyphfuse/core/rules.hpp"
#include "glyphfuse/error.hpp"
#include "glyphfuse/seed.hpp"
#include "support.hpp"

using namespace glyphfuse;

namespace {

Sample BaseSample() {
  Sample s;
  s.id = "s1";
  s.image_ref = "images/s1.png";
  s.depth_ref = "depths/s1.pfm";
  s.glyph_ref = "glyphs/s1.png";
  s.font = "DejaVuSans.ttf";
  s.width = 512;
  s.height = 512;
  s.caption = "a";
  return s;
}

TextRegion Region(BBox b, int lines = 1, std::string text = "OPEN") {
  TextRegion r;
  r.text = std::move(text);
  r.quad = Quad::FromBBox(b);
  r.lines = lines;
  r.font_px = 12;
  return r;
}

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kIo;
}

// Rule-valid sample with awkward doubles in every geometric field.
Sample RandomSample(std::mt19937_64& rng, int index) {
  Sample s = BaseSample();
  s.id = "r" + std::to_string(index);
  std::uniform_int_distribution<int> dim(64, 1024);
  s.width = dim(rng);
  s.height = dim(rng);
  const char* words[] = {"OPEN", "café", "naïve", "Zone\nGate", "\"quoted\"", "tab\there", "東京"};
  std::uniform_int_distribution<int> word(0, 6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int m = std::uniform_int_distribution<int>(1, 8)(rng);
  // Stack regions in horizontal strips so they stay disjoint and large.
  const double strip = static_cast<double>(s.height) / m;
  for (int i = 0; i < m; ++i) {
    const double x0 = u(rng) * 0.1 * s.width;
    const double x1 = s.width * (0.6 + 0.4 * u(rng));
    const double y0 = i * strip + u(rng) * 0.1 * strip;
    const double y1 = (i + 1) * strip - u(rng) * 0.1 * strip;
    TextRegion r = Region({x0, y0, x1, y1}, std::uniform_int_distribution<int>(1, 8)(rng),
                          words[word(rng)]);
    r.rotation_deg = (u(rng) - 0.5) * 360.0;
    r.bold = u(rng) < 0.5;
    r.border = u(rng) < 0.5;
    s.text_regions.push_back(r);
  }
  const int n = std::uniform_int_distribution<int>(0, 4)(rng);
  for (int k = 0; k < n; ++k) {
    const double x0 = u(rng) * s.width * 0.5, y0 = u(rng) * s.height * 0.5;
    s.objects.push_back({"cat" + std::to_string(k),
                         {x0, y0, x0 + 1 + u(rng) * s.width * 0.4, y0 + 1 + u(rng) * s.height * 0.4}});
  }
  s.caption = "caption with \\ backslash and unicode ✓ " + std::to_string(u(rng));
  return s;
}

}  // namespace

TEST_CASE("empty-text sample round-trips with empty arrays") {
  const Sample s = BaseSample();
  const std::string rec = SerializeSample(s);
  const auto j = nlohmann::json::parse(rec);
  CHECK(j["text_regions"].empty());
  CHECK(j["objects"].empty());
  CHECK(ParseSample(rec) == s);
}

TEST_CASE("quad coordinates are copied verbatim") {
  Sample s = BaseSample();
  s.text_regions.push_back(Region({10, 10, 110, 40}));
  const auto j = nlohmann::json::parse(SerializeSample(s));
  const std::vector<double> quad = j["text_regions"][0]["quad"];
  CHECK(quad == std::vector<double>{10, 10, 110, 10, 110, 40, 10, 40});
  CHECK(j["text_regions"][0]["text"] == "OPEN");
}

TEST_CASE("1000 random samples round-trip bit-exactly") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 1000; ++i) {
    const Sample s = RandomSample(rng, i);
    REQUIRE(ValidateFilteringRules(s, s.width, s.height).pass);
    const std::string rec = SerializeSample(s);
    const Sample back = ParseSample(rec);
    REQUIRE(back == s);
    REQUIRE(SerializeSample(back) == rec);
  }
}

TEST_CASE("prediction records carry defaults for missing fields") {
  Sample s = BaseSample();
  s.text_regions.push_back(Region({10, 10, 110, 40}));
  s.objects.push_back({"dog", {1, 1, 20, 20}});
  const PredictionRecord p = ParsePrediction(SerializeSample(s));
  REQUIRE(p.pred_text.size() == 1);
  CHECK(p.pred_text[0].empty());
  REQUIRE(p.confidence.size() == 1);
  CHECK(p.confidence[0] == 1.0);

  PredictionRecord q{s, {"OPFN"}, {0.25}};
  const PredictionRecord back = ParsePrediction(SerializePrediction(q));
  CHECK(back.sample == s);
  CHECK(back.pred_text == q.pred_text);
  CHECK(back.confidence == q.confidence);
}

TEST_CASE("structural violations name the failing field") {
  Sample s = BaseSample();
  s.objects.push_back({"dog", {50, 10, 50, 40}});
  CHECK(CodeOf([&] { ParseSample(SerializeSample(s)); }) == ErrorCode::kDegenerateBBox);
  try {
    CheckSampleInvariants(s);
  } catch (const ValidationError& e) {
    CHECK(e.field() == "objects[0].bbox");
  }

  Sample out = BaseSample();
  out.text_regions.push_back(Region({500, 10, 600, 40}));
  CHECK(CodeOf([&] { CheckSampleInvariants(out); }) == ErrorCode::kOutOfBounds);

  Sample ccw = BaseSample();
  TextRegion r = Region({10, 10, 110, 40});
  std::reverse(r.quad.corners.begin(), r.quad.corners.end());
  ccw.text_regions.push_back(r);
  CHECK(CodeOf([&] { CheckSampleInvariants(ccw); }) == ErrorCode::kInvalidQuad);

  Sample bow = BaseSample();
  TextRegion t = Region({10, 10, 110, 40});
  std::swap(t.quad.corners[1], t.quad.corners[2]);
  bow.text_regions.push_back(t);
  CHECK(CodeOf([&] { CheckSampleInvariants(bow); }) == ErrorCode::kInvalidQuad);

  CHECK(CodeOf([] { ParseSample("{not json"); }) == ErrorCode::kMalformedRecord);
  CHECK(CodeOf([] { ParseSample(R"({"id":"x"})"); }) == ErrorCode::kMissingField);
}

TEST_CASE("manifest files read back what was written") {
  testing::TempDir dir("manifest");
  std::mt19937_64 rng(5);
  std::vector<Sample> samples;
  for (int i = 0; i < 20; ++i) samples.push_back(RandomSample(rng, i));
  WriteManifest(dir / "m.jsonl", samples);
  CHECK(ReadManifest(dir / "m.jsonl") == samples);
  CHECK(CodeOf([&] { ReadManifest(dir / "missing.jsonl"); }) == ErrorCode::kIo);
}

TEST_CASE("filtering rules") {
  SUBCASE("nine regions parse but break the region count rule") {
    Sample s = BaseSample();
    for (int i = 0; i < 9; ++i) s.text_regions.push_back(Region({0, i * 56.0, 512, i * 56.0 + 50}));
    const Sample back = ParseSample(SerializeSample(s));
    const RuleReport r = ValidateFilteringRules(back, 512, 512);
    CHECK_FALSE(r.pass);
    CHECK(r.Violates(Rule::kRegionCount));
    CHECK(RuleNumber(Rule::kRegionCount) == 1);
  }
  SUBCASE("a region 1% wide breaks the extent rule") {
    Sample s = BaseSample();
    s.text_regions.push_back(Region({0, 0, 0.01 * 512, 512}));
    s.text_regions.push_back(Region({100, 0, 400, 200}));
    const RuleReport r = ValidateFilteringRules(s, 512, 512);
    CHECK_FALSE(r.pass);
    CHECK(r.Violates(Rule::kRegionExtent));
    CHECK(RuleNumber(Rule::kRegionExtent) == 4);
    CHECK(r.violations[0].region == 0);
  }
  SUBCASE("one region with 10% of the area and 3 lines passes") {
    Sample s = BaseSample();
    s.text_regions.push_back(Region({0, 0, 512, 51.2}, 3));
    const RuleReport r = ValidateFilteringRules(s, 512, 512);
    CHECK(r.pass);
    CHECK(r.violations.empty());
  }
  SUBCASE("summed area below 5% fails and the check is pure") {
    Sample s = BaseSample();
    s.text_regions.push_back(Region({0, 0, 100, 100}));
    const RuleReport a = ValidateFilteringRules(s, 512, 512);
    const RuleReport b = ValidateFilteringRules(s, 512, 512);
    CHECK(a.Violates(Rule::kTotalArea));
    CHECK(RuleNumber(Rule::kTotalArea) == 4);
    REQUIRE(a.violations.size() == b.violations.size());
    CHECK(a.violations[0].message == b.violations[0].message);
  }
  SUBCASE("line counts outside [1, 8]") {
    Sample s = BaseSample();
    s.text_regions.push_back(Region({0, 0, 512, 100}, 9));
    CHECK(ValidateFilteringRules(s, 512, 512).Violates(Rule::kLineCount));
  }
  SUBCASE("zero regions fails rule 1") {
    CHECK(ValidateFilteringRules(BaseSample(), 512, 512).Violates(Rule::kRegionCount));
  }
}

TEST_CASE("quad geometry") {
  const Quad q = Quad::FromBBox({0, 0, 4, 2});
  CHECK(q.SignedArea() == doctest::Approx(8.0));
  CHECK(q.IsClockwise());
  CHECK(q.IsSimple());
  CHECK(q.Contains({1, 1}));
  CHECK_FALSE(q.Contains({5, 1}));
  CHECK(q.Bounds() == BBox{0, 0, 4, 2});
  CHECK(QuadsOverlap(q, Quad::FromBBox({3, 1, 6, 5})));
  CHECK_FALSE(QuadsOverlap(q, Quad::FromBBox({4, 0, 6, 2})));  // shared edge only
  CHECK(Quad::FromCoords(q.Coords()) == q);
}

TEST_CASE("derived seeds differ by index and parent") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t p = 0; p < 4; ++p) {
    for (std::uint64_t i = 0; i < 256; ++i) seen.insert(DeriveSeed(p, i));
  }
  CHECK(seen.size() == 4 * 256);
  CHECK(DeriveSeed(1, 2) != DeriveSeed(2, 1));
}
