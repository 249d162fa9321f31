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
#include "glyphfuse/core/rules.hpp"

#include <algorithm>
#include <sstream>

namespace glyphfuse {

int RuleNumber(Rule rule) {
  switch (rule) {
    case Rule::kRegionCount: return 1;
    case Rule::kLineCount: return 2;
    case Rule::kRegionExtent: return 4;
    case Rule::kTotalArea: return 4;
  }
  return 0;
}

bool RuleReport::Violates(Rule rule) const {
  return std::any_of(violations.begin(), violations.end(),
                     [rule](const RuleViolation& v) { return v.rule == rule; });
}

RuleReport ValidateFilteringRules(const Sample& sample, int image_width, int image_height,
                                  const RuleThresholds& thresholds) {
  RuleReport report;
  auto fail = [&](Rule rule, int region, const std::string& msg) {
    report.pass = false;
    report.violations.push_back({rule, region, msg});
  };

  const int m = static_cast<int>(sample.text_regions.size());
  if (m < thresholds.min_regions || m > thresholds.max_regions) {
    std::ostringstream os;
    os << "region count " << m << " outside [" << thresholds.min_regions << ", "
       << thresholds.max_regions << "]";
    fail(Rule::kRegionCount, -1, os.str());
  }

  const double min_w = thresholds.min_extent_frac * image_width;
  const double min_h = thresholds.min_extent_frac * image_height;
  double total_area = 0.0;
  for (int i = 0; i < m; ++i) {
    const TextRegion& r = sample.text_regions[i];
    if (r.lines < thresholds.min_lines || r.lines > thresholds.max_lines) {
      fail(Rule::kLineCount, i, "line count " + std::to_string(r.lines) + " out of range");
    }
    const BBox b = r.quad.Bounds();
    if (b.width() < min_w || b.height() < min_h) {
      std::ostringstream os;
      os << "extent " << b.width() << "x" << b.height() << " below " << min_w << "x" << min_h;
      fail(Rule::kRegionExtent, i, os.str());
    }
    total_area += r.quad.Area();
  }

  const double min_area =
      thresholds.min_total_area_frac * static_cast<double>(image_width) * image_height;
  if (total_area < min_area) {
    std::ostringstream os;
    os << "summed region area " << total_area << " below " << min_area;
    fail(Rule::kTotalArea, -1, os.str());
  }
  return report;
}

}  // namespace glyphfuse
