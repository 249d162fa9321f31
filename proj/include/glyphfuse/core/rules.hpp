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

#include <string>
#include <vector>

#include "glyphfuse/core/sample.hpp"

namespace glyphfuse {

/// Dataset filtering rules applied to every synthesized sample.
struct RuleThresholds {
  int min_regions = 1;
  int max_regions = 8;
  int min_lines = 1;
  int max_lines = 8;
  /// Per-region axis-aligned extent, as a fraction of the image dimension.
  double min_extent_frac = 0.02;
  /// Summed region area, as a fraction of the image area.
  double min_total_area_frac = 0.05;
};

enum class Rule {
  kRegionCount,   // dataset rule 1
  kLineCount,     // dataset rule 2
  kRegionExtent,  // dataset rule 4, per-region part
  kTotalArea,     // dataset rule 4, area part
};

/// Number of the dataset construction rule a check belongs to.
int RuleNumber(Rule rule);

struct RuleViolation {
  Rule rule;
  int region = -1;  // -1 for sample-level rules
  std::string message;
};

struct RuleReport {
  bool pass = true;
  std::vector<RuleViolation> violations;

  bool Violates(Rule rule) const;
};

RuleReport ValidateFilteringRules(const Sample& sample, int image_width, int image_height,
                                  const RuleThresholds& thresholds = {});

}  // namespace glyphfuse
