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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "glyphfuse/region/region_proposal.hpp"

namespace glyphfuse::text {

struct LayoutConfig {
  int max_regions = 8;
  int max_lines = 8;
  int max_words_per_line = 2;
  int min_font_px = 6;
  /// Baseline-to-baseline distance per pixel of font size.
  double line_pitch_factor = 1.17;
};

struct LayoutRegion {
  int candidate = 0;  // index into the candidate list
  std::vector<std::vector<std::string>> lines;

  int line_count() const { return static_cast<int>(lines.size()); }
  /// Words joined by spaces, lines by '\n'.
  std::string Text() const;
};

struct LayoutDraw {
  std::vector<LayoutRegion> regions;

  int region_count() const { return static_cast<int>(regions.size()); }
};

/// Region count is uniform over [1, min(max_regions, feasible)], regions are
/// drawn without replacement, and line counts are uniform over
/// [1, max_lines] clipped to what fits at `min_font_px`. Throws
/// kNoFeasibleLayout when no candidate can hold one line.
LayoutDraw SampleLayout(std::span<const region::CandidateRegion> candidates,
                        std::span<const std::string> lexicon, std::uint64_t seed,
                        const LayoutConfig& config = {});

/// Most lines a rectangle of the given height can stack at `min_font_px`.
int MaxLinesFor(double rect_height, const LayoutConfig& config);

/// One word per line; blank lines and surrounding whitespace are dropped.
std::vector<std::string> ReadLexicon(const std::filesystem::path& path);

}  // namespace glyphfuse::text
