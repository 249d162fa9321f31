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
#include "glyphfuse/text/layout.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "glyphfuse/error.hpp"
#include "glyphfuse/seed.hpp"

namespace glyphfuse::text {

std::string LayoutRegion::Text() const {
  std::string out;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (i > 0) out += '\n';
    for (size_t j = 0; j < lines[i].size(); ++j) {
      if (j > 0) out += ' ';
      out += lines[i][j];
    }
  }
  return out;
}

int MaxLinesFor(double rect_height, const LayoutConfig& config) {
  const double pitch = config.line_pitch_factor * config.min_font_px;
  const int fit = static_cast<int>(std::floor(rect_height / pitch));
  return std::clamp(fit, 0, config.max_lines);
}

LayoutDraw SampleLayout(std::span<const region::CandidateRegion> candidates,
                        std::span<const std::string> lexicon, std::uint64_t seed,
                        const LayoutConfig& config) {
  if (lexicon.empty()) throw Error(ErrorCode::kInvalidValue, "empty lexicon");
  std::vector<int> feasible;
  for (size_t i = 0; i < candidates.size(); ++i) {
    const BBox& r = candidates[i].rect;
    if (MaxLinesFor(r.height(), config) >= 1 && r.width() >= 3.0 * config.min_font_px) {
      feasible.push_back(static_cast<int>(i));
    }
  }
  if (feasible.empty()) {
    throw Error(ErrorCode::kNoFeasibleLayout, "no feasible layout");
  }

  std::mt19937_64 rng(Mix64(seed));
  const int upper = std::min(config.max_regions, static_cast<int>(feasible.size()));
  const int count = std::uniform_int_distribution<int>(1, upper)(rng);
  std::shuffle(feasible.begin(), feasible.end(), rng);

  std::uniform_int_distribution<int> line_dist(1, config.max_lines);
  std::uniform_int_distribution<int> word_count_dist(1, config.max_words_per_line);
  std::uniform_int_distribution<size_t> word_dist(0, lexicon.size() - 1);

  LayoutDraw draw;
  for (int k = 0; k < count; ++k) {
    LayoutRegion region;
    region.candidate = feasible[k];
    const int max_fit = MaxLinesFor(candidates[region.candidate].rect.height(), config);
    const int lines = std::min(line_dist(rng), max_fit);
    for (int l = 0; l < lines; ++l) {
      std::vector<std::string> words(word_count_dist(rng));
      for (std::string& w : words) w = lexicon[word_dist(rng)];
      region.lines.push_back(std::move(words));
    }
    draw.regions.push_back(std::move(region));
  }
  return draw;
}

std::vector<std::string> ReadLexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open lexicon " + path.string());
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    words.push_back(line.substr(first, last - first + 1));
  }
  if (words.empty()) throw Error(ErrorCode::kInvalidValue, "lexicon is empty");
  return words;
}

}  // namespace glyphfuse::text
