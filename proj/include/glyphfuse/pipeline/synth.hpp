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
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <opencv2/core.hpp>

#include "glyphfuse/blend/poisson.hpp"
#include "glyphfuse/core/rules.hpp"
#include "glyphfuse/core/sample.hpp"
#include "glyphfuse/pipeline/corpus.hpp"
#include "glyphfuse/region/region_proposal.hpp"
#include "glyphfuse/text/font.hpp"
#include "glyphfuse/text/glyph.hpp"
#include "glyphfuse/text/layout.hpp"

namespace glyphfuse::pipeline {

/// Random style knobs for rendered text.
struct StyleConfig {
  /// Probability that a region is rotated at all, and the usual range.
  double rotate_prob = 0.5;
  double max_rotation_deg = 45.0;
  /// Share of rotated regions drawn from the full [-180, 180] range.
  double wide_rotation_prob = 0.1;
  double twist_prob = 0.3;
  double bold_prob = 0.3;
  double border_prob = 0.3;
  /// Font size as a fraction of the largest size that fits, drawn uniformly.
  double min_fill = 0.75;
  double max_fill = 1.0;
};

struct SynthConfig {
  CorpusPaths corpus;
  std::filesystem::path lexicon;
  std::filesystem::path font;
  std::filesystem::path output;
  std::uint64_t dataset_seed = 0;
  int count = 1;
  int workers = 1;
  /// Seeded retries per sample slot before it is skipped.
  int max_attempts = 8;
  RuleThresholds rules;
  region::ProposalConfig proposal;
  text::LayoutConfig layout;
  StyleConfig style;
  blend::BlendMode blend_mode = blend::BlendMode::kMixed;
  blend::SolverOptions solver{1e-3, 0};

  /// Throws ValidationError for missing paths or non-positive counts.
  void Check() const;
};

struct SynthOutput {
  Sample sample;
  cv::Mat image;  // BGR
  cv::Mat glyph;  // 8-bit, text = 255
};

/// Outcome of one sample slot: the sample, or nothing when every attempt
/// failed. `failures` lists the cause of each failed attempt in order.
struct SlotResult {
  std::optional<SynthOutput> output;
  std::vector<std::string> failures;
};

/// Stateless apart from a per-image cache of decoded inputs and region
/// candidates, so one instance can serve all workers.
class Synthesizer {
 public:
  explicit Synthesizer(SynthConfig config);
  ~Synthesizer();

  /// Attempt k for slot `index` uses the seed
  /// DeriveSeed(DeriveSeed(dataset_seed, index), k). Corpus I/O errors
  /// propagate; every other failure only ends the attempt.
  SlotResult Synthesize(int index) const;

  const SynthConfig& config() const { return config_; }
  const std::vector<CorpusEntry>& corpus() const { return corpus_; }

  static std::string SampleId(int index);

 private:
  struct ImageData;
  const ImageData& Load(size_t entry) const;
  SynthOutput Attempt(int index, std::uint64_t seed) const;

  SynthConfig config_;
  std::vector<CorpusEntry> corpus_;
  std::vector<std::string> lexicon_;
  std::unique_ptr<text::FontFace> font_;
  mutable std::mutex mutex_;
  mutable std::vector<std::shared_ptr<ImageData>> cache_;
};

/// Paints text into a copy of `image`: each outline ring in the color
/// contrasting its patch's fill, then the strokes in the fill color.
cv::Mat PaintText(const cv::Mat& image, std::span<const text::GlyphPatch> patches,
                  std::span<const text::Rgb> colors);

/// Black or white, whichever contrasts more with `c`.
text::Rgb ContrastingColor(text::Rgb c);

struct SynthSummary {
  int requested = 0;
  int produced = 0;
  int resumed = 0;
  std::vector<std::pair<int, std::string>> skipped;  // slot index, reason
  std::map<std::string, int> attempt_failures;
};

/// Runs all slots on `workers` threads. Each finished slot is journaled under
/// output/journal so an interrupted run resumes where it stopped; the
/// manifest and summary are folded in slot order at the end. Throws
/// kEmptyDataset when no sample is produced.
SynthSummary RunSynth(const SynthConfig& config);

void WriteSummary(const std::filesystem::path& path, const SynthSummary& summary);

/// Writes via a temporary file and rename.
void WriteFileAtomic(const std::filesystem::path& path, const std::string& bytes);
void WriteImageAtomic(const std::filesystem::path& path, const cv::Mat& image);

}  // namespace glyphfuse::pipeline
