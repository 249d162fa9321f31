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
#include "glyphfuse/pipeline/synth.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "json.hpp"

#include "glyphfuse/core/manifest.hpp"
#include "glyphfuse/error.hpp"
#include "glyphfuse/pipeline/log.hpp"
#include "glyphfuse/seed.hpp"
#include "glyphfuse/text/color.hpp"

namespace glyphfuse::pipeline {
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

// Ends one attempt with a reason for the skip report.
struct AttemptFailure {
  std::string reason;
};

struct BlockExtent {
  double width = 0.0;
  double height = 0.0;
};

BlockExtent EstimateBlock(const text::FontFace& font, const std::vector<std::string>& lines,
                          int px, double twist_ratio, bool bold, bool border) {
  BlockExtent e;
  for (const std::string& l : lines) e.width = std::max(e.width, font.AdvancePx(l, px));
  e.height = font.AscentPx(px) + font.DescentPx(px) +
             font.LinePitchPx(px) * static_cast<double>(lines.size() - 1) +
             2.0 * twist_ratio * px;
  const double grow = 2.0 * ((bold ? 1 : 0) + (border ? 1 : 0));
  e.width += grow;
  e.height += grow;
  return e;
}

bool FitsRotated(const BlockExtent& e, double theta_deg, const BBox& rect) {
  const double t = theta_deg * std::numbers::pi / 180.0;
  const double c = std::abs(std::cos(t)), s = std::abs(std::sin(t));
  const double w = e.width * c + e.height * s;
  const double h = e.width * s + e.height * c;
  return w <= 0.95 * rect.width() - 2.0 && h <= 0.95 * rect.height() - 2.0;
}

// Largest font size whose estimated block fits `rect` at `theta_deg`; 0 if
// even the minimum does not.
int MaxFontPx(const text::FontFace& font, const std::vector<std::string>& lines,
              double theta_deg, double twist_ratio, bool bold, bool border, const BBox& rect,
              int min_px) {
  auto fits = [&](int px) {
    return FitsRotated(EstimateBlock(font, lines, px, twist_ratio, bold, border), theta_deg, rect);
  };
  if (!fits(min_px)) return 0;
  int lo = min_px;
  int hi = std::max(min_px, static_cast<int>(std::min(rect.height(), 400.0)));
  while (lo < hi) {
    const int mid = (lo + hi + 1) / 2;
    if (fits(mid)) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return lo;
}

std::string JoinWords(const std::vector<std::string>& words) {
  std::string s;
  for (size_t i = 0; i < words.size(); ++i) s += (i ? " " : "") + words[i];
  return s;
}

}  // namespace

void SynthConfig::Check() const {
  auto require = [](const fs::path& p, const char* field) {
    if (p.empty() || !fs::exists(p)) {
      throw ValidationError(ErrorCode::kIo, field, "path not found: " + p.string());
    }
  };
  require(corpus.images, "images");
  require(corpus.depths, "depths");
  require(corpus.captions, "captions");
  if (!corpus.entities.empty()) require(corpus.entities, "entities");
  require(lexicon, "lexicon");
  require(font, "font");
  if (output.empty()) throw ValidationError(ErrorCode::kMissingField, "output", "output dir unset");
  if (count < 1) throw ValidationError(ErrorCode::kInvalidValue, "count", "count must be >= 1");
  if (workers < 1) throw ValidationError(ErrorCode::kInvalidValue, "workers", "workers must be >= 1");
  if (max_attempts < 1) {
    throw ValidationError(ErrorCode::kInvalidValue, "max_attempts", "max_attempts must be >= 1");
  }
  if (!(style.min_fill > 0.0 && style.min_fill <= style.max_fill && style.max_fill <= 1.0)) {
    throw ValidationError(ErrorCode::kInvalidValue, "style.fill", "need 0 < min_fill <= max_fill <= 1");
  }
}

struct Synthesizer::ImageData {
  cv::Mat image;
  region::DepthMap depth;
  std::vector<region::CandidateRegion> candidates;
};

Synthesizer::Synthesizer(SynthConfig config) : config_(std::move(config)) {
  config_.Check();
  corpus_ = LoadCorpus(config_.corpus);
  lexicon_ = text::ReadLexicon(config_.lexicon);
  if (lexicon_.empty()) throw ValidationError(ErrorCode::kInvalidValue, "lexicon", "empty lexicon");
  font_ = std::make_unique<text::FontFace>(config_.font);
  for (const std::string& w : lexicon_) font_->CheckCoverage(w);
  cache_.resize(corpus_.size());
}

Synthesizer::~Synthesizer() = default;

std::string Synthesizer::SampleId(int index) {
  std::ostringstream os;
  os << "s" << std::setw(6) << std::setfill('0') << index;
  return os.str();
}

const Synthesizer::ImageData& Synthesizer::Load(size_t entry) const {
  {
    std::lock_guard lock(mutex_);
    if (cache_[entry]) return *cache_[entry];
  }
  // Computed outside the lock; a racing duplicate is identical and dropped.
  auto data = std::make_shared<ImageData>();
  const CorpusEntry& e = corpus_[entry];
  data->image = cv::imread(e.image.string(), cv::IMREAD_COLOR);
  if (data->image.empty()) throw Error(ErrorCode::kIo, "cannot read image " + e.image.string());
  data->depth = region::ReadDepthMap(e.depth);
  if (data->depth.values.size() != data->image.size()) {
    throw Error(ErrorCode::kShapeMismatch, "depth map size differs from image " + e.image_id);
  }
  try {
    data->candidates = region::ProposeTextRegions(data->image, data->depth, config_.proposal);
  } catch (const Error& err) {
    if (err.code() == ErrorCode::kIo || err.code() == ErrorCode::kMalformedRecord) throw;
    log::Debug(e.image_id + ": region proposal failed: " + err.what());
  }
  std::lock_guard lock(mutex_);
  if (!cache_[entry]) cache_[entry] = std::move(data);
  return *cache_[entry];
}

SlotResult Synthesizer::Synthesize(int index) const {
  SlotResult result;
  const std::uint64_t slot_seed = DeriveSeed(config_.dataset_seed, static_cast<std::uint64_t>(index));
  for (int attempt = 0; attempt < config_.max_attempts; ++attempt) {
    std::string reason;
    try {
      result.output = Attempt(index, DeriveSeed(slot_seed, static_cast<std::uint64_t>(attempt)));
      return result;
    } catch (const AttemptFailure& f) {
      reason = f.reason;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kIo || e.code() == ErrorCode::kMalformedRecord ||
          e.code() == ErrorCode::kShapeMismatch) {
        throw;
      }
      reason = std::string(ErrorCodeName(e.code()));
    } catch (const cv::Exception& e) {
      reason = "opencv error";
      log::Warn(SampleId(index) + ": " + e.what());
    }
    log::Debug(SampleId(index) + " attempt " + std::to_string(attempt) + ": " + reason);
    result.failures.push_back(reason);
  }
  return result;
}

SynthOutput Synthesizer::Attempt(int index, std::uint64_t seed) const {
  std::mt19937_64 rng(Mix64(seed));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const size_t entry = std::uniform_int_distribution<size_t>(0, corpus_.size() - 1)(rng);
  const CorpusEntry& src = corpus_[entry];
  const ImageData& data = Load(entry);
  if (data.candidates.empty()) throw AttemptFailure{"no candidates"};

  const text::LayoutDraw layout = text::SampleLayout(data.candidates, lexicon_, rng(), config_.layout);
  const StyleConfig& sc = config_.style;
  const BBox frame{0.0, 0.0, static_cast<double>(data.image.cols),
                   static_cast<double>(data.image.rows)};

  std::vector<text::GlyphPatch> patches;
  std::vector<text::Rgb> colors;
  Sample sample;
  for (const text::LayoutRegion& region : layout.regions) {
    const region::CandidateRegion& cand = data.candidates[region.candidate];
    std::vector<std::string> lines;
    for (const auto& words : region.lines) lines.push_back(JoinWords(words));

    text::TextStyle style;
    style.bold = unit(rng) < sc.bold_prob;
    style.border = unit(rng) < sc.border_prob;
    const double twist_ratio = unit(rng) < sc.twist_prob ? 0.05 + 0.2 * unit(rng) : 0.0;
    const double twist_sign = unit(rng) < 0.5 ? -1.0 : 1.0;
    double theta = 0.0;
    if (unit(rng) < sc.rotate_prob) {
      const double range = unit(rng) < sc.wide_rotation_prob ? 180.0 : sc.max_rotation_deg;
      theta = std::uniform_real_distribution<double>(-range, range)(rng);
    }
    const double fill = std::uniform_real_distribution<double>(sc.min_fill, sc.max_fill)(rng);
    const int min_px = std::max(text::kMinFontPx, config_.layout.min_font_px);
    int max_px = MaxFontPx(*font_, lines, theta, twist_ratio, style.bold, style.border, cand.rect,
                           min_px);
    if (max_px == 0) {
      theta = 0.0;
      max_px = MaxFontPx(*font_, lines, theta, twist_ratio, style.bold, style.border, cand.rect,
                         min_px);
    }
    if (max_px == 0) throw AttemptFailure{"text does not fit"};
    style.rotation_deg = theta;
    style.font_px = std::max(min_px, static_cast<int>(std::floor(max_px * fill)));
    style.color = text::ChooseTextColor(data.image, cand.mask);

    const std::string content = region.Text();
    std::optional<text::GlyphPatch> patch;
    for (int shrink = 0; shrink < 5 && !patch; ++shrink) {
      style.twist_amp = twist_sign * twist_ratio * style.font_px;
      try {
        patch = text::RasterizeGlyph(*font_, content, style, cand.quad);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kTextDoesNotFit || style.font_px == min_px) throw;
        style.font_px = std::max(min_px, static_cast<int>(style.font_px * 0.85));
      }
    }
    if (!patch) throw AttemptFailure{"text does not fit"};

    TextRegion tr;
    tr.text = content;
    tr.quad = patch->effective_quad;
    tr.font_px = style.font_px;
    tr.rotation_deg = style.rotation_deg;
    tr.lines = region.line_count();
    tr.bold = style.bold;
    tr.border = style.border;
    sample.text_regions.push_back(std::move(tr));
    patches.push_back(std::move(*patch));
    colors.push_back(style.color);
  }

  const std::string id = SampleId(index);
  sample.id = id;
  sample.image_ref = "images/" + id + ".png";
  sample.glyph_ref = "glyphs/" + id + ".png";
  sample.depth_ref = (config_.corpus.depths / src.depth.filename()).generic_string();
  sample.font = config_.font.filename().string();
  sample.width = data.image.cols;
  sample.height = data.image.rows;
  const auto& sentences = src.sentences;
  sample.caption = sentences[std::uniform_int_distribution<size_t>(0, sentences.size() - 1)(rng)].text;
  for (const ObjectBox& o : src.objects) {
    const BBox b{std::clamp(o.bbox.x0, frame.x0, frame.x1), std::clamp(o.bbox.y0, frame.y0, frame.y1),
                 std::clamp(o.bbox.x1, frame.x0, frame.x1), std::clamp(o.bbox.y1, frame.y0, frame.y1)};
    if (b.width() > 0.0 && b.height() > 0.0) sample.objects.push_back({o.category, b});
  }

  const RuleReport rules = ValidateFilteringRules(sample, sample.width, sample.height, config_.rules);
  if (!rules.pass) {
    throw AttemptFailure{"rule " + std::to_string(RuleNumber(rules.violations.front().rule)) +
                         " violated"};
  }
  CheckSampleInvariants(sample);

  SynthOutput out;
  out.glyph = text::ComposeGlyphImage(patches, data.image.size());
  const cv::Mat painted = PaintText(data.image, patches, colors);
  cv::Mat mask;
  cv::threshold(out.glyph, mask, 0, 255, cv::THRESH_BINARY);
  cv::dilate(mask, mask, cv::getStructuringElement(cv::MORPH_RECT, {3, 3}));
  out.image = blend::SeamlessClone(data.image, painted, mask, config_.blend_mode, config_.solver);
  out.sample = std::move(sample);
  return out;
}

text::Rgb ContrastingColor(text::Rgb c) {
  const text::Rgb black{0, 0, 0}, white{255, 255, 255};
  return text::ContrastRatio(c, black) >= text::ContrastRatio(c, white) ? black : white;
}

cv::Mat PaintText(const cv::Mat& image, std::span<const text::GlyphPatch> patches,
                  std::span<const text::Rgb> colors) {
  CV_Assert(image.type() == CV_8UC3 && patches.size() == colors.size());
  cv::Mat out = image.clone();
  for (size_t k = 0; k < patches.size(); ++k) {
    const text::GlyphPatch& p = patches[k];
    const text::Rgb fill = colors[k];
    const text::Rgb ring = ContrastingColor(fill);
    for (int y = 0; y < p.coverage.rows; ++y) {
      const int iy = p.origin.y + y;
      if (iy < 0 || iy >= out.rows) continue;
      for (int x = 0; x < p.coverage.cols; ++x) {
        const int ix = p.origin.x + x;
        if (ix < 0 || ix >= out.cols) continue;
        const int cov = p.coverage.at<uchar>(y, x);
        if (cov == 0) continue;
        const int edge = p.outline.at<uchar>(y, x);
        const double a_ring = edge / 255.0;
        const double a_text = std::max(0, cov - edge) / 255.0;
        cv::Vec3b& px = out.at<cv::Vec3b>(iy, ix);
        const double ring_bgr[3] = {static_cast<double>(ring.b), static_cast<double>(ring.g),
                                    static_cast<double>(ring.r)};
        const double fill_bgr[3] = {static_cast<double>(fill.b), static_cast<double>(fill.g),
                                    static_cast<double>(fill.r)};
        for (int c = 0; c < 3; ++c) {
          double v = px[c];
          v = v * (1.0 - a_ring) + ring_bgr[c] * a_ring;
          v = v * (1.0 - a_text) + fill_bgr[c] * a_text;
          px[c] = cv::saturate_cast<uchar>(v);
        }
      }
    }
  }
  return out;
}

void WriteFileAtomic(const fs::path& path, const std::string& bytes) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kIo, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

void WriteImageAtomic(const fs::path& path, const cv::Mat& image) {
  std::vector<uchar> buf;
  if (!cv::imencode(".png", image, buf)) throw Error(ErrorCode::kIo, "cannot encode " + path.string());
  WriteFileAtomic(path, std::string(buf.begin(), buf.end()));
}

namespace {

struct JournalEntry {
  std::optional<std::string> record;  // serialized sample
  std::vector<std::string> failures;
};

fs::path JournalPath(const fs::path& out, int index) {
  return out / "journal" / (Synthesizer::SampleId(index) + ".json");
}

std::optional<JournalEntry> ReadJournal(const fs::path& out, int index) {
  const fs::path p = JournalPath(out, index);
  if (!fs::exists(p)) return std::nullopt;
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    const json j = json::parse(ss.str());
    JournalEntry e;
    if (j.contains("sample")) {
      e.record = j.at("sample").get<std::string>();
      const Sample s = ParseSample(*e.record);
      if (!fs::exists(out / s.image_ref) || !fs::exists(out / s.glyph_ref)) return std::nullopt;
    }
    e.failures = j.at("failures").get<std::vector<std::string>>();
    return e;
  } catch (const std::exception& err) {
    log::Warn("ignoring unreadable journal entry " + p.string() + ": " + err.what());
    return std::nullopt;
  }
}

}  // namespace

SynthSummary RunSynth(const SynthConfig& config) {
  const Synthesizer synth(config);
  const fs::path out = config.output;
  for (const char* sub : {"images", "glyphs", "journal"}) fs::create_directories(out / sub);

  std::vector<std::optional<JournalEntry>> slots(config.count);
  SynthSummary summary;
  summary.requested = config.count;
  for (int i = 0; i < config.count; ++i) {
    slots[i] = ReadJournal(out, i);
    if (slots[i]) ++summary.resumed;
  }

  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= config.count) return;
      if (slots[i]) continue;
      {
        std::lock_guard lock(error_mutex);
        if (first_error) return;
      }
      try {
        SlotResult r = synth.Synthesize(i);
        JournalEntry e;
        e.failures = r.failures;
        json j;
        if (r.output) {
          WriteImageAtomic(out / r.output->sample.image_ref, r.output->image);
          WriteImageAtomic(out / r.output->sample.glyph_ref, r.output->glyph);
          e.record = SerializeSample(r.output->sample);
          j["sample"] = *e.record;
        }
        j["failures"] = e.failures;
        WriteFileAtomic(JournalPath(out, i), j.dump() + "\n");
        log::Info(Synthesizer::SampleId(i) + (r.output ? " done" : " skipped"));
        slots[i] = std::move(e);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < config.workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  std::string manifest;
  for (int i = 0; i < config.count; ++i) {
    const JournalEntry& e = *slots[i];
    for (const std::string& f : e.failures) ++summary.attempt_failures[f];
    if (e.record) {
      manifest += *e.record + "\n";
      ++summary.produced;
    } else {
      summary.skipped.emplace_back(i, e.failures.empty() ? "unknown" : e.failures.back());
    }
  }
  WriteFileAtomic(out / "manifest.jsonl", manifest);
  WriteSummary(out / "summary.json", summary);
  if (summary.produced == 0) {
    std::string reasons;
    for (const auto& [reason, n] : summary.attempt_failures) {
      reasons += (reasons.empty() ? "" : ", ") + reason + " x" + std::to_string(n);
    }
    throw Error(ErrorCode::kEmptyDataset, "no samples produced (" + reasons + ")");
  }
  return summary;
}

void WriteSummary(const fs::path& path, const SynthSummary& summary) {
  json j;
  j["requested"] = summary.requested;
  j["produced"] = summary.produced;
  j["skipped"] = json::array();
  for (const auto& [index, reason] : summary.skipped) {
    j["skipped"].push_back({{"id", Synthesizer::SampleId(index)}, {"reason", reason}});
  }
  j["attempt_failures"] = summary.attempt_failures;
  WriteFileAtomic(path, j.dump(2) + "\n");
}

}  // namespace glyphfuse::pipeline
