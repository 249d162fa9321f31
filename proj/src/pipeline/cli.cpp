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
#include "glyphfuse/pipeline/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <opencv2/imgcodecs.hpp>

#include "CLI11.hpp"

#include "glyphfuse/blend/poisson.hpp"
#include "glyphfuse/core/manifest.hpp"
#include "glyphfuse/core/rules.hpp"
#include "glyphfuse/fusion/gradcheck.hpp"
#include "glyphfuse/fusion/toy_train.hpp"
#include "glyphfuse/pipeline/evaluate.hpp"
#include "glyphfuse/pipeline/log.hpp"
#include "glyphfuse/pipeline/synth.hpp"
#include "glyphfuse/text/font.hpp"

namespace glyphfuse::cli {
namespace fs = std::filesystem;

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNoConvergence:
    case ErrorCode::kDivergence:
      return kNumericalFailure;
    default:
      return kDataError;
  }
}

namespace {

std::vector<int> ParseIntList(const std::string& s, const char* field) {
  std::vector<int> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError(ErrorCode::kInvalidValue, field, "not an integer list: " + s);
    }
  }
  return out;
}

blend::BlendMode ParseMode(const std::string& mode) {
  return mode == "import" ? blend::BlendMode::kImport : blend::BlendMode::kMixed;
}

void WriteText(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  pipeline::WriteFileAtomic(path, text);
}

struct SynthArgs {
  pipeline::SynthConfig config;
  std::string mode = "mixed";
};

struct BlendArgs {
  std::string target, source, mask, out, mode = "mixed";
  double tol = 1e-3;
};

struct FilterArgs {
  std::string manifest, transcriptions, out;
  double threshold = 0.8;
};

struct EvalArgs {
  std::string pred, gt, report, metrics = "ocr,ned,ap";
  double iou = 0.5;
};

struct FuseArgs {
  std::uint64_t seed = 0;
  std::string dims = "2,4,8";
  std::string layers = "0,1,2,3";
  std::string report;
  int train_steps = 0;
  double lambda = 0.01;
  double lr = 2e-3;
  std::string trace;
};

int RunSynth(SynthArgs& a) {
  a.config.blend_mode = ParseMode(a.mode);
  const pipeline::SynthSummary s = pipeline::RunSynth(a.config);
  std::cout << "produced " << s.produced << " of " << s.requested << " samples";
  if (s.resumed > 0) std::cout << " (" << s.resumed << " resumed from journal)";
  std::cout << "\n";
  for (const auto& [reason, n] : s.attempt_failures) {
    std::cout << "  failed attempts: " << reason << " x" << n << "\n";
  }
  return kOk;
}

int RunBlend(const BlendArgs& a) {
  const cv::Mat target = cv::imread(a.target, cv::IMREAD_COLOR);
  const cv::Mat source = cv::imread(a.source, cv::IMREAD_COLOR);
  const cv::Mat mask = cv::imread(a.mask, cv::IMREAD_GRAYSCALE);
  if (target.empty() || source.empty() || mask.empty()) {
    throw Error(ErrorCode::kIo, "cannot read blend inputs");
  }
  const cv::Mat out = blend::SeamlessClone(target, source, mask, ParseMode(a.mode), {a.tol, 0});
  pipeline::WriteImageAtomic(a.out, out);
  return kOk;
}

int RunValidate(const std::string& manifest, const std::string& report_path) {
  const std::vector<Sample> samples = ReadManifest(manifest);
  std::ostringstream report;
  int failing = 0;
  for (const Sample& s : samples) {
    const RuleReport r = ValidateFilteringRules(s, s.width, s.height);
    if (r.pass) {
      report << s.id << ": pass\n";
      continue;
    }
    ++failing;
    for (const RuleViolation& v : r.violations) {
      report << s.id << ": rule " << RuleNumber(v.rule) << ": " << v.message << "\n";
    }
  }
  report << samples.size() - failing << "/" << samples.size() << " samples pass\n";
  WriteText(report_path, report.str());
  return failing == 0 ? kOk : kDataError;
}

int RunOcrFilter(const FilterArgs& a) {
  const auto samples = ReadManifest(a.manifest);
  const auto transcriptions = ReadPredictionManifest(a.transcriptions);
  const auto result = pipeline::OcrFilter(samples, transcriptions, a.threshold);
  WriteManifest(a.out, result.kept);
  for (const auto& [id, ned] : result.dropped) {
    std::cout << "dropped " << id << " (mean ned " << ned << ")\n";
  }
  std::cout << "kept " << result.kept.size() << " of " << samples.size() << " samples\n";
  return kOk;
}

int RunEval(const EvalArgs& a) {
  const auto preds = ReadPredictionManifest(a.pred);
  const auto gts = ReadManifest(a.gt);
  const auto report = pipeline::Evaluate(preds, gts, pipeline::ParseMetricSelection(a.metrics), a.iou);
  WriteText(a.report, pipeline::EvalReportJson(report));
  return kOk;
}

int RunFuseCheck(const FuseArgs& a) {
  const std::vector<int> dims = ParseIntList(a.dims, "dims");
  if (dims.size() != 3) throw ValidationError(ErrorCode::kInvalidValue, "dims", "expected B,T,C");
  const std::vector<int> layers = ParseIntList(a.layers, "layers");
  const auto report = fusion::RunFuseCheck(a.seed, dims[0], dims[1], dims[2], layers);
  std::ostringstream os;
  fusion::WriteFuseCheckReport(os, report);
  WriteText(a.report, os.str());
  if (a.train_steps > 0) {
    fusion::FusionConfig config;
    config.attach_indices = layers;
    fusion::TrainOptions options;
    options.steps = a.train_steps;
    options.lambda = a.lambda;
    options.lr = a.lr;
    options.seed = a.seed;
    const auto trace = fusion::ToyTrain(config, fusion::ToyTask{}, options);
    std::ostringstream ts;
    fusion::WriteTrace(ts, trace);
    WriteText(a.trace, ts.str());
  }
  return report.pass() ? kOk : kNumericalFailure;
}

}  // namespace

int Run(int argc, const char* const* argv) {
  CLI::App app{"Synthetic visual-text dataset tools"};
  app.set_config("--config", "", "Key-value config file (TOML/INI sections per subcommand)");
  app.require_subcommand(1);

  SynthArgs synth;
  std::string images, depths, captions, entities, lexicon, font, output;
  auto* s = app.add_subcommand("synth", "Synthesize a dataset from a captioned corpus");
  s->add_option("--images", images, "Directory of corpus images")->required();
  s->add_option("--depths", depths, "Directory of depth maps (.pfm or 16-bit .png)")->required();
  s->add_option("--captions", captions, "Sentence directory or token file")->required();
  s->add_option("--entities", entities, "Directory of per-image box files");
  s->add_option("--lexicon", lexicon, "Word list, one per line")->required();
  s->add_option("--font", font, "Font file")->default_str(text::DefaultFontPath().string());
  s->add_option("--out", output, "Output directory")->required();
  s->add_option("--seed", synth.config.dataset_seed, "Dataset seed");
  s->add_option("--count", synth.config.count, "Number of sample slots");
  s->add_option("--workers", synth.config.workers, "Worker threads");
  s->add_option("--max-attempts", synth.config.max_attempts, "Retries per slot");
  s->add_option("--max-regions", synth.config.layout.max_regions, "Most text regions per sample");
  s->add_option("--max-lines", synth.config.layout.max_lines, "Most lines per region");
  s->add_option("--min-extent", synth.config.rules.min_extent_frac,
                "Minimum region extent as a fraction of the image side");
  s->add_option("--min-total-area", synth.config.rules.min_total_area_frac,
                "Minimum summed text area as a fraction of the image");
  s->add_option("--solver-tol", synth.config.solver.tol, "Blend solver tolerance");
  s->add_option("--mode", synth.mode, "Blend guidance")->check(CLI::IsMember({"mixed", "import"}));
  s->callback([&] {
    synth.config.corpus = {images, depths, captions, entities};
    synth.config.lexicon = lexicon;
    synth.config.font = font.empty() ? text::DefaultFontPath() : fs::path(font);
    synth.config.output = output;
  });

  BlendArgs blend_args;
  auto* b = app.add_subcommand("blend", "Poisson-blend one source into one target");
  b->add_option("--target", blend_args.target)->required();
  b->add_option("--source", blend_args.source)->required();
  b->add_option("--mask", blend_args.mask)->required();
  b->add_option("--out", blend_args.out)->required();
  b->add_option("--mode", blend_args.mode)->check(CLI::IsMember({"mixed", "import"}));
  b->add_option("--tol", blend_args.tol, "Solver tolerance");

  std::string validate_manifest, validate_report;
  auto* v = app.add_subcommand("validate", "Check manifest records against the filtering rules");
  v->add_option("--manifest", validate_manifest)->required();
  v->add_option("--report", validate_report, "Report path (default stdout)");

  FilterArgs filter;
  auto* f = app.add_subcommand("ocr-filter", "Drop samples whose OCR transcriptions disagree");
  f->add_option("--manifest", filter.manifest)->required();
  f->add_option("--transcriptions", filter.transcriptions)->required();
  f->add_option("--threshold", filter.threshold, "Minimum mean NED to keep a sample");
  f->add_option("--out", filter.out)->required();

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "Score predictions against ground truth");
  e->add_option("--pred", eval.pred)->required();
  e->add_option("--gt", eval.gt)->required();
  e->add_option("--metrics", eval.metrics, "Comma list of ocr, ned, ap");
  e->add_option("--iou", eval.iou, "IoU threshold for AP");
  e->add_option("--report", eval.report, "Report path (default stdout)");

  FuseArgs fuse;
  auto* c = app.add_subcommand("fuse-check", "Gradient and invariant checks of the fusion kernel");
  c->add_option("--seed", fuse.seed);
  c->add_option("--dims", fuse.dims, "B,T,C");
  c->add_option("--layers", fuse.layers, "Blocks followed by a fusion layer");
  c->add_option("--report", fuse.report, "Report path (default stdout)");
  c->add_option("--train-steps", fuse.train_steps, "Also run the toy training task");
  c->add_option("--lambda", fuse.lambda, "Text loss weight for training");
  c->add_option("--lr", fuse.lr, "Learning rate for training");
  c->add_option("--trace", fuse.trace, "Training trace path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*s) return RunSynth(synth);
    if (*b) return RunBlend(blend_args);
    if (*v) return RunValidate(validate_manifest, validate_report);
    if (*f) return RunOcrFilter(filter);
    if (*e) return RunEval(eval);
    if (*c) return RunFuseCheck(fuse);
  } catch (const Error& err) {
    log::Err(err.what());
    return ExitCodeFor(err.code());
  } catch (const std::exception& err) {
    log::Err(err.what());
    return kDataError;
  }
  return kUsage;
}

int Run(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"glyphfuse"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  return Run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace glyphfuse::cli
