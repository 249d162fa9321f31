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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "glyphfuse/core/sample.hpp"

namespace glyphfuse::pipeline {

/// One entity mention inside an annotated sentence.
struct EntityMention {
  std::string id;
  std::vector<std::string> types;
  std::string phrase;
};

struct AnnotatedSentence {
  std::string text;  // markup removed
  std::vector<EntityMention> mentions;
};

/// Parses "[/EN#<id>/<type>[/<type>...] <words>]" markup. Throws
/// kMalformedRecord on unbalanced brackets.
AnnotatedSentence ParseAnnotatedSentence(std::string_view line);

/// Box file entry: every <name> of an <object> with a <bndbox>.
struct EntityBox {
  std::string entity_id;
  BBox box;
};

std::vector<EntityBox> ReadEntityBoxes(const std::filesystem::path& xml);

struct CorpusEntry {
  std::string image_id;
  std::filesystem::path image;
  std::filesystem::path depth;
  std::vector<AnnotatedSentence> sentences;
  /// Boxed entities, categorized by the first type any sentence gives them.
  std::vector<ObjectBox> objects;
};

struct CorpusPaths {
  std::filesystem::path images;
  std::filesystem::path depths;
  /// Directory of per-image sentence files, or a single token file with
  /// "<image>.jpg#<k>\t<sentence>" lines.
  std::filesystem::path captions;
  /// Directory of per-image box files; may be empty.
  std::filesystem::path entities;
};

/// Entries sorted by image id. Every image needs a depth map (<id>.pfm or
/// <id>.png) and at least one sentence; otherwise kIo / kMissingField.
std::vector<CorpusEntry> LoadCorpus(const CorpusPaths& paths);

}  // namespace glyphfuse::pipeline
