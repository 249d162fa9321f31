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
#include "glyphfuse/pipeline/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "glyphfuse/error.hpp"

namespace glyphfuse::pipeline {
namespace fs = std::filesystem;

namespace {

std::vector<std::string> Split(std::string_view s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string CollapseSpaces(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '\r' || c == '\n' || c == '\t') c = ' ';
    if (c == ' ' && (out.empty() || out.back() == ' ')) continue;
    out.push_back(c);
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::vector<std::string> ReadLines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!CollapseSpaces(line).empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

AnnotatedSentence ParseAnnotatedSentence(std::string_view line) {
  AnnotatedSentence out;
  std::string text;
  size_t i = 0;
  while (i < line.size()) {
    if (line[i] == ']') throw Error(ErrorCode::kMalformedRecord, "unbalanced ']' in sentence");
    if (line[i] != '[') {
      text.push_back(line[i++]);
      continue;
    }
    const size_t close = line.find(']', i);
    const size_t nested = line.find('[', i + 1);
    if (close == std::string_view::npos || (nested != std::string_view::npos && nested < close)) {
      throw Error(ErrorCode::kMalformedRecord, "unbalanced '[' in sentence");
    }
    const std::string_view inner = line.substr(i + 1, close - i - 1);
    const size_t space = inner.find(' ');
    const std::string_view tag = inner.substr(0, space);
    if (tag.rfind("/EN#", 0) != 0) {
      throw Error(ErrorCode::kMalformedRecord, "unknown markup '" + std::string(tag) + "'");
    }
    auto parts = Split(tag.substr(4), '/');
    EntityMention m;
    m.id = parts[0];
    m.types.assign(parts.begin() + 1, parts.end());
    m.phrase = space == std::string_view::npos ? "" : CollapseSpaces(std::string(inner.substr(space + 1)));
    if (m.id.empty()) throw Error(ErrorCode::kMalformedRecord, "entity without id");
    text += m.phrase;
    out.mentions.push_back(std::move(m));
    i = close + 1;
  }
  out.text = CollapseSpaces(text);
  return out;
}

std::vector<EntityBox> ReadEntityBoxes(const fs::path& xml) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_xml(xml.string(), tree);
  } catch (const pt::xml_parser_error& e) {
    throw Error(ErrorCode::kMalformedRecord, xml.string() + ": " + e.what());
  }
  std::vector<EntityBox> out;
  const auto root = tree.get_child_optional("annotation");
  if (!root) throw Error(ErrorCode::kMissingField, xml.string() + ": missing <annotation>");
  for (const auto& [key, node] : *root) {
    if (key != "object") continue;
    const auto bnd = node.get_child_optional("bndbox");
    if (!bnd) continue;
    BBox box;
    try {
      box = {bnd->get<double>("xmin"), bnd->get<double>("ymin"), bnd->get<double>("xmax"),
             bnd->get<double>("ymax")};
    } catch (const pt::ptree_error& e) {
      throw Error(ErrorCode::kMalformedRecord, xml.string() + ": " + e.what());
    }
    for (const auto& [name_key, name] : node) {
      if (name_key == "name") out.push_back({CollapseSpaces(name.data()), box});
    }
  }
  return out;
}

std::vector<CorpusEntry> LoadCorpus(const CorpusPaths& paths) {
  if (!fs::is_directory(paths.images)) {
    throw Error(ErrorCode::kIo, "images directory not found: " + paths.images.string());
  }
  std::map<std::string, std::vector<std::string>> token_file;
  const bool single_file = fs::is_regular_file(paths.captions);
  if (single_file) {
    for (const std::string& line : ReadLines(paths.captions)) {
      const size_t tab = line.find('\t');
      const size_t hash = line.find('#');
      if (tab == std::string::npos || hash == std::string::npos || hash > tab) {
        throw Error(ErrorCode::kMalformedRecord, "bad caption line: " + line);
      }
      const std::string image = line.substr(0, hash);
      token_file[fs::path(image).stem().string()].push_back(line.substr(tab + 1));
    }
  } else if (!fs::is_directory(paths.captions)) {
    throw Error(ErrorCode::kIo, "captions not found: " + paths.captions.string());
  }

  std::vector<CorpusEntry> entries;
  for (const auto& de : fs::directory_iterator(paths.images)) {
    const std::string ext = de.path().extension().string();
    if (!de.is_regular_file() || (ext != ".png" && ext != ".jpg" && ext != ".jpeg")) continue;
    CorpusEntry e;
    e.image_id = de.path().stem().string();
    e.image = de.path();
    for (const char* dext : {".pfm", ".png"}) {
      const fs::path cand = paths.depths / (e.image_id + dext);
      if (fs::exists(cand)) {
        e.depth = cand;
        break;
      }
    }
    if (e.depth.empty()) throw Error(ErrorCode::kIo, "no depth map for image " + e.image_id);

    std::vector<std::string> lines;
    if (single_file) {
      lines = token_file[e.image_id];
    } else {
      const fs::path s = paths.captions / (e.image_id + ".txt");
      if (fs::exists(s)) lines = ReadLines(s);
    }
    if (lines.empty()) {
      throw ValidationError(ErrorCode::kMissingField, "caption", "no sentences for " + e.image_id);
    }
    std::map<std::string, std::string> types;
    for (const std::string& l : lines) {
      e.sentences.push_back(ParseAnnotatedSentence(l));
      for (const EntityMention& m : e.sentences.back().mentions) {
        if (!m.types.empty()) types.emplace(m.id, m.types.front());
      }
    }
    if (!paths.entities.empty()) {
      const fs::path xml = paths.entities / (e.image_id + ".xml");
      if (fs::exists(xml)) {
        for (const EntityBox& b : ReadEntityBoxes(xml)) {
          const auto it = types.find(b.entity_id);
          const std::string category = it == types.end() ? "other" : it->second;
          if (category == "notvisual") continue;
          e.objects.push_back({category, b.box});
        }
      }
    }
    entries.push_back(std::move(e));
  }
  std::sort(entries.begin(), entries.end(),
            [](const CorpusEntry& a, const CorpusEntry& b) { return a.image_id < b.image_id; });
  if (entries.empty()) throw Error(ErrorCode::kIo, "no images in " + paths.images.string());
  return entries;
}

}  // namespace glyphfuse::pipeline
