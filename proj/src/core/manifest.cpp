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
#include "glyphfuse/core/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "glyphfuse/error.hpp"
#include "json.hpp"

namespace glyphfuse {
namespace {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

ordered_json RegionToJson(const TextRegion& r) {
  ordered_json j;
  j["text"] = r.text;
  const auto xy = r.quad.Coords();
  j["quad"] = std::vector<double>(xy.begin(), xy.end());
  j["font_px"] = r.font_px;
  j["rotation_deg"] = r.rotation_deg;
  j["lines"] = r.lines;
  j["bold"] = r.bold;
  j["border"] = r.border;
  return j;
}

ordered_json ObjectToJson(const ObjectBox& o) {
  ordered_json j;
  j["category"] = o.category;
  j["bbox"] = {o.bbox.x0, o.bbox.y0, o.bbox.x1, o.bbox.y1};
  return j;
}

ordered_json SampleToJson(const Sample& s) {
  ordered_json j;
  j["id"] = s.id;
  j["image"] = s.image_ref;
  j["depth"] = s.depth_ref;
  j["glyph"] = s.glyph_ref;
  j["font"] = s.font;
  j["width"] = s.width;
  j["height"] = s.height;
  j["caption"] = s.caption;
  j["text_regions"] = ordered_json::array();
  for (const TextRegion& r : s.text_regions) j["text_regions"].push_back(RegionToJson(r));
  j["objects"] = ordered_json::array();
  for (const ObjectBox& o : s.objects) j["objects"].push_back(ObjectToJson(o));
  return j;
}

const json& Require(const json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw ValidationError(ErrorCode::kMissingField, path + key, "missing field");
  }
  return *it;
}

template <typename T>
T Get(const json& j, const char* key, const std::string& path) {
  const json& v = Require(j, key, path);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ValidationError(ErrorCode::kMalformedRecord, path + key, "wrong type");
  }
}

std::string GetOptionalString(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) return {};
  return it->get<std::string>();
}

double GetNumber(const json& j, const std::string& field) {
  if (!j.is_number()) {
    throw ValidationError(ErrorCode::kMalformedRecord, field, "expected number");
  }
  return j.get<double>();
}

TextRegion RegionFromJson(const json& j, const std::string& path) {
  if (!j.is_object()) throw ValidationError(ErrorCode::kMalformedRecord, path, "expected object");
  const std::string p = path + ".";
  TextRegion r;
  r.text = Get<std::string>(j, "text", p);
  const json& quad = Require(j, "quad", p);
  if (!quad.is_array() || quad.size() != 8) {
    throw ValidationError(ErrorCode::kMalformedRecord, p + "quad", "expected 8 numbers");
  }
  std::array<double, 8> xy{};
  for (size_t k = 0; k < 8; ++k) xy[k] = GetNumber(quad[k], p + "quad");
  r.quad = Quad::FromCoords(xy);
  r.font_px = Get<int>(j, "font_px", p);
  r.rotation_deg = Get<double>(j, "rotation_deg", p);
  r.lines = Get<int>(j, "lines", p);
  r.bold = Get<bool>(j, "bold", p);
  r.border = Get<bool>(j, "border", p);
  return r;
}

ObjectBox ObjectFromJson(const json& j, const std::string& path) {
  if (!j.is_object()) throw ValidationError(ErrorCode::kMalformedRecord, path, "expected object");
  const std::string p = path + ".";
  ObjectBox o;
  o.category = Get<std::string>(j, "category", p);
  const json& bbox = Require(j, "bbox", p);
  if (!bbox.is_array() || bbox.size() != 4) {
    throw ValidationError(ErrorCode::kMalformedRecord, p + "bbox", "expected 4 numbers");
  }
  o.bbox = {GetNumber(bbox[0], p + "bbox"), GetNumber(bbox[1], p + "bbox"),
            GetNumber(bbox[2], p + "bbox"), GetNumber(bbox[3], p + "bbox")};
  return o;
}

json ParseJson(std::string_view record) {
  try {
    json j = json::parse(record.begin(), record.end());
    if (!j.is_object()) {
      throw ValidationError(ErrorCode::kMalformedRecord, "record", "expected JSON object");
    }
    return j;
  } catch (const json::parse_error& e) {
    throw ValidationError(ErrorCode::kMalformedRecord, "record", e.what());
  }
}

Sample SampleFromJson(const json& j) {
  Sample s;
  s.id = GetOptionalString(j, "id");
  s.image_ref = Get<std::string>(j, "image", "");
  s.depth_ref = Get<std::string>(j, "depth", "");
  s.glyph_ref = GetOptionalString(j, "glyph");
  s.font = GetOptionalString(j, "font");
  s.width = Get<int>(j, "width", "");
  s.height = Get<int>(j, "height", "");
  s.caption = Get<std::string>(j, "caption", "");
  const json& regions = Require(j, "text_regions", "");
  const json& objects = Require(j, "objects", "");
  if (!regions.is_array()) {
    throw ValidationError(ErrorCode::kMalformedRecord, "text_regions", "expected array");
  }
  if (!objects.is_array()) {
    throw ValidationError(ErrorCode::kMalformedRecord, "objects", "expected array");
  }
  for (size_t i = 0; i < regions.size(); ++i) {
    s.text_regions.push_back(RegionFromJson(regions[i], "text_regions[" + std::to_string(i) + "]"));
  }
  for (size_t i = 0; i < objects.size(); ++i) {
    s.objects.push_back(ObjectFromJson(objects[i], "objects[" + std::to_string(i) + "]"));
  }
  CheckSampleInvariants(s);
  return s;
}

template <typename F>
void ForEachLine(const std::filesystem::path& path, F&& fn) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open manifest " + path.string());
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(line);
    } catch (const ValidationError& e) {
      const std::string what = e.what();
      throw ValidationError(e.code(),
                            path.filename().string() + ":" + std::to_string(lineno) + ": " +
                                e.field(),
                            what.substr(std::min(what.size(), e.field().size() + 2)));
    }
  }
}

}  // namespace

std::string SerializeSample(const Sample& sample) {
  CheckSampleInvariants(sample);
  return SampleToJson(sample).dump();
}

Sample ParseSample(std::string_view record) { return SampleFromJson(ParseJson(record)); }

std::string SerializePrediction(const PredictionRecord& record) {
  CheckSampleInvariants(record.sample);
  ordered_json j = SampleToJson(record.sample);
  for (size_t i = 0; i < record.sample.text_regions.size(); ++i) {
    j["text_regions"][i]["pred_text"] = i < record.pred_text.size() ? record.pred_text[i] : "";
  }
  for (size_t i = 0; i < record.sample.objects.size(); ++i) {
    j["objects"][i]["confidence"] = i < record.confidence.size() ? record.confidence[i] : 1.0;
  }
  return j.dump();
}

PredictionRecord ParsePrediction(std::string_view record) {
  const json j = ParseJson(record);
  PredictionRecord out;
  out.sample = SampleFromJson(j);
  for (size_t i = 0; i < out.sample.text_regions.size(); ++i) {
    out.pred_text.push_back(GetOptionalString(j["text_regions"][i], "pred_text"));
  }
  for (size_t i = 0; i < out.sample.objects.size(); ++i) {
    const json& o = j["objects"][i];
    auto it = o.find("confidence");
    double c = 1.0;
    if (it != o.end()) c = GetNumber(*it, "objects[" + std::to_string(i) + "].confidence");
    if (!std::isfinite(c) || c < 0.0 || c > 1.0) {
      throw ValidationError(ErrorCode::kInvalidValue,
                            "objects[" + std::to_string(i) + "].confidence",
                            "confidence outside [0,1]");
    }
    out.confidence.push_back(c);
  }
  return out;
}

std::vector<Sample> ReadManifest(const std::filesystem::path& path) {
  std::vector<Sample> samples;
  ForEachLine(path, [&](const std::string& line) { samples.push_back(ParseSample(line)); });
  return samples;
}

std::vector<PredictionRecord> ReadPredictionManifest(const std::filesystem::path& path) {
  std::vector<PredictionRecord> records;
  ForEachLine(path, [&](const std::string& line) { records.push_back(ParsePrediction(line)); });
  return records;
}

void WriteManifest(const std::filesystem::path& path, const std::vector<Sample>& samples) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write manifest " + path.string());
  for (const Sample& s : samples) out << SerializeSample(s) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace glyphfuse
