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
// Regenerates the bundled fixture corpus under data/fixture: panel images
// with textured separators, planar depth per panel, entity-annotated
// sentences, per-image box files and a small lexicon.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "CLI11.hpp"
#include "glyphfuse/region/region_proposal.hpp"
#include "glyphfuse/seed.hpp"

namespace fs = std::filesystem;
using glyphfuse::Mix64;

namespace {

struct Panel {
  cv::Rect rect;
  cv::Vec3d color;
};

struct Entity {
  int id;
  std::string type;
  std::string phrase;
  cv::Rect box;
};

const std::vector<std::string> kLexicon = {
    "OPEN",   "SALE",  "CAFE",   "HOTEL",  "EXIT",   "PARK",   "STOP",   "BAKERY", "MARKET",
    "STREET", "north", "river",  "garden", "coffee", "books",  "music",  "bridge", "museum",
    "lunch",  "fresh", "daily",  "summer", "winter", "harbor", "studio", "gallery", "city",
    "Station", "Avenue", "Plaza", "Kitchen", "Library", "Theatre", "Bistro", "Dental", "Pharmacy",
    "Tickets", "Garage", "Bank",  "Post",   "Office", "Welcome", "Closed", "Parking", "Taxi",
    "Pizza",  "Sushi", "Tea",    "Wine",   "Bar",    "Shoes",  "Flowers", "Repairs", "Lab",
    "Zone",   "Gate",  "Hall",   "Road",   "Lane",   "Square"};

const std::vector<std::pair<std::string, std::string>> kEntities = {
    {"people", "a man"},         {"people", "two women"},   {"animals", "a brown dog"},
    {"vehicles", "a red car"},   {"clothing", "a blue hat"}, {"scene", "the street"},
    {"people", "a child"},       {"vehicles", "a bicycle"},  {"animals", "a cat"},
    {"other", "a wooden bench"}, {"scene", "a shop front"},  {"clothing", "a yellow jacket"}};

std::vector<int> SplitPoints(int extent, int parts, std::mt19937_64& rng) {
  std::vector<int> cuts{0};
  for (int i = 1; i < parts; ++i) {
    std::uniform_int_distribution<int> jitter(-extent / (6 * parts), extent / (6 * parts));
    cuts.push_back(extent * i / parts + jitter(rng));
  }
  cuts.push_back(extent);
  return cuts;
}

void WritePanelImage(int index, int size, const fs::path& root, std::uint64_t seed,
                     const std::string& id, std::vector<Entity>& entities) {
  std::mt19937_64 rng(Mix64(seed + index));
  std::uniform_int_distribution<int> parts(2, 3);
  std::uniform_real_distribution<double> channel(30.0, 225.0);
  std::normal_distribution<double> noise(0.0, 40.0);
  const int band = 14;

  const auto xs = SplitPoints(size, parts(rng), rng);
  const auto ys = SplitPoints(size, parts(rng), rng);
  std::vector<Panel> panels;
  for (size_t r = 0; r + 1 < ys.size(); ++r) {
    for (size_t c = 0; c + 1 < xs.size(); ++c) {
      panels.push_back({cv::Rect(xs[c], ys[r], xs[c + 1] - xs[c], ys[r + 1] - ys[r]),
                        cv::Vec3d(channel(rng), channel(rng), channel(rng))});
    }
  }

  cv::Mat image(size, size, CV_8UC3);
  cv::Mat depth(size, size, CV_64FC1);
  std::uniform_real_distribution<double> slope(-0.002, 0.002);
  std::uniform_real_distribution<double> base(2.0, 6.0);
  for (const Panel& p : panels) {
    // Gentle colour ramp and a tilted plane per panel.
    const double ramp = std::uniform_real_distribution<double>(-8.0, 8.0)(rng);
    const double a = slope(rng), b = slope(rng), z0 = base(rng);
    for (int y = p.rect.y; y < p.rect.y + p.rect.height; ++y) {
      for (int x = p.rect.x; x < p.rect.x + p.rect.width; ++x) {
        const double t = static_cast<double>(x - p.rect.x) / p.rect.width;
        for (int ch = 0; ch < 3; ++ch) {
          image.at<cv::Vec3b>(y, x)[ch] = cv::saturate_cast<uchar>(p.color[ch] + ramp * t);
        }
        depth.at<double>(y, x) = z0 + a * x + b * y;
      }
    }
  }
  // Noisy separators with rough depth.
  std::uniform_real_distribution<double> rough(1.5, 8.0);
  auto texture = [&](int x, int y) {
    for (int ch = 0; ch < 3; ++ch) {
      image.at<cv::Vec3b>(y, x)[ch] = cv::saturate_cast<uchar>(128.0 + noise(rng));
    }
    depth.at<double>(y, x) = rough(rng);
  };
  for (size_t i = 1; i + 1 < xs.size(); ++i) {
    for (int y = 0; y < size; ++y) {
      for (int x = std::max(0, xs[i] - band / 2); x < std::min(size, xs[i] + band / 2); ++x) {
        texture(x, y);
      }
    }
  }
  for (size_t i = 1; i + 1 < ys.size(); ++i) {
    for (int y = std::max(0, ys[i] - band / 2); y < std::min(size, ys[i] + band / 2); ++y) {
      for (int x = 0; x < size; ++x) texture(x, y);
    }
  }
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      if (y < band / 2 || x < band / 2 || y >= size - band / 2 || x >= size - band / 2) {
        texture(x, y);
      }
    }
  }

  cv::imwrite((root / "images" / (id + ".png")).string(), image);
  glyphfuse::region::DepthMap dm{depth};
  if (index == 9) {
    // One 16-bit depth with a scale sidecar exercises the second format.
    const double scale = 0.001;
    cv::Mat raw;
    depth.convertTo(raw, CV_16UC1, 1.0 / scale);
    cv::imwrite((root / "depths" / (id + ".png")).string(), raw);
    std::ofstream((root / "depths" / (id + ".json"))) << "{\"depth_scale\": " << scale << "}\n";
  } else {
    glyphfuse::region::WriteDepthMapPfm(root / "depths" / (id + ".pfm"), dm);
  }

  std::uniform_int_distribution<size_t> pick(0, kEntities.size() - 1);
  std::uniform_int_distribution<int> count(2, 3);
  const int n = count(rng);
  for (int k = 0; k < n; ++k) {
    const auto& [type, phrase] = kEntities[pick(rng)];
    std::uniform_int_distribution<int> pos(0, size - 120);
    std::uniform_int_distribution<int> ext(40, 110);
    const cv::Rect box(pos(rng), pos(rng), ext(rng), ext(rng));
    entities.push_back({100 + index * 10 + k, type, phrase, box});
  }
}

void WriteSentences(const fs::path& path, const std::vector<Entity>& entities) {
  std::ofstream out(path);
  auto mention = [](const Entity& e) {
    return "[/EN#" + std::to_string(e.id) + "/" + e.type + " " + e.phrase + "]";
  };
  out << mention(entities[0]) << " stands near " << mention(entities[1]) << " .\n";
  out << "A photo of " << mention(entities[1]);
  for (size_t i = 2; i < entities.size(); ++i) out << " and " << mention(entities[i]);
  out << " on a sunny day .\n";
}

void WriteBoxes(const fs::path& path, const std::string& id, int size,
                const std::vector<Entity>& entities) {
  std::ofstream out(path);
  out << "<annotation>\n  <filename>" << id << ".jpg</filename>\n";
  out << "  <size><width>" << size << "</width><height>" << size
      << "</height><depth>3</depth></size>\n";
  for (const Entity& e : entities) {
    out << "  <object>\n    <name>" << e.id << "</name>\n    <bndbox><xmin>" << e.box.x
        << "</xmin><ymin>" << e.box.y << "</ymin><xmax>" << e.box.x + e.box.width
        << "</xmax><ymax>" << e.box.y + e.box.height << "</ymax></bndbox>\n  </object>\n";
  }
  // A scene-level entry without a box, as in the source annotations.
  out << "  <object>\n    <name>1</name>\n    <nobndbox>1</nobndbox>\n  </object>\n";
  out << "</annotation>\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regenerate the fixture corpus"};
  std::string out_dir = "data/fixture";
  int count = 10;
  int size = 512;
  std::uint64_t seed = 2024;
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--count", count, "Number of images")->check(CLI::Range(1, 1000));
  app.add_option("--size", size, "Image side in pixels")->check(CLI::Range(128, 4096));
  app.add_option("--seed", seed, "Generator seed");
  CLI11_PARSE(app, argc, argv);

  const fs::path root(out_dir);
  for (const char* sub : {"images", "depths", "sentences", "annotations"}) {
    fs::create_directories(root / sub);
  }
  for (int i = 0; i < count; ++i) {
    const std::string id = std::to_string(1000001 + i);
    std::vector<Entity> entities;
    WritePanelImage(i, size, root, seed, id, entities);
    WriteSentences(root / "sentences" / (id + ".txt"), entities);
    WriteBoxes(root / "annotations" / (id + ".xml"), id, size, entities);
  }
  std::ofstream lex(root / "lexicon.txt");
  for (const auto& w : kLexicon) lex << w << '\n';
  std::cout << "wrote " << count << " fixture images to " << root << '\n';
  return 0;
}
