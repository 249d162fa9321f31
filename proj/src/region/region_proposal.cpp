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
#include "glyphfuse/region/region_proposal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <queue>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "glyphfuse/error.hpp"
#include "json.hpp"

namespace glyphfuse::region {
namespace {

constexpr int kMinImageSide = 32;
constexpr int kMinPlaneSupport = 16;

cv::Mat Luminance(const cv::Mat& bgr) {
  cv::Mat lum(bgr.size(), CV_64FC1);
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* src = bgr.ptr<cv::Vec3b>(y);
    auto* dst = lum.ptr<double>(y);
    for (int x = 0; x < bgr.cols; ++x) {
      dst[x] = 0.114 * src[x][0] + 0.587 * src[x][1] + 0.299 * src[x][2];
    }
  }
  return lum;
}

// Central differences with replicated borders.
cv::Mat GradientMagnitude(const cv::Mat& lum) {
  cv::Mat mag(lum.size(), CV_64FC1);
  const int w = lum.cols;
  const int h = lum.rows;
  for (int y = 0; y < h; ++y) {
    const double* up = lum.ptr<double>(std::max(y - 1, 0));
    const double* row = lum.ptr<double>(y);
    const double* down = lum.ptr<double>(std::min(y + 1, h - 1));
    double* out = mag.ptr<double>(y);
    for (int x = 0; x < w; ++x) {
      const double gx = 0.5 * (row[std::min(x + 1, w - 1)] - row[std::max(x - 1, 0)]);
      const double gy = 0.5 * (down[x] - up[x]);
      out[x] = std::sqrt(gx * gx + gy * gy);
    }
  }
  return mag;
}

struct CellStats {
  cv::Vec3d color;
  double gradient = 0.0;
  int pixels = 0;
};

BBox ErodedRect(const cv::Mat& mask, int margin_x, int margin_y) {
  cv::Mat eroded;
  const cv::Mat kernel =
      cv::getStructuringElement(cv::MORPH_RECT, {2 * margin_x + 1, 2 * margin_y + 1});
  cv::erode(mask, eroded, kernel, {-1, -1}, 1, cv::BORDER_CONSTANT, cv::Scalar(0));
  return LargestInscribedRect(eroded);
}

}  // namespace

void CheckDepthMap(const DepthMap& depth) {
  if (depth.values.empty() || depth.values.type() != CV_64FC1) {
    throw ValidationError(ErrorCode::kInvalidValue, "depth", "expected non-empty CV_64FC1 map");
  }
  for (int y = 0; y < depth.values.rows; ++y) {
    const double* row = depth.values.ptr<double>(y);
    for (int x = 0; x < depth.values.cols; ++x) {
      if (!std::isfinite(row[x]) || row[x] <= 0.0) {
        throw ValidationError(ErrorCode::kInvalidValue, "depth",
                              "non-finite or non-positive value at (" + std::to_string(x) + ", " +
                                  std::to_string(y) + ")");
      }
    }
  }
}

DepthMap ReadDepthMap(const std::filesystem::path& path) {
  const cv::Mat raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (raw.empty()) throw Error(ErrorCode::kIo, "cannot read depth map " + path.string());
  DepthMap depth;
  if (raw.depth() == CV_32F || raw.depth() == CV_64F) {
    cv::Mat single = raw;
    if (raw.channels() == 3) cv::extractChannel(raw, single, 0);
    single.convertTo(depth.values, CV_64F);
  } else if (raw.depth() == CV_16U && raw.channels() == 1) {
    std::filesystem::path sidecar = path;
    sidecar.replace_extension(".json");
    std::ifstream in(sidecar);
    if (!in) throw Error(ErrorCode::kIo, "missing depth sidecar " + sidecar.string());
    double scale = 0.0;
    try {
      scale = nlohmann::json::parse(in).at("depth_scale").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(ErrorCode::kMalformedRecord, sidecar.string(), e.what());
    }
    if (!(scale > 0.0)) {
      throw ValidationError(ErrorCode::kInvalidValue, "depth_scale", "must be positive");
    }
    raw.convertTo(depth.values, CV_64F, scale);
  } else {
    throw ValidationError(ErrorCode::kInvalidValue, path.string(),
                          "depth must be a float map or 16-bit single-channel raster");
  }
  CheckDepthMap(depth);
  return depth;
}

void WriteDepthMapPfm(const std::filesystem::path& path, const DepthMap& depth) {
  cv::Mat f32;
  depth.values.convertTo(f32, CV_32F);
  if (!cv::imwrite(path.string(), f32)) {
    throw Error(ErrorCode::kIo, "cannot write depth map " + path.string());
  }
}

PlaneFit FitDepthPlane(const DepthMap& depth, const cv::Mat& mask) {
  CV_Assert(mask.type() == CV_8UC1 && mask.size() == depth.values.size());
  std::vector<cv::Point> support;
  cv::findNonZero(mask, support);
  if (static_cast<int>(support.size()) < kMinPlaneSupport) {
    throw ValidationError(ErrorCode::kDegeneratePlane, "mask",
                          "plane fit needs at least 16 pixels");
  }
  const double n = static_cast<double>(support.size());
  double mx = 0.0, my = 0.0, mz = 0.0;
  for (const cv::Point& p : support) {
    mx += p.x;
    my += p.y;
    mz += depth.values.at<double>(p);
  }
  mx /= n;
  my /= n;
  mz /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0, sxz = 0.0, syz = 0.0;
  for (const cv::Point& p : support) {
    const double dx = p.x - mx;
    const double dy = p.y - my;
    const double dz = depth.values.at<double>(p) - mz;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
    sxz += dx * dz;
    syz += dy * dz;
  }
  const double det = sxx * syy - sxy * sxy;
  if (sxx <= 0.0 || syy <= 0.0 || det <= 1e-10 * sxx * syy) {
    throw ValidationError(ErrorCode::kDegeneratePlane, "mask", "degenerate plane");
  }
  PlaneFit fit;
  Plane& pl = fit.plane;
  pl.a = (syy * sxz - sxy * syz) / det;
  pl.b = (sxx * syz - sxy * sxz) / det;
  pl.c = mz - pl.a * mx - pl.b * my;
  const double norm = std::sqrt(pl.a * pl.a + pl.b * pl.b + 1.0);
  pl.normal = {-pl.a / norm, -pl.b / norm, 1.0 / norm};
  pl.offset = pl.c / norm;

  double sse = 0.0;
  for (const cv::Point& p : support) {
    const double r = depth.values.at<double>(p) - (pl.a * p.x + pl.b * p.y + pl.c);
    sse += r * r;
  }
  fit.rmse = std::sqrt(sse / n);
  return fit;
}

Segmentation SegmentTexture(const cv::Mat& image_bgr, const SegmentationConfig& config) {
  CV_Assert(image_bgr.type() == CV_8UC3);
  if (image_bgr.cols < kMinImageSide || image_bgr.rows < kMinImageSide) {
    throw Error(ErrorCode::kImageTooSmall, "image too small");
  }
  const cv::Mat grad = GradientMagnitude(Luminance(image_bgr));
  const int cs = config.cell_size;
  const int gw = (image_bgr.cols + cs - 1) / cs;
  const int gh = (image_bgr.rows + cs - 1) / cs;

  std::vector<CellStats> cells(static_cast<size_t>(gw) * gh);
  for (int y = 0; y < image_bgr.rows; ++y) {
    const auto* px = image_bgr.ptr<cv::Vec3b>(y);
    const double* g = grad.ptr<double>(y);
    for (int x = 0; x < image_bgr.cols; ++x) {
      CellStats& c = cells[static_cast<size_t>(y / cs) * gw + x / cs];
      c.color += cv::Vec3d(px[x][0], px[x][1], px[x][2]);
      c.gradient += g[x];
      ++c.pixels;
    }
  }
  for (CellStats& c : cells) {
    c.color /= static_cast<double>(c.pixels);
    c.gradient /= c.pixels;
  }

  std::vector<int> order(cells.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return cells[a].gradient < cells[b].gradient; });

  std::vector<int> cell_label(cells.size(), -1);
  int next_label = 0;
  for (int seed : order) {
    if (cell_label[seed] >= 0) continue;
    const int label = next_label++;
    cell_label[seed] = label;
    cv::Vec3d color_sum = cells[seed].color * cells[seed].pixels;
    double grad_sum = cells[seed].gradient * cells[seed].pixels;
    int pixel_sum = cells[seed].pixels;
    std::queue<int> frontier;
    frontier.push(seed);
    while (!frontier.empty()) {
      const int cur = frontier.front();
      frontier.pop();
      const int cx = cur % gw;
      const int cy = cur / gw;
      const int nbrs[4][2] = {{cx - 1, cy}, {cx + 1, cy}, {cx, cy - 1}, {cx, cy + 1}};
      for (const auto& nb : nbrs) {
        if (nb[0] < 0 || nb[1] < 0 || nb[0] >= gw || nb[1] >= gh) continue;
        const int idx = nb[1] * gw + nb[0];
        if (cell_label[idx] >= 0) continue;
        const cv::Vec3d mean_color = color_sum / static_cast<double>(pixel_sum);
        const double mean_grad = grad_sum / pixel_sum;
        if (cv::norm(cells[idx].color - mean_color) >= config.tau_color) continue;
        if (std::abs(cells[idx].gradient - mean_grad) >= config.tau_texture) continue;
        cell_label[idx] = label;
        color_sum += cells[idx].color * cells[idx].pixels;
        grad_sum += cells[idx].gradient * cells[idx].pixels;
        pixel_sum += cells[idx].pixels;
        frontier.push(idx);
      }
    }
  }

  Segmentation seg;
  seg.labels.create(image_bgr.size(), CV_32SC1);
  seg.texture_score.assign(next_label, 0.0);
  seg.pixel_count.assign(next_label, 0);
  for (int y = 0; y < image_bgr.rows; ++y) {
    int* lab = seg.labels.ptr<int>(y);
    const double* g = grad.ptr<double>(y);
    for (int x = 0; x < image_bgr.cols; ++x) {
      const int l = cell_label[static_cast<size_t>(y / cs) * gw + x / cs];
      lab[x] = l;
      seg.texture_score[l] += g[x];
      ++seg.pixel_count[l];
    }
  }
  for (int l = 0; l < next_label; ++l) seg.texture_score[l] /= seg.pixel_count[l];
  return seg;
}

BBox LargestInscribedRect(const cv::Mat& mask) {
  CV_Assert(mask.type() == CV_8UC1);
  const int w = mask.cols;
  std::vector<int> heights(w + 1, 0);
  std::vector<int> stack;
  long best_area = 0;
  BBox best;
  for (int y = 0; y < mask.rows; ++y) {
    const uchar* row = mask.ptr<uchar>(y);
    for (int x = 0; x < w; ++x) heights[x] = row[x] ? heights[x] + 1 : 0;
    heights[w] = 0;
    stack.clear();
    for (int x = 0; x <= w; ++x) {
      while (!stack.empty() && heights[stack.back()] >= heights[x]) {
        const int h = heights[stack.back()];
        stack.pop_back();
        const int left = stack.empty() ? 0 : stack.back() + 1;
        const long area = static_cast<long>(h) * (x - left);
        if (area > best_area) {
          best_area = area;
          best = {static_cast<double>(left), static_cast<double>(y - h + 1),
                  static_cast<double>(x), static_cast<double>(y + 1)};
        }
      }
      stack.push_back(x);
    }
  }
  return best;
}

std::vector<CandidateRegion> ProposeTextRegions(const cv::Mat& image_bgr, const DepthMap& depth,
                                                const ProposalConfig& config) {
  if (image_bgr.size() != depth.values.size()) {
    throw ValidationError(ErrorCode::kShapeMismatch, "depth", "depth and image sizes differ");
  }
  const Segmentation seg = SegmentTexture(image_bgr, config.segmentation);
  const int w = image_bgr.cols;
  const int h = image_bgr.rows;
  const int margin_x = std::max(1, static_cast<int>(std::lround(config.margin_frac * w)));
  const int margin_y = std::max(1, static_cast<int>(std::lround(config.margin_frac * h)));
  const double min_w = config.min_extent_frac * w;
  const double min_h = config.min_extent_frac * h;

  std::vector<CandidateRegion> out;
  for (int label = 0; label < seg.segment_count(); ++label) {
    if (seg.texture_score[label] > config.texture_max) continue;
    if (seg.pixel_count[label] < kMinPlaneSupport) continue;
    cv::Mat mask = (seg.labels == label);

    PlaneFit fit;
    try {
      fit = FitDepthPlane(depth, mask);
    } catch (const ValidationError&) {
      continue;
    }
    std::vector<double> depths;
    depths.reserve(seg.pixel_count[label]);
    for (int y = 0; y < h; ++y) {
      const uchar* m = mask.ptr<uchar>(y);
      const double* d = depth.values.ptr<double>(y);
      for (int x = 0; x < w; ++x) {
        if (m[x]) depths.push_back(d[x]);
      }
    }
    auto mid = depths.begin() + depths.size() / 2;
    std::nth_element(depths.begin(), mid, depths.end());
    const double limit = config.planarity_rel * *mid;
    if (fit.rmse > limit) continue;

    const BBox rect = ErodedRect(mask, margin_x, margin_y);
    if (!rect.valid() || rect.width() < min_w || rect.height() < min_h) continue;

    CandidateRegion cand;
    cand.mask = mask;
    cand.rect = rect;
    cand.quad = Quad::FromBBox(rect);
    cand.plane = fit.plane;
    cand.texture_score = seg.texture_score[label];
    cand.planarity_rmse = fit.rmse;
    cand.planarity_limit = limit;
    out.push_back(std::move(cand));
  }
  std::stable_sort(out.begin(), out.end(), [](const CandidateRegion& a, const CandidateRegion& b) {
    return a.rect.area() > b.rect.area();
  });
  return out;
}

}  // namespace glyphfuse::region
