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
#include "glyphfuse/core/geometry.hpp"

#include <algorithm>

namespace glyphfuse {
namespace {

double Cross(Point2 o, Point2 a, Point2 b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

int Sign(double v) { return (v > 0.0) - (v < 0.0); }

bool OnSegment(Point2 p, Point2 a, Point2 b) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool SegmentsIntersect(Point2 a, Point2 b, Point2 c, Point2 d) {
  const int d1 = Sign(Cross(c, d, a));
  const int d2 = Sign(Cross(c, d, b));
  const int d3 = Sign(Cross(a, b, c));
  const int d4 = Sign(Cross(a, b, d));
  if (d1 != d2 && d3 != d4 && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0) {
    return true;
  }
  if (d1 == 0 && OnSegment(a, c, d)) return true;
  if (d2 == 0 && OnSegment(b, c, d)) return true;
  if (d3 == 0 && OnSegment(c, a, b)) return true;
  if (d4 == 0 && OnSegment(d, a, b)) return true;
  return false;
}

// Strict crossing: segments share an interior point and are not merely touching.
bool SegmentsCross(Point2 a, Point2 b, Point2 c, Point2 d) {
  const int d1 = Sign(Cross(c, d, a));
  const int d2 = Sign(Cross(c, d, b));
  const int d3 = Sign(Cross(a, b, c));
  const int d4 = Sign(Cross(a, b, d));
  return d1 * d2 < 0 && d3 * d4 < 0;
}

bool StrictlyInside(const Quad& q, Point2 p) {
  // Convex or not, use winding via ray casting; points on edges count as outside.
  for (int i = 0; i < 4; ++i) {
    const Point2 a = q.corners[i];
    const Point2 b = q.corners[(i + 1) % 4];
    if (Sign(Cross(a, b, p)) == 0 && OnSegment(p, a, b)) return false;
  }
  return q.Contains(p);
}

}  // namespace

Quad Quad::FromCoords(const std::array<double, 8>& xy) {
  Quad q;
  for (int i = 0; i < 4; ++i) q.corners[i] = {xy[2 * i], xy[2 * i + 1]};
  return q;
}

Quad Quad::FromBBox(const BBox& box) {
  return Quad::FromCoords({box.x0, box.y0, box.x1, box.y0, box.x1, box.y1, box.x0, box.y1});
}

std::array<double, 8> Quad::Coords() const {
  std::array<double, 8> xy{};
  for (int i = 0; i < 4; ++i) {
    xy[2 * i] = corners[i].x;
    xy[2 * i + 1] = corners[i].y;
  }
  return xy;
}

BBox Quad::Bounds() const {
  BBox b{corners[0].x, corners[0].y, corners[0].x, corners[0].y};
  for (const Point2& p : corners) {
    b.x0 = std::min(b.x0, p.x);
    b.y0 = std::min(b.y0, p.y);
    b.x1 = std::max(b.x1, p.x);
    b.y1 = std::max(b.y1, p.y);
  }
  return b;
}

double Quad::SignedArea() const {
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    const Point2 a = corners[i];
    const Point2 b = corners[(i + 1) % 4];
    s += a.x * b.y - b.x * a.y;
  }
  return 0.5 * s;
}

bool Quad::IsSimple() const {
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (corners[i] == corners[j]) return false;
    }
  }
  if (SegmentsIntersect(corners[0], corners[1], corners[2], corners[3])) return false;
  if (SegmentsIntersect(corners[1], corners[2], corners[3], corners[0])) return false;
  return Area() > 0.0;
}

bool Quad::Contains(Point2 p) const {
  bool inside = false;
  for (int i = 0, j = 3; i < 4; j = i++) {
    const Point2 a = corners[i];
    const Point2 b = corners[j];
    if (Sign(Cross(a, b, p)) == 0 && OnSegment(p, a, b)) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

Point2 Quad::Centroid() const {
  Point2 c;
  for (const Point2& p : corners) {
    c.x += p.x / 4.0;
    c.y += p.y / 4.0;
  }
  return c;
}

bool QuadsOverlap(const Quad& a, const Quad& b) {
  const BBox ba = a.Bounds();
  const BBox bb = b.Bounds();
  if (ba.x1 <= bb.x0 || bb.x1 <= ba.x0 || ba.y1 <= bb.y0 || bb.y1 <= ba.y0) return false;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (SegmentsCross(a.corners[i], a.corners[(i + 1) % 4], b.corners[j],
                        b.corners[(j + 1) % 4])) {
        return true;
      }
    }
  }
  if (StrictlyInside(a, b.Centroid()) || StrictlyInside(b, a.Centroid())) return true;
  for (const Point2& p : a.corners) {
    if (StrictlyInside(b, p)) return true;
  }
  for (const Point2& p : b.corners) {
    if (StrictlyInside(a, p)) return true;
  }
  return false;
}

}  // namespace glyphfuse
