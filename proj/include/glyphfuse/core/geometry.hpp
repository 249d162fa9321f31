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

#include <array>
#include <cmath>

namespace glyphfuse {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Axis-aligned box in pixel coordinates, half-open on the max side.
struct BBox {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool valid() const { return x0 < x1 && y0 < y1; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Four corners, clockwise (in y-down image coordinates) starting from the
/// top-left corner of the content the quad encloses.
struct Quad {
  std::array<Point2, 4> corners{};

  static Quad FromCoords(const std::array<double, 8>& xy);
  static Quad FromBBox(const BBox& box);
  std::array<double, 8> Coords() const;

  BBox Bounds() const;
  /// Shoelace sum; positive for clockwise order in y-down coordinates.
  double SignedArea() const;
  double Area() const { return std::abs(SignedArea()); }
  bool IsSimple() const;
  bool IsClockwise() const { return SignedArea() > 0.0; }
  bool Contains(Point2 p) const;
  Point2 Centroid() const;

  friend bool operator==(const Quad&, const Quad&) = default;
};

/// True when the interiors of two simple quads intersect.
bool QuadsOverlap(const Quad& a, const Quad& b);

}  // namespace glyphfuse
