// Copyright 2026 The SMS Preprocessing Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "sms/point_cloud.hpp"

namespace sms {

/// 7-DoF oriented box: center, size (l along heading, w lateral, h up) and
/// yaw about +z, in radians.
struct Box7 {
  double cx = 0.0, cy = 0.0, cz = 0.0;
  double l = 1.0, w = 1.0, h = 1.0;
  double yaw = 0.0;

  friend bool operator==(const Box7&, const Box7&) = default;

  static constexpr std::size_t kNumComponents = 7;
  double component(std::size_t i) const;

  bool valid() const noexcept;
  Box7 enlarged(double margin) const noexcept;
};

/// Wraps an angle into (-pi, pi].
double normalize_yaw(double yaw) noexcept;

struct Vec2 {
  double x = 0.0, y = 0.0;
};

/// BEV footprint corners, counter-clockwise.
std::array<Vec2, 4> bev_corners(const Box7& box) noexcept;

/// True iff (x, y) lies in the closed BEV footprint of `box`.
bool bev_contains(const Box7& box, double x, double y) noexcept;

/// True iff the point, expressed in the box frame, satisfies
/// |x'| <= l/2, |y'| <= w/2 and |z'| <= h/2.
bool point_in_box(const Point& p, const Box7& box) noexcept;
bool point_in_any_box(const Point& p, const std::vector<Box7>& boxes) noexcept;

/// Rotated-rectangle IoU of two BEV footprints, in [0, 1].
double bev_iou(const Box7& a, const Box7& b) noexcept;

/// Area of the intersection of two BEV footprints.
double bev_intersection_area(const Box7& a, const Box7& b) noexcept;

/// One record of a label file: `class cx cy cz l w h yaw [score]`.
struct LabeledBox {
  std::string class_name;
  Box7 box;
  double score = 1.0;
};

/// Parses a label file. Blank lines and lines starting with '#' are
/// skipped. Throws ParseError with the 1-based line number on malformed
/// input.
std::vector<LabeledBox> parse_labels(std::string_view text);
std::string format_labels(const std::vector<LabeledBox>& labels);

std::vector<Box7> boxes_of(const std::vector<LabeledBox>& labels);

}  // namespace sms
