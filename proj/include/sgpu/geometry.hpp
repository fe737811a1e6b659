// Copyright 2026 The sgpu Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SGPU_GEOMETRY_HPP_
#define SGPU_GEOMETRY_HPP_

#include <optional>
#include <vector>

namespace sgpu {

// Axis-aligned box in continuous pixel coordinates. Area is
// (x1 - x0) * (y1 - y0); there is no "+1" pixel convention.
struct BoundingBox {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const;
  // Ordered corners, all finite.
  bool valid() const;
  bool inside(double image_width, double image_height) const;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

double intersection_area(const BoundingBox& a, const BoundingBox& b);

// Intersection over union; 0 when the union is empty.
double iou(const BoundingBox& a, const BoundingBox& b);

// Per-frame boxes of one tracked object. boxes[i] belongs to frame
// start_frame + i; std::nullopt marks a frame where the object is not visible.
struct Trajectory {
  int start_frame = 0;
  std::vector<std::optional<BoundingBox>> boxes;

  int end_frame() const { return start_frame + static_cast<int>(boxes.size()); }
  const std::optional<BoundingBox>& at(int frame) const;
  bool has_box(int frame) const;
  int present_count() const;
  bool valid() const;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

// Volumetric IoU: summed per-frame intersection over summed per-frame union,
// over every frame where either trajectory has a box.
double viou(const Trajectory& a, const Trajectory& b);

// Returns a trajectory spanning [segment_start, segment_start + length) with
// every absent or missing frame replaced by the whole-image box
// [0, 0, image_width, image_height]. Throws UsageError when length < 1.
Trajectory fill_trajectory(const Trajectory& t, int length, double image_width,
                           double image_height, int segment_start = 0);

}  // namespace sgpu

#endif  // SGPU_GEOMETRY_HPP_
