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

#include "sgpu/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sgpu/error.hpp"

namespace sgpu {

double BoundingBox::area() const {
  return std::max(0.0, width()) * std::max(0.0, height());
}

bool BoundingBox::valid() const {
  return std::isfinite(x0) && std::isfinite(y0) && std::isfinite(x1) &&
         std::isfinite(y1) && x0 <= x1 && y0 <= y1;
}

bool BoundingBox::inside(double image_width, double image_height) const {
  return x0 >= 0.0 && y0 >= 0.0 && x1 <= image_width && y1 <= image_height;
}

double intersection_area(const BoundingBox& a, const BoundingBox& b) {
  const double w = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
  const double h = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double inter = intersection_area(a, b);
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

const std::optional<BoundingBox>& Trajectory::at(int frame) const {
  static const std::optional<BoundingBox> kAbsent;
  if (frame < start_frame || frame >= end_frame()) return kAbsent;
  return boxes[static_cast<size_t>(frame - start_frame)];
}

bool Trajectory::has_box(int frame) const { return at(frame).has_value(); }

int Trajectory::present_count() const {
  return static_cast<int>(
      std::count_if(boxes.begin(), boxes.end(),
                    [](const auto& b) { return b.has_value(); }));
}

bool Trajectory::valid() const {
  if (present_count() == 0) return false;
  return std::all_of(boxes.begin(), boxes.end(),
                     [](const auto& b) { return !b || b->valid(); });
}

double viou(const Trajectory& a, const Trajectory& b) {
  const int lo = std::min(a.start_frame, b.start_frame);
  const int hi = std::max(a.end_frame(), b.end_frame());
  double inter = 0.0;
  double uni = 0.0;
  for (int f = lo; f < hi; ++f) {
    const auto& ba = a.at(f);
    const auto& bb = b.at(f);
    if (ba && bb) {
      const double i = intersection_area(*ba, *bb);
      inter += i;
      uni += ba->area() + bb->area() - i;
    } else if (ba) {
      uni += ba->area();
    } else if (bb) {
      uni += bb->area();
    }
  }
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

Trajectory fill_trajectory(const Trajectory& t, int length, double image_width,
                           double image_height, int segment_start) {
  if (length < 1) {
    throw UsageError("fill_trajectory: segment length must be >= 1, got " +
                     std::to_string(length));
  }
  const BoundingBox whole{0.0, 0.0, image_width, image_height};
  Trajectory out;
  out.start_frame = segment_start;
  out.boxes.reserve(static_cast<size_t>(length));
  for (int f = segment_start; f < segment_start + length; ++f) {
    const auto& b = t.at(f);
    out.boxes.emplace_back(b ? *b : whole);
  }
  return out;
}

}  // namespace sgpu
