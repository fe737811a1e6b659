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

#include "sgpu/st_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sgpu/error.hpp"

namespace sgpu {

FeatureVolume::FeatureVolume(int channels, int frames, int height, int width)
    : FeatureVolume(channels, frames, height, width,
                    std::vector<double>(static_cast<size_t>(std::max(channels, 0)) *
                                        std::max(frames, 0) * std::max(height, 0) *
                                        std::max(width, 0))) {}

FeatureVolume::FeatureVolume(int channels, int frames, int height, int width,
                             std::vector<double> data)
    : channels_(channels), frames_(frames), height_(height), width_(width),
      data_(std::move(data)) {
  if (channels < 1 || frames < 1 || height < 1 || width < 1) {
    throw UsageError("feature volume dimensions must be >= 1");
  }
  const size_t expected = static_cast<size_t>(channels) * frames * height * width;
  if (data_.size() != expected) {
    throw UsageError("feature volume holds " + std::to_string(data_.size()) +
                     " values, expected " + std::to_string(expected));
  }
}

std::vector<double> FeatureVolume::frame(int t) const {
  std::vector<double> out(static_cast<size_t>(channels_) * height_ * width_);
  const size_t plane = static_cast<size_t>(height_) * width_;
  for (int c = 0; c < channels_; ++c) {
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(index(c, t, 0, 0)), plane,
                out.begin() + static_cast<std::ptrdiff_t>(c * plane));
  }
  return out;
}

std::vector<double> FeatureVolume::temporal_mean() const {
  const size_t plane = static_cast<size_t>(height_) * width_;
  std::vector<double> out(static_cast<size_t>(channels_) * plane, 0.0);
  for (int c = 0; c < channels_; ++c) {
    for (int t = 0; t < frames_; ++t) {
      const double* src = data_.data() + index(c, t, 0, 0);
      double* dst = out.data() + c * plane;
      for (size_t i = 0; i < plane; ++i) dst[i] += src[i];
    }
  }
  for (auto& v : out) v /= frames_;
  return out;
}

namespace {

double bilinear(const FeatureMap& map, int c, double y, double x) {
  // Cell centers sit at half-integer coordinates.
  double v = std::clamp(y - 0.5, 0.0, static_cast<double>(map.height - 1));
  double u = std::clamp(x - 0.5, 0.0, static_cast<double>(map.width - 1));
  const int y_lo = static_cast<int>(std::floor(v));
  const int x_lo = static_cast<int>(std::floor(u));
  const int y_hi = std::min(y_lo + 1, map.height - 1);
  const int x_hi = std::min(x_lo + 1, map.width - 1);
  const double ly = v - y_lo;
  const double lx = u - x_lo;
  const double hy = 1.0 - ly;
  const double hx = 1.0 - lx;
  return hy * hx * map.at(c, y_lo, x_lo) + hy * lx * map.at(c, y_lo, x_hi) +
         ly * hx * map.at(c, y_hi, x_lo) + ly * lx * map.at(c, y_hi, x_hi);
}

void check_output(int out_h, int out_w, int sampling_ratio) {
  if (out_h < 1 || out_w < 1) throw UsageError("pooled size must be >= 1x1");
  if (sampling_ratio < 1) throw UsageError("sampling ratio must be >= 1");
}

}  // namespace

PooledFeature roi_align(const FeatureMap& map, const BoundingBox& box, int out_h,
                        int out_w, int sampling_ratio) {
  check_output(out_h, out_w, sampling_ratio);
  if (map.channels < 1 || map.height < 1 || map.width < 1 ||
      map.data.size() != static_cast<size_t>(map.channels) * map.height * map.width) {
    throw UsageError("feature map shape does not match its data");
  }
  if (!box.valid() || !(box.area() > 0.0)) {
    throw DataError("RoIAlign needs a box with positive area");
  }
  if (!box.inside(map.width, map.height)) {
    throw DataError("RoIAlign box lies outside the feature map");
  }
  PooledFeature out{map.channels, out_h, out_w,
                    std::vector<double>(static_cast<size_t>(map.channels) * out_h * out_w)};
  const double bin_h = box.height() / out_h;
  const double bin_w = box.width() / out_w;
  const double step_h = bin_h / sampling_ratio;
  const double step_w = bin_w / sampling_ratio;
  const double count = static_cast<double>(sampling_ratio) * sampling_ratio;
  for (int c = 0; c < map.channels; ++c) {
    for (int ph = 0; ph < out_h; ++ph) {
      for (int pw = 0; pw < out_w; ++pw) {
        double acc = 0.0;
        for (int iy = 0; iy < sampling_ratio; ++iy) {
          const double y = box.y0 + ph * bin_h + (iy + 0.5) * step_h;
          for (int ix = 0; ix < sampling_ratio; ++ix) {
            const double x = box.x0 + pw * bin_w + (ix + 0.5) * step_w;
            acc += bilinear(map, c, y, x);
          }
        }
        out.data[(static_cast<size_t>(c) * out_h + ph) * out_w + pw] = acc / count;
      }
    }
  }
  return out;
}

PooledFeature toi_pool(const FeatureVolume& vol, const Trajectory& tube, int out_h,
                       int out_w, int sampling_ratio) {
  check_output(out_h, out_w, sampling_ratio);
  if (static_cast<int>(tube.boxes.size()) != vol.frames()) {
    throw UsageError("tube has " + std::to_string(tube.boxes.size()) +
                     " boxes for a volume of " + std::to_string(vol.frames()) +
                     " frames");
  }
  PooledFeature out{vol.channels(), out_h, out_w,
                    std::vector<double>(static_cast<size_t>(vol.channels()) * out_h * out_w, 0.0)};
  for (int t = 0; t < vol.frames(); ++t) {
    const auto& box = tube.boxes[static_cast<size_t>(t)];
    if (!box) {
      throw UsageError("tube frame " + std::to_string(t) +
                       " has no box; fill the trajectory first");
    }
    const auto slice = vol.frame(t);
    const FeatureMap map{vol.channels(), vol.height(), vol.width(), slice};
    const auto pooled = roi_align(map, *box, out_h, out_w, sampling_ratio);
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += pooled.data[i];
  }
  for (auto& v : out.data) v /= vol.frames();
  return out;
}

PooledFeature naive_temporal_roi(const FeatureVolume& vol, const BoundingBox& box,
                                 int out_h, int out_w, int sampling_ratio) {
  const auto mean = vol.temporal_mean();
  const FeatureMap map{vol.channels(), vol.height(), vol.width(), mean};
  return roi_align(map, box, out_h, out_w, sampling_ratio);
}

MaskStack MaskStack::channel(int c) const {
  if (c < 0 || c >= channels()) throw UsageError("mask channel out of range");
  MaskStack out{height, width, {roles[static_cast<size_t>(c)]}, {}};
  const size_t plane = static_cast<size_t>(height) * width;
  out.data.assign(data.begin() + static_cast<std::ptrdiff_t>(c * plane),
                  data.begin() + static_cast<std::ptrdiff_t>((c + 1) * plane));
  return out;
}

namespace {

// Liang-Barsky clip of the segment (x0,y0)-(x1,y1) to [lo_x, hi_x] x [lo_y, hi_y].
bool clip_segment(double& x0, double& y0, double& x1, double& y1, double lo_x,
                  double lo_y, double hi_x, double hi_y) {
  const double dx = x1 - x0;
  const double dy = y1 - y0;
  double t0 = 0.0;
  double t1 = 1.0;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {x0 - lo_x, hi_x - x0, y0 - lo_y, hi_y - y0};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
    if (t0 > t1) return false;
  }
  const double ax = x0 + t0 * dx, ay = y0 + t0 * dy;
  const double bx = x0 + t1 * dx, by = y0 + t1 * dy;
  x0 = ax;
  y0 = ay;
  x1 = bx;
  y1 = by;
  return true;
}

void stamp(MaskStack& m, long cy, long cx, int thickness, float value) {
  const int lo = -(thickness - 1) / 2;
  const int hi = thickness / 2;
  for (int oy = lo; oy <= hi; ++oy) {
    const long y = cy + oy;
    if (y < 0 || y >= m.height) continue;
    for (int ox = lo; ox <= hi; ++ox) {
      const long x = cx + ox;
      if (x < 0 || x >= m.width) continue;
      float& cell = m.at(0, static_cast<int>(y), static_cast<int>(x));
      cell = std::max(cell, value);
    }
  }
}

}  // namespace

MaskStack skeleton_mask(const PoseSkeleton& pose, int height, int width,
                        int thickness) {
  if (height < 1 || width < 1) throw UsageError("mask size must be >= 1x1");
  if (thickness < 1) throw UsageError("line thickness must be >= 1");
  MaskStack m{height, width, {MaskRole::kSkeleton},
              std::vector<float>(static_cast<size_t>(height) * width, 0.0f)};
  const double margin = thickness + 1.0;
  for (int k = 0; k < kPoseLimbs; ++k) {
    const auto [a, b] = kPoseLimbEdges[static_cast<size_t>(k)];
    double x0 = pose.joints[static_cast<size_t>(a)][0];
    double y0 = pose.joints[static_cast<size_t>(a)][1];
    double x1 = pose.joints[static_cast<size_t>(b)][0];
    double y1 = pose.joints[static_cast<size_t>(b)][1];
    if (!std::isfinite(x0) || !std::isfinite(y0) || !std::isfinite(x1) ||
        !std::isfinite(y1)) {
      continue;
    }
    if (!clip_segment(x0, y0, x1, y1, -margin, -margin, width + margin,
                      height + margin)) {
      continue;
    }
    const float value = static_cast<float>(k + 1) / kPoseLimbs;
    // Bresenham between the cells holding the two endpoints.
    long cx = static_cast<long>(std::floor(x0));
    long cy = static_cast<long>(std::floor(y0));
    const long ex = static_cast<long>(std::floor(x1));
    const long ey = static_cast<long>(std::floor(y1));
    const long dx = std::labs(ex - cx);
    const long dy = -std::labs(ey - cy);
    const long sx = cx < ex ? 1 : -1;
    const long sy = cy < ey ? 1 : -1;
    long err = dx + dy;
    while (true) {
      stamp(m, cy, cx, thickness, value);
      if (cx == ex && cy == ey) break;
      const long e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        cx += sx;
      }
      if (e2 <= dx) {
        err += dx;
        cy += sy;
      }
    }
  }
  return m;
}

MaskStack pair_box_masks(const BoundingBox& human, const BoundingBox& object,
                         int height, int width) {
  if (height < 1 || width < 1) throw UsageError("mask size must be >= 1x1");
  MaskStack m{height, width, {MaskRole::kHumanBox, MaskRole::kObjectBox},
              std::vector<float>(2 * static_cast<size_t>(height) * width, 0.0f)};
  const BoundingBox* boxes[2] = {&human, &object};
  for (int c = 0; c < 2; ++c) {
    const auto& b = *boxes[c];
    for (int y = 0; y < height; ++y) {
      const double cy = y + 0.5;
      if (!(cy >= b.y0 && cy < b.y1)) continue;
      for (int x = 0; x < width; ++x) {
        const double cx = x + 0.5;
        if (cx >= b.x0 && cx < b.x1) m.at(c, y, x) = 1.0f;
      }
    }
  }
  return m;
}

MaskStack masking_pose_stack(const MaskStack& skeleton, const MaskStack& pair) {
  if (skeleton.channels() != 1 || pair.channels() != 2) {
    throw UsageError("masking pose stack needs 1 skeleton and 2 box channels");
  }
  if (skeleton.height != pair.height || skeleton.width != pair.width) {
    throw UsageError("skeleton and box masks differ in size");
  }
  MaskStack out{pair.height, pair.width, pair.roles, pair.data};
  out.roles.push_back(skeleton.roles.front());
  out.data.insert(out.data.end(), skeleton.data.begin(), skeleton.data.end());
  return out;
}

}  // namespace sgpu
