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

#ifndef SGPU_ST_KERNELS_HPP_
#define SGPU_ST_KERNELS_HPP_

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "sgpu/geometry.hpp"

namespace sgpu {

// d x H x W feature map stored channel-major (C order).
struct FeatureMap {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::span<const double> data;

  double at(int c, int y, int x) const {
    return data[(static_cast<size_t>(c) * height + y) * width + x];
  }
};

// d x T x H x W feature volume stored in C order.
class FeatureVolume {
 public:
  FeatureVolume() = default;
  // Throws UsageError on a non-positive dimension.
  FeatureVolume(int channels, int frames, int height, int width);
  FeatureVolume(int channels, int frames, int height, int width,
                std::vector<double> data);

  int channels() const { return channels_; }
  int frames() const { return frames_; }
  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return data_.size(); }

  double& at(int c, int t, int y, int x) { return data_[index(c, t, y, x)]; }
  double at(int c, int t, int y, int x) const { return data_[index(c, t, y, x)]; }
  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  // Frame t as a d x H x W map. Channel c of frame t is contiguous, but
  // channels are strided by T*H*W, so this copies.
  std::vector<double> frame(int t) const;
  // Mean over the time axis, d x H x W.
  std::vector<double> temporal_mean() const;

 private:
  std::size_t index(int c, int t, int y, int x) const {
    return ((static_cast<size_t>(c) * frames_ + t) * height_ + y) * width_ + x;
  }

  int channels_ = 0;
  int frames_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

// d x h x w pooled output.
struct PooledFeature {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<double> data;

  double at(int c, int y, int x) const {
    return data[(static_cast<size_t>(c) * height + y) * width + x];
  }
};

inline constexpr int kDefaultSamplingRatio = 2;

// RoIAlign with continuous coordinates: feature cell (y, x) covers
// [x, x+1) x [y, y+1) and its value sits at the cell center. The box is split
// into out_h x out_w bins; each bin averages sampling_ratio^2 bilinear
// samples on a regular grid. Throws DataError for a zero-area box or one
// outside [0, W] x [0, H]; UsageError for bad output sizes.
PooledFeature roi_align(const FeatureMap& map, const BoundingBox& box, int out_h,
                        int out_w, int sampling_ratio = kDefaultSamplingRatio);

// Tube-of-interest pooling: RoIAlign of every frame at that frame's box, then
// the temporal mean. `tube` must hold exactly T present boxes (see
// fill_trajectory); otherwise UsageError.
PooledFeature toi_pool(const FeatureVolume& vol, const Trajectory& tube, int out_h,
                       int out_w, int sampling_ratio = kDefaultSamplingRatio);

// Temporal mean of the whole volume followed by one RoIAlign at a fixed box.
PooledFeature naive_temporal_roi(const FeatureVolume& vol, const BoundingBox& box,
                                 int out_h, int out_w,
                                 int sampling_ratio = kDefaultSamplingRatio);

enum class MaskRole { kSkeleton, kHumanBox, kObjectBox };

// channels x H x W mask values in [0, 1].
struct MaskStack {
  int height = 0;
  int width = 0;
  std::vector<MaskRole> roles;
  std::vector<float> data;

  int channels() const { return static_cast<int>(roles.size()); }
  float at(int c, int y, int x) const {
    return data[(static_cast<size_t>(c) * height + y) * width + x];
  }
  float& at(int c, int y, int x) {
    return data[(static_cast<size_t>(c) * height + y) * width + x];
  }
  // Copy of channel c as a single-channel stack.
  MaskStack channel(int c) const;
};

inline constexpr int kPoseJoints = 17;
inline constexpr int kPoseLimbs = 16;

// COCO keypoint order: nose, eyes, ears, shoulders, elbows, wrists, hips,
// knees, ankles. The limbs are the COCO skeleton without the eye-eye and
// ear-shoulder links.
inline constexpr std::array<std::pair<int, int>, kPoseLimbs> kPoseLimbEdges = {{
    {15, 13}, {13, 11}, {16, 14}, {14, 12}, {11, 12}, {5, 11}, {6, 12}, {5, 6},
    {5, 7},   {6, 8},   {7, 9},   {8, 10},  {0, 1},   {0, 2},  {1, 3},  {2, 4},
}};

struct PoseSkeleton {
  std::array<std::array<double, 2>, kPoseJoints> joints{};  // (x, y) pixels
};

// Rasterizes each limb k (0-based) with value (k + 1) / 16 onto an H x W
// canvas; overlaps keep the larger value and joints off the canvas are
// clipped. A joint at (x, y) lands in cell (floor(y), floor(x)). Limbs with a
// non-finite endpoint are skipped. Throws UsageError for H, W or thickness < 1.
MaskStack skeleton_mask(const PoseSkeleton& pose, int height, int width,
                        int thickness = 1);

// Two binary channels (human, object): a cell is 1 when its center lies in
// [x0, x1) x [y0, y1).
MaskStack pair_box_masks(const BoundingBox& human, const BoundingBox& object,
                         int height, int width);

// [human box; object box; skeleton]. Throws UsageError on shape mismatch.
MaskStack masking_pose_stack(const MaskStack& skeleton, const MaskStack& pair);

}  // namespace sgpu

#endif  // SGPU_ST_KERNELS_HPP_
