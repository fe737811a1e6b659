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

#ifndef SGPU_HOI_METRICS_HPP_
#define SGPU_HOI_METRICS_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sgpu/geometry.hpp"

namespace sgpu {

// ---------------------------------------------------------------------------
// Keyframe human-object interaction detection.
//
// Interaction classes are 0-based (0..C-1); there is no background class.
// The subject is always a person, so a category is (interaction, object).
// ---------------------------------------------------------------------------

struct HoiCategory {
  int predicate = 0;
  int object_label = 0;

  friend auto operator<=>(const HoiCategory&, const HoiCategory&) = default;
};

// Annotated human-object pair with the set of interactions it exhibits.
struct HoiGroundTruth {
  BoundingBox human;
  BoundingBox object;
  int object_label = 0;
  std::vector<int> interactions;
};

struct HoiPairPrediction {
  BoundingBox human;
  double human_score = 1.0;
  BoundingBox object;
  int object_label = 0;
  double object_score = 1.0;
  std::vector<double> interaction_scores;  // one per interaction class
};

struct KeyframeAnnotation {
  std::string video_id;
  int frame = 0;
  std::vector<HoiGroundTruth> pairs;
};

struct KeyframePrediction {
  std::string video_id;
  int frame = 0;
  std::vector<HoiPairPrediction> pairs;
};

struct HoiSample {
  KeyframeAnnotation gt;
  KeyframePrediction predictions;
};

// One (pair, interaction) expansion of a HoiPairPrediction.
struct HoiDetection {
  std::size_t pair_index = 0;
  int predicate = 0;
  int object_label = 0;
  BoundingBox human;
  BoundingBox object;
  double score = 0.0;

  HoiCategory category() const { return {predicate, object_label}; }
};

inline constexpr std::size_t kKeyframeDetectionCap = 100;
// Both boxes must overlap the ground truth strictly above this IoU.
inline constexpr double kHoiMatchIou = 0.5;
// Categories with fewer annotated instances than this are "rare".
inline constexpr std::uint64_t kRareThreshold = 25;

// Expands every (pair, interaction) into a detection scored
// interaction * human * object score, sorts by descending score (ties keep
// input order) and keeps the first `cap`.
std::vector<HoiDetection> top100_filter(const KeyframePrediction& keyframe,
                                        std::size_t cap = kKeyframeDetectionCap);

// TP/FP flag per ranked detection of one keyframe. A detection is a true
// positive when an unmatched ground-truth pair with the same object label and
// interaction overlaps it with human IoU > 0.5 and object IoU > 0.5; the
// candidate with the largest min(human IoU, object IoU) is taken, ties to the
// lowest index. Each (pair, interaction) is matched at most once.
std::vector<bool> match_hoi(std::span<const HoiDetection> ranked,
                            std::span<const HoiGroundTruth> gt);

// All-points interpolated average precision of a ranked TP/FP sequence.
// Throws UsageError when gt_count is 0.
double average_precision(const std::vector<bool>& flags, std::size_t gt_count);

enum class HoiSplit { kFull, kRare, kNonRare };

const char* to_string(HoiSplit s);
HoiSplit hoi_split_from_string(const std::string& s);

// Annotation counts per category deciding Rare (< 25) vs Non-rare (>= 25).
// Unlisted categories count as 0.
struct CategorySplit {
  std::map<HoiCategory, std::uint64_t> counts;

  std::uint64_t count(const HoiCategory& c) const;
  bool rare(const HoiCategory& c) const { return count(c) < kRareThreshold; }
  bool contains(HoiSplit split, const HoiCategory& c) const;

  static CategorySplit from_annotations(std::span<const KeyframeAnnotation> gt);
};

// Ranked TP/FP list of one pooled group of detections (a category or a
// predicate) together with its ground-truth count.
struct RankedFlags {
  std::size_t gt_count = 0;
  std::vector<double> scores;
  std::vector<bool> flags;
};

struct HoiEvaluation {
  std::map<HoiCategory, RankedFlags> categories;
  std::map<int, RankedFlags> predicates;
};

// Per-keyframe filter and matching; keyframes are pooled in input order.
HoiEvaluation evaluate_hoi(std::span<const HoiSample> dataset,
                           std::size_t cap = kKeyframeDetectionCap);

struct HoiMapResult {
  double map = 0.0;
  std::map<HoiCategory, double> ap;  // categories with >= 1 ground truth
};

// Mean AP over the split's categories that have ground truth. Throws
// DataError when the split is empty.
HoiMapResult hoi_map(const HoiEvaluation& eval, HoiSplit split,
                     const CategorySplit& counts);

// AP per interaction class pooled over object categories; classes without
// ground truth are absent.
std::map<int, double> predicate_ap(const HoiEvaluation& eval);

struct TemporalSpatialMap {
  std::optional<HoiMapResult> temporal;
  std::optional<HoiMapResult> spatial;
};

// Full-split mAP restricted to temporal-tagged interactions and to the rest.
// temporal_tags[p] tags interaction p. Throws UsageError on a size mismatch.
TemporalSpatialMap temporal_spatial_map(const HoiEvaluation& eval,
                                        const std::vector<bool>& temporal_tags);

// ---------------------------------------------------------------------------
// Video relation detection / tagging.
// ---------------------------------------------------------------------------

struct RelationTriplet {
  int subj = 0;
  int pred = 0;
  int obj = 0;

  friend auto operator<=>(const RelationTriplet&, const RelationTriplet&) = default;
};

struct RelationInstance {
  RelationTriplet triplet;
  Trajectory subj;
  Trajectory obj;
  double score = 1.0;
};

struct VideoRelations {
  std::string video_id;
  std::vector<RelationInstance> gt;
  std::vector<RelationInstance> predictions;
};

// Both trajectories must reach at least this vIoU.
inline constexpr double kRelationMatchViou = 0.5;

// For predictions ranked by descending score (ties keep input order), the rank
// at which each ground truth is hit, or std::nullopt. Greedy one-to-one;
// among unmatched ground truths with the same triplet the largest
// min(subject vIoU, object vIoU) wins, ties to the lowest index.
std::vector<std::optional<std::size_t>> relation_hit_ranks(
    const VideoRelations& video, std::vector<std::size_t>* order = nullptr,
    std::vector<bool>* flags = nullptr);

struct RelationDetectionResult {
  std::vector<std::pair<int, double>> recall;   // (K, R@K)
  double map = 0.0;
  std::map<RelationTriplet, double> ap;
};

// R@K averaged over videos with ground truth; mAP over triplet categories.
// Throws DataError when no video has ground truth.
RelationDetectionResult relation_detection_eval(std::span<const VideoRelations> videos,
                                                std::span<const int> ks);

// P@K over distinct predicted triplet labels, averaged over videos with
// ground truth.
std::vector<std::pair<int, double>> relation_tagging_precision(
    std::span<const VideoRelations> videos, std::span<const int> ks);

}  // namespace sgpu

#endif  // SGPU_HOI_METRICS_HPP_
