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

#ifndef SGPU_ORACLE_HPP_
#define SGPU_ORACLE_HPP_

// Brute-force reference metrics for tiny instances. Nothing here calls into
// the metric engines: ranking is done by pairwise rank counting, matching is
// recomputed from scratch for every cutoff and precision envelopes are taken
// by exhaustive maxima. Cost is polynomial but deliberately naive, so inputs
// are capped and larger ones refused with UsageError.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "sgpu/hoi_metrics.hpp"
#include "sgpu/sgg_metrics.hpp"

namespace sgpu::oracle {

inline constexpr int kMaxObjects = 4;
inline constexpr int kMaxPredicates = 5;
inline constexpr int kMaxImages = 3;
inline constexpr int kMaxDetections = 5;

struct SggReference {
  int k = 0;
  double recall = 0.0;
  double mean_recall = 0.0;
  std::vector<std::optional<double>> per_class;
  std::optional<double> head, middle, tail;
};

struct SggOracleResult {
  std::vector<SggReference> constrained;
  std::vector<SggReference> unconstrained;
};

SggOracleResult sgg_metrics(std::span<const SggSample> images,
                            const PredicateVocabulary& vocab, EvalMode mode,
                            std::span<const int> ks);

double average_precision(const std::vector<bool>& flags, std::size_t gt_count);

struct HoiOracleResult {
  std::map<HoiCategory, double> ap;
  std::optional<double> full, rare, nonrare;
  std::map<int, double> predicate_ap;
};

// Keyframes may hold at most kMaxDetections (pair, interaction) detections.
HoiOracleResult hoi_metrics(std::span<const HoiSample> keyframes,
                            const std::map<HoiCategory, std::uint64_t>& counts);

struct VidOracleResult {
  std::vector<double> recall;     // per detection K
  double map = 0.0;
  std::vector<double> precision;  // per tagging K
};

VidOracleResult vidvrd_metrics(std::span<const VideoRelations> videos,
                               std::span<const int> detection_ks,
                               std::span<const int> tagging_ks);

// Random tiny instances for engine-vs-oracle campaigns.
struct TinySgg {
  std::vector<SggSample> images;
  PredicateVocabulary vocab;
  EvalMode mode = EvalMode::kPredCls;
};
TinySgg random_tiny_sgg(std::uint64_t seed);

struct TinyHoi {
  std::vector<HoiSample> keyframes;
  int num_interactions = 0;
  std::map<HoiCategory, std::uint64_t> counts;
};
TinyHoi random_tiny_hoi(std::uint64_t seed);

std::vector<VideoRelations> random_tiny_vidvrd(std::uint64_t seed);

}  // namespace sgpu::oracle

#endif  // SGPU_ORACLE_HPP_
