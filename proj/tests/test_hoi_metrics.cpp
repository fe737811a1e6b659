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

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "sgpu/error.hpp"
#include "sgpu/hoi_metrics.hpp"
#include "sgpu/random.hpp"

using namespace sgpu;

namespace {

const BoundingBox kHuman{0, 0, 10, 10};
const BoundingBox kObject{20, 0, 30, 10};

HoiGroundTruth gt_pair(std::vector<int> interactions, int label = 1) {
  return {kHuman, kObject, label, std::move(interactions)};
}

HoiPairPrediction det(std::vector<double> scores, int label = 1,
                      BoundingBox human = kHuman, BoundingBox object = kObject) {
  HoiPairPrediction p;
  p.human = human;
  p.object = object;
  p.object_label = label;
  p.interaction_scores = std::move(scores);
  return p;
}

HoiSample sample(std::vector<HoiGroundTruth> gt, std::vector<HoiPairPrediction> preds,
                 int frame = 0) {
  HoiSample s;
  s.gt.video_id = s.predictions.video_id = "v";
  s.gt.frame = s.predictions.frame = frame;
  s.gt.pairs = std::move(gt);
  s.predictions.pairs = std::move(preds);
  return s;
}

std::vector<bool> flags_of(std::initializer_list<int> v) {
  std::vector<bool> out;
  for (int x : v) out.push_back(x != 0);
  return out;
}

Trajectory still(const BoundingBox& b, int frames = 2) {
  return {0, std::vector<std::optional<BoundingBox>>(static_cast<size_t>(frames), b)};
}

RelationInstance relation(RelationTriplet t, const BoundingBox& s, const BoundingBox& o,
                          double score = 1.0) {
  return {t, still(s), still(o), score};
}

}  // namespace

TEST_CASE("top-100 cap") {
  KeyframePrediction kf;
  kf.pairs.push_back(det(std::vector<double>(50, 0.5)));
  CHECK(top100_filter(kf).size() == 50);

  KeyframePrediction big;
  std::vector<double> scores(150);
  for (int i = 0; i < 150; ++i) scores[i] = i / 150.0;
  big.pairs.push_back(det(scores));
  const auto kept = top100_filter(big);
  REQUIRE(kept.size() == 100);
  CHECK(kept.front().predicate == 149);
  CHECK(kept.back().predicate == 50);

  KeyframePrediction ties;
  ties.pairs.push_back(det(std::vector<double>(150, 0.5)));
  const auto cut = top100_filter(ties);
  REQUIRE(cut.size() == 100);
  for (int i = 0; i < 100; ++i) CHECK(cut[i].predicate == i);
}

TEST_CASE("detection score is the product of the three confidences") {
  KeyframePrediction kf;
  auto d = det({0.5});
  d.human_score = 0.8;
  d.object_score = 0.5;
  kf.pairs.push_back(d);
  CHECK(top100_filter(kf)[0].score == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("match_hoi: identical, strict IoU and duplicate detections") {
  const std::vector<HoiGroundTruth> gt = {gt_pair({0})};
  KeyframePrediction kf;
  kf.pairs.push_back(det({0.9}));
  auto ranked = top100_filter(kf);
  CHECK(match_hoi(ranked, gt) == flags_of({1}));

  KeyframePrediction half;
  half.pairs.push_back(det({0.9}, 1, kHuman, {20, 0, 30, 5}));
  CHECK(iou(BoundingBox{20, 0, 30, 5}, kObject) == 0.5);
  ranked = top100_filter(half);
  CHECK(match_hoi(ranked, gt) == flags_of({0}));

  KeyframePrediction two;
  two.pairs.push_back(det({0.6}));
  two.pairs.push_back(det({0.9}));
  ranked = top100_filter(two);
  CHECK(ranked[0].pair_index == 1);
  CHECK(match_hoi(ranked, gt) == flags_of({1, 0}));

  KeyframePrediction wrong_label;
  wrong_label.pairs.push_back(det({0.9}, 2));
  ranked = top100_filter(wrong_label);
  CHECK(match_hoi(ranked, gt) == flags_of({0}));
}

TEST_CASE("average precision fixtures") {
  CHECK(average_precision(flags_of({1}), 1) == 1.0);
  CHECK(average_precision(flags_of({0, 0}), 1) == 0.0);
  CHECK(std::abs(average_precision(flags_of({1, 0, 1}), 2) - 5.0 / 6.0) <= 1e-12);
  CHECK(average_precision(flags_of({}), 3) == 0.0);
  CHECK(average_precision(flags_of({1}), 2) == 0.5);
  CHECK_THROWS_AS(average_precision(flags_of({1}), 0), UsageError);
}

TEST_CASE("AP is one iff every TP precedes every FP and all GT are found") {
  CounterRng rng(3, 0, 0);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(10));
    std::vector<bool> f(static_cast<size_t>(n));
    std::size_t tp = 0;
    for (int i = 0; i < n; ++i) {
      f[i] = rng.bernoulli(0.5);
      tp += f[i];
    }
    const std::size_t gt = tp + rng.below(3);
    if (gt == 0) continue;
    const double ap = average_precision(f, gt);
    const bool sorted = std::is_sorted(f.begin(), f.end(), std::greater<>());
    CHECK((ap == 1.0) == (sorted && tp == gt));
    CHECK((ap == 0.0) == (tp == 0));
  }
}

TEST_CASE("AP is invariant under strictly increasing score transforms") {
  CounterRng rng(4, 0, 0);
  for (int trial = 0; trial < 100; ++trial) {
    KeyframePrediction kf;
    std::vector<HoiGroundTruth> gt;
    const int n = 1 + static_cast<int>(rng.below(12));
    for (int i = 0; i < n; ++i) {
      const double dx = rng.uniform(0, 6);
      kf.pairs.push_back(det({rng.uniform(0.01, 1.0)}, 1, {dx, 0, dx + 10, 10}, kObject));
    }
    for (int i = 0; i < 1 + static_cast<int>(rng.below(3)); ++i) gt.push_back(gt_pair({0}));
    auto transformed = kf;
    for (auto& p : transformed.pairs) {
      p.interaction_scores[0] = std::pow(p.interaction_scores[0], 3.0) * 0.5;
    }
    const auto a = top100_filter(kf), b = top100_filter(transformed);
    CHECK(average_precision(match_hoi(a, gt), gt.size()) ==
          average_precision(match_hoi(b, gt), gt.size()));
  }
}

TEST_CASE("rare threshold and split partition") {
  CategorySplit split;
  split.counts[{0, 1}] = 24;
  split.counts[{1, 1}] = 25;
  CHECK(split.rare({0, 1}));
  CHECK_FALSE(split.rare({1, 1}));
  CHECK(split.rare({7, 7}));
  for (const HoiCategory c : {HoiCategory{0, 1}, HoiCategory{1, 1}, HoiCategory{3, 3}}) {
    CHECK(split.contains(HoiSplit::kFull, c));
    CHECK(split.contains(HoiSplit::kRare, c) != split.contains(HoiSplit::kNonRare, c));
  }
}

TEST_CASE("hoi_map perfect, split and empty split") {
  const std::vector<HoiSample> ds = {sample({gt_pair({0, 1})}, {det({0.9, 0.8})})};
  const auto eval = evaluate_hoi(ds);
  CategorySplit counts;
  counts.counts[{0, 1}] = 24;
  counts.counts[{1, 1}] = 25;
  CHECK(hoi_map(eval, HoiSplit::kFull, counts).map == 1.0);
  CHECK(hoi_map(eval, HoiSplit::kRare, counts).ap.size() == 1);
  CHECK(hoi_map(eval, HoiSplit::kNonRare, counts).ap.count({1, 1}) == 1);
  CategorySplit all_common;
  all_common.counts[{0, 1}] = 30;
  all_common.counts[{1, 1}] = 30;
  CHECK_THROWS_AS(hoi_map(eval, HoiSplit::kRare, all_common), DataError);
}

TEST_CASE("predicate AP pools object categories and skips absent predicates") {
  const std::vector<HoiSample> ds = {
      sample({gt_pair({0}, 1), gt_pair({0}, 2)}, {det({0.9, 0.0, 0.4}, 1), det({0.8, 0.0, 0.1}, 2)})};
  const auto eval = evaluate_hoi(ds);
  const auto p = predicate_ap(eval);
  CHECK(p.size() == 1);
  CHECK(p.at(0) == 1.0);
}

TEST_CASE("temporal and spatial maps partition the full split") {
  const std::vector<HoiSample> ds = {
      sample({gt_pair({0, 1, 2})}, {det({0.9, 0.2, 0.6}), det({0.3, 0.8, 0.1}, 1, {3, 0, 13, 10})})};
  const auto eval = evaluate_hoi(ds);
  CategorySplit counts = CategorySplit::from_annotations(std::vector<KeyframeAnnotation>{ds[0].gt});
  const auto full = hoi_map(eval, HoiSplit::kFull, counts);

  const auto spatial_only = temporal_spatial_map(eval, {false, false, false});
  CHECK_FALSE(spatial_only.temporal.has_value());
  CHECK(spatial_only.spatial->map == full.map);

  const auto mixed = temporal_spatial_map(eval, {true, false, true});
  CHECK(mixed.temporal->ap.size() + mixed.spatial->ap.size() == full.ap.size());
  for (const auto& [c, ap] : mixed.temporal->ap) CHECK(mixed.spatial->ap.count(c) == 0);

  CHECK_THROWS_AS(temporal_spatial_map(eval, {}), UsageError);
  CHECK_THROWS_AS(temporal_spatial_map(eval, {true}), UsageError);
}

TEST_CASE("relation detection: identical and low-vIoU predictions") {
  const RelationTriplet t{1, 2, 3};
  const BoundingBox s{0, 0, 10, 10}, o{20, 0, 30, 10};
  VideoRelations v;
  v.video_id = "v";
  v.gt = {relation(t, s, o)};
  v.predictions = {relation(t, s, o, 0.9)};
  const std::vector<int> ks = {1, 50};
  auto r = relation_detection_eval(std::vector<VideoRelations>{v}, ks);
  CHECK(r.recall[0].second == 1.0);
  CHECK(r.map == 1.0);

  v.predictions = {relation(t, {0, 0, 4, 10}, o, 0.9)};
  CHECK(viou(v.predictions[0].subj, v.gt[0].subj) == doctest::Approx(0.4));
  r = relation_detection_eval(std::vector<VideoRelations>{v}, ks);
  CHECK(r.recall[1].second == 0.0);

  v.predictions = {relation(t, {0, 0, 5, 10}, o, 0.9)};
  r = relation_detection_eval(std::vector<VideoRelations>{v}, ks);
  CHECK(r.recall[1].second == 1.0);
}

TEST_CASE("relation recall is non-decreasing in K") {
  CounterRng rng(8, 0, 0);
  for (int trial = 0; trial < 100; ++trial) {
    VideoRelations v;
    v.video_id = "v";
    for (int i = 0; i < 3; ++i) {
      const RelationTriplet t{0, static_cast<int>(rng.below(3)), 1};
      const double x = rng.uniform(0, 20);
      v.gt.push_back(relation(t, {x, 0, x + 10, 10}, {40, 0, 50, 10}));
    }
    for (int i = 0; i < 8; ++i) {
      const RelationTriplet t{0, static_cast<int>(rng.below(3)), 1};
      const double x = rng.uniform(0, 20);
      v.predictions.push_back(relation(t, {x, 0, x + 10, 10}, {40, 0, 50, 10}, rng.uniform()));
    }
    const std::vector<int> ks = {1, 2, 3, 5, 8, 20};
    const auto r = relation_detection_eval(std::vector<VideoRelations>{v}, ks);
    for (std::size_t i = 1; i < r.recall.size(); ++i) {
      CHECK(r.recall[i].second >= r.recall[i - 1].second);
    }
  }
}

TEST_CASE("tagging precision counts distinct labels") {
  const BoundingBox s{0, 0, 10, 10}, o{20, 0, 30, 10};
  VideoRelations v;
  v.video_id = "v";
  v.gt = {relation({0, 1, 1}, s, o), relation({0, 2, 1}, s, o)};
  v.predictions = {relation({0, 1, 1}, s, o, 0.9), relation({0, 1, 1}, s, o, 0.8),
                   relation({0, 3, 1}, s, o, 0.7), relation({0, 2, 1}, s, o, 0.6)};
  const std::vector<int> ks = {1, 5};
  const auto p = relation_tagging_precision(std::vector<VideoRelations>{v}, ks);
  CHECK(p[0].second == 1.0);
  CHECK(p[1].second == doctest::Approx(0.4).epsilon(1e-15));

  v.predictions = {relation({0, 4, 1}, s, o, 0.9)};
  const auto none = relation_tagging_precision(std::vector<VideoRelations>{v}, ks);
  CHECK(none[0].second == 0.0);
}
