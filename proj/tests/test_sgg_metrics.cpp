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

#include <set>

#include "doctest.h"
#include "sgpu/error.hpp"
#include "sgpu/oracle.hpp"
#include "sgpu/random.hpp"
#include "sgpu/sgg_metrics.hpp"
#include "support.hpp"

using namespace sgpu;
using sgpu::testing::object;
using sgpu::testing::pair;

namespace {

SceneGraph three_objects() {
  SceneGraph g;
  g.image_id = "img";
  g.width = 100;
  g.height = 100;
  g.objects = {object(0, 0, 10, 10, 1), object(20, 20, 30, 30, 2), object(40, 40, 50, 50, 3)};
  return g;
}

RankedTriplet triplet(const SceneGraph& g, int s, int p, int o, double score) {
  return {0, g.objects[s], p, g.objects[o], score};
}

}  // namespace

TEST_CASE("graph constraint keeps one candidate per pair") {
  const auto g = three_objects();
  const std::vector<PairPrediction> pairs = {pair(g.objects[0], g.objects[1], {0.2, 0.5, 0.3})};
  CHECK(rank_predictions(pairs, EvalMode::kPredCls, true).size() == 1);
  CHECK(rank_predictions(pairs, EvalMode::kPredCls, true)[0].pred == 2);
  CHECK(rank_predictions(pairs, EvalMode::kPredCls, false).size() == 3);
}

TEST_CASE("ranking across two pairs") {
  const auto g = three_objects();
  const std::vector<PairPrediction> pairs = {pair(g.objects[0], g.objects[1], {0.6, 0.4}),
                                             pair(g.objects[1], g.objects[2], {0.9, 0.1})};
  const auto r = rank_predictions(pairs, EvalMode::kPredCls, true);
  REQUIRE(r.size() == 2);
  CHECK(r[0].pair_index == 1);
  CHECK(r[0].pred == 1);
  CHECK(r[0].score == 0.9);
  CHECK(r[1].pair_index == 0);
  CHECK(r[1].score == 0.6);
}

TEST_CASE("ties are broken by pair order then predicate index") {
  const auto g = three_objects();
  const std::vector<PairPrediction> pairs = {pair(g.objects[0], g.objects[1], {0.25, 0.25, 0.5}),
                                             pair(g.objects[1], g.objects[2], {0.5, 0.25, 0.25})};
  const auto r = rank_predictions(pairs, EvalMode::kPredCls, false);
  REQUIRE(r.size() == 6);
  CHECK(r[0].pair_index == 0);
  CHECK(r[0].pred == 3);
  CHECK(r[1].pair_index == 1);
  CHECK(r[1].pred == 1);
  CHECK(r[2].pair_index == 0);
  CHECK(r[2].pred == 1);
  CHECK(r[3].pred == 2);
  const auto gc = rank_predictions(std::vector<PairPrediction>{pair(g.objects[0], g.objects[1],
                                                                    {0.4, 0.4, 0.2})},
                                   EvalMode::kPredCls, true);
  CHECK(gc[0].pred == 1);
}

TEST_CASE("object scores enter the ranking score outside PredCls") {
  const std::vector<PairPrediction> pairs = {
      pair(object(0, 0, 1, 1, 0, 0.5), object(1, 1, 2, 2, 0, 0.5), {0.8})};
  CHECK(rank_predictions(pairs, EvalMode::kPredCls, true)[0].score == 0.8);
  CHECK(rank_predictions(pairs, EvalMode::kSGCls, true)[0].score == 0.2);
  CHECK(rank_predictions(pairs, EvalMode::kSGDet, true)[0].score == 0.2);
}

TEST_CASE("match_ranked toy fixture") {
  auto g = three_objects();
  g.relations = {{0, 1, 1}, {0, 2, 2}};
  const std::vector<RankedTriplet> ranked = {triplet(g, 0, 1, 1, 0.9), triplet(g, 0, 3, 2, 0.8),
                                             triplet(g, 0, 2, 2, 0.7)};
  CHECK(match_ranked(ranked, g, 2, EvalMode::kPredCls).size() == 1);
  CHECK(match_ranked(ranked, g, 3, EvalMode::kPredCls).size() == 2);
  CHECK(match_ranked(ranked, g, 100, EvalMode::kPredCls).size() == 2);
  CHECK_THROWS_AS(match_ranked(ranked, g, 0, EvalMode::kPredCls), UsageError);
}

TEST_CASE("pair carrying two ground-truth predicates") {
  auto g = three_objects();
  g.relations = {{0, 1, 1}, {0, 2, 1}};
  const std::vector<PairPrediction> pairs = {pair(g.objects[0], g.objects[1], {0.5, 0.4, 0.1})};
  const auto on = rank_predictions(pairs, EvalMode::kPredCls, true);
  const auto off = rank_predictions(pairs, EvalMode::kPredCls, false);
  CHECK(match_ranked(on, g, 2, EvalMode::kPredCls).size() == 1);
  CHECK(match_ranked(off, g, 2, EvalMode::kPredCls).size() == 2);
}

TEST_CASE("PredCls needs exact boxes, SGDet accepts IoU 0.5") {
  auto g = three_objects();
  g.relations = {{0, 1, 1}};
  const std::vector<RankedTriplet> shifted = {
      {0, object(0, 0, 10, 5, 1), 1, g.objects[1], 0.9}};
  CHECK(match_ranked(shifted, g, 1, EvalMode::kPredCls).empty());
  CHECK(match_ranked(shifted, g, 1, EvalMode::kSGDet).size() == 1);
  const std::vector<RankedTriplet> small = {{0, object(0, 0, 10, 4.9, 1), 1, g.objects[1], 0.9}};
  CHECK(match_ranked(small, g, 1, EvalMode::kSGDet).empty());
}

TEST_CASE("dataset recall and mean recall") {
  auto g1 = three_objects();
  g1.relations = {{0, 1, 1}, {0, 2, 2}};
  auto g2 = three_objects();
  g2.image_id = "img2";
  g2.relations = {{1, 2, 2}};
  ImagePredictions p1{"img", std::nullopt,
                      {pair(g1.objects[0], g1.objects[1], {0.9, 0.1}),
                       pair(g1.objects[0], g1.objects[2], {0.1, 0.8})}};
  ImagePredictions p2{"img2", std::nullopt, {pair(g2.objects[1], g2.objects[2], {0.9, 0.1})}};
  const std::vector<SggSample> perfect = {{g1, p1}};
  CHECK(recall_at_k(perfect, 20, EvalMode::kPredCls, true) == 1.0);
  const std::vector<SggSample> ds = {{g1, p1}, {g2, p2}};
  CHECK(recall_at_k(ds, 20, EvalMode::kPredCls, true) == 0.5);
  const auto mr = mean_recall_at_k(ds, 20, 2, EvalMode::kPredCls, true);
  CHECK(*mr.per_class[0] == 1.0);
  CHECK(*mr.per_class[1] == 0.5);
  CHECK(mr.value == 0.75);

  const std::vector<SggSample> empty_preds = {{g1, {"img", std::nullopt, {}}}};
  CHECK(recall_at_k(empty_preds, 20, EvalMode::kPredCls, true) == 0.0);
  const std::vector<SggSample> no_gt = {{three_objects(), {"img", std::nullopt, {}}}};
  CHECK_THROWS_AS(recall_at_k(no_gt, 20, EvalMode::kPredCls, true), DataError);
}

TEST_CASE("mean recall excludes classes without ground truth") {
  auto g = three_objects();
  g.relations = {{0, 1, 1}, {1, 3, 2}};
  ImagePredictions p{"img", std::nullopt, {pair(g.objects[0], g.objects[1], {0.9, 0.05, 0.05})}};
  const std::vector<SggSample> ds = {{g, p}};
  const auto mr = mean_recall_at_k(ds, 20, 3, EvalMode::kPredCls, true);
  CHECK(mr.value == 0.5);
  CHECK_FALSE(mr.per_class[1].has_value());
}

TEST_CASE("bucket sizes and assignment") {
  const auto s50 = bucket_sizes(50);
  CHECK(s50.head == 15);
  CHECK(s50.middle == 20);
  CHECK(s50.tail == 15);
  const auto s10 = bucket_sizes(10);
  CHECK(s10.head == 3);
  CHECK(s10.middle == 4);
  CHECK(s10.tail == 3);

  std::vector<std::uint64_t> freq(50);
  for (int r = 0; r < 50; ++r) freq[r] = static_cast<std::uint64_t>(1000 - r);
  const auto vocab = PredicateVocabulary::numbered(50, freq);
  const auto b = assign_buckets(vocab);
  CHECK(b[0] == Bucket::kHead);
  CHECK(b[14] == Bucket::kHead);
  CHECK(b[15] == Bucket::kMiddle);
  CHECK(b[34] == Bucket::kMiddle);
  CHECK(b[35] == Bucket::kTail);
  CHECK(b[49] == Bucket::kTail);

  const auto tiny = PredicateVocabulary::numbered(2, {1, 1});
  CHECK_THROWS_AS(assign_buckets(tiny), DataError);
}

TEST_CASE("bucket ties break by class index") {
  const auto vocab = PredicateVocabulary::numbered(4, {5, 9, 5, 1});
  const auto ranks = frequency_ranks(vocab);
  CHECK(ranks == std::vector<int>{2, 1, 3, 4});
}

TEST_CASE("uniform per-class recall gives equal buckets") {
  const auto vocab = PredicateVocabulary::numbered(10, {9, 8, 7, 6, 5, 4, 3, 2, 1, 0});
  const std::vector<std::optional<double>> v(10, 0.37);
  const auto b = head_middle_tail(vocab, v);
  CHECK(*b.head == doctest::Approx(0.37).epsilon(1e-15));
  CHECK(*b.middle == doctest::Approx(0.37).epsilon(1e-15));
  CHECK(*b.tail == doctest::Approx(0.37).epsilon(1e-15));
}

TEST_CASE("recall is non-decreasing in K and graph constraint leaves distinct pairs") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto inst = oracle::random_tiny_sgg(seed);
    const int k = inst.vocab.size();
    for (bool gc : {true, false}) {
      double prev_r = -1, prev_m = -1;
      for (int kk = 1; kk <= 30; ++kk) {
        const double r = recall_at_k(inst.images, kk, inst.mode, gc);
        const double m = mean_recall_at_k(inst.images, kk, k, inst.mode, gc).value;
        CHECK(r >= prev_r);
        CHECK(m >= prev_m);
        CHECK(r <= 1.0);
        prev_r = r;
        prev_m = m;
      }
    }
    for (const auto& img : inst.images) {
      const auto r = rank_predictions(img.predictions.pairs, inst.mode, true);
      std::set<std::size_t> seen;
      for (const auto& t : r) CHECK(seen.insert(t.pair_index).second);
    }
  }
}

TEST_CASE("evaluator agrees with the direct dataset functions") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto inst = oracle::random_tiny_sgg(seed);
    const int k = inst.vocab.size();
    SggEvaluator ev(k, inst.mode, {1, 3, 20}, GraphConstraint::kBoth);
    bool any_gt = false;
    for (const auto& s : inst.images) {
      ev.add(ev.evaluate(s.gt, s.predictions));
      any_gt = any_gt || !s.gt.relations.empty();
    }
    if (!any_gt) {
      CHECK_THROWS_AS(ev.report(inst.vocab), DataError);
      continue;
    }
    const auto rep = ev.report(inst.vocab);
    for (std::size_t i = 0; i < 3; ++i) {
      const int kk = rep.ks[i];
      CHECK(rep.constrained[i].recall == recall_at_k(inst.images, kk, inst.mode, true));
      CHECK(rep.unconstrained[i].recall == recall_at_k(inst.images, kk, inst.mode, false));
      CHECK(rep.constrained[i].mean_recall ==
            mean_recall_at_k(inst.images, kk, k, inst.mode, true).value);
    }
  }
}
