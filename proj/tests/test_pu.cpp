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

#include <cmath>

#include "doctest.h"
#include "sgpu/error.hpp"
#include "sgpu/pu.hpp"
#include "sgpu/random.hpp"
#include "sgpu/scar_sim.hpp"
#include "support.hpp"

using namespace sgpu;
using sgpu::testing::object;
using sgpu::testing::pair;

namespace {

SceneGraph one_relation_graph() {
  SceneGraph g;
  g.image_id = "img";
  g.width = 200;
  g.height = 200;
  g.objects = {object(0, 0, 100, 100, 1), object(100, 100, 200, 200, 2)};
  g.relations = {{0, 2, 1}};
  return g;
}

ValidExample example(int label, double prob) {
  return {"img", 0, label, prob};
}

LabelFrequencyEstimate estimate(std::vector<std::optional<double>> c) {
  LabelFrequencyEstimate e;
  e.valid_counts.assign(c.size(), 1);
  e.c = std::move(c);
  return e;
}

}  // namespace

TEST_CASE("identical predicted pair gives one valid example") {
  const auto g = one_relation_graph();
  ImagePredictions p{"img", std::nullopt,
                     {pair(g.objects[0], g.objects[1], {0.1, 0.7, 0.1}, 0.1)}};
  const auto v = match_valid_pairs(p, g);
  REQUIRE(v.size() == 1);
  CHECK(v[0].label == 2);
  CHECK(v[0].label_prob == 0.7);
}

TEST_CASE("subject IoU 0.4 gives no valid example") {
  const auto g = one_relation_graph();
  // 100x100 GT against a box of width 40 inside it: IoU = 4000 / 10000.
  ImagePredictions p{"img", std::nullopt,
                     {pair(object(0, 0, 40, 100, 1), g.objects[1], {0.1, 0.7, 0.1}, 0.1)}};
  CHECK(iou(p.pairs[0].subj.box, g.objects[0].box) == doctest::Approx(0.4));
  CHECK(match_valid_pairs(p, g).empty());
}

TEST_CASE("IoU exactly 0.5 is valid, label mismatch is not") {
  const auto g = one_relation_graph();
  ImagePredictions p{"img", std::nullopt,
                     {pair(object(0, 0, 50, 100, 1), g.objects[1], {0.1, 0.7, 0.1}, 0.1),
                      pair(g.objects[0], object(100, 100, 200, 200, 3), {0.1, 0.7, 0.1}, 0.1)}};
  CHECK(iou(p.pairs[0].subj.box, g.objects[0].box) == 0.5);
  const auto v = match_valid_pairs(p, g);
  REQUIRE(v.size() == 1);
  CHECK(v[0].pair_index == 0);
}

TEST_CASE("one ground-truth pair matched by two proposals gives two examples") {
  const auto g = one_relation_graph();
  ImagePredictions p{"img", std::nullopt,
                     {pair(g.objects[0], g.objects[1], {0.1, 0.7, 0.1}, 0.1),
                      pair(object(0, 0, 90, 100, 1), g.objects[1], {0.2, 0.5, 0.1}, 0.2)}};
  const auto v = match_valid_pairs(p, g);
  REQUIRE(v.size() == 2);
  CHECK(v[1].label_prob == 0.5);
}

TEST_CASE("image id mismatch is a usage error") {
  const auto g = one_relation_graph();
  ImagePredictions p{"other", std::nullopt, {}};
  CHECK_THROWS_AS(match_valid_pairs(p, g), UsageError);
}

TEST_CASE("train_est averages per class and leaves empty classes unset") {
  const std::vector<ValidExample> ex = {example(1, 0.2), example(1, 0.4), example(3, 0.9)};
  const auto est = train_est(ex, 3);
  CHECK(*est.c[0] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK_FALSE(est.c[1].has_value());
  CHECK(*est.c[2] == 0.9);
  CHECK(est.valid_counts == std::vector<std::uint64_t>{2, 0, 1});
  CHECK(est.estimator == Estimator::kTrainEst);
  CHECK_FALSE(est.complete());
}

TEST_CASE("fill_missing uses the median of the set entries") {
  auto e = fill_missing(estimate({0.2, 0.4, std::nullopt}));
  CHECK(*e.c[2] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(*e.c[0] == 0.2);
  e = fill_missing(estimate({0.5, std::nullopt, std::nullopt}));
  CHECK(*e.c[1] == 0.5);
  CHECK(*e.c[2] == 0.5);
  e = fill_missing(estimate({0.1, 0.7, 0.2, std::nullopt}));
  CHECK(*e.c[3] == 0.2);
  const auto full = estimate({0.1, 0.2});
  CHECK(fill_missing(full).c == full.c);
  CHECK_THROWS_AS(fill_missing(estimate({std::nullopt, std::nullopt})), DataError);
}

TEST_CASE("DLFE seeding, update and untouched classes") {
  DlfeState s(2, 0.1);
  const std::vector<ValidExample> b1 = {example(1, 0.3), example(1, 0.5)};
  s.update(b1);
  CHECK(*s.running()[0] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK_FALSE(s.running()[1].has_value());
  const std::vector<ValidExample> b2 = {example(1, 0.6)};
  s = dlfe_update(s, b2);
  CHECK(*s.running()[0] == doctest::Approx(0.42).epsilon(1e-15));
  const std::vector<ValidExample> b3 = {example(2, 0.8)};
  s.update(b3);
  CHECK(*s.running()[0] == doctest::Approx(0.42).epsilon(1e-15));
  CHECK(*s.running()[1] == 0.8);

  const auto est = dlfe_finalize(s);
  CHECK(est.estimator == Estimator::kDlfe);
  CHECK(*est.alpha == 0.1);
  CHECK(est.valid_counts == std::vector<std::uint64_t>{3, 1});
}

TEST_CASE("DLFE errors") {
  CHECK_THROWS_AS(DlfeState(2, 0.0), UsageError);
  CHECK_THROWS_AS(DlfeState(2, 1.5), UsageError);
  DlfeState s(2, 0.1);
  CHECK_THROWS_AS(dlfe_finalize(s), DataError);
  s.update({});
  CHECK_THROWS_AS(dlfe_finalize(s), DataError);
}

TEST_CASE("DLFE contraction toward a constant batch mean") {
  CounterRng rng(5, 0, 0);
  for (double alpha : {0.05, 0.1, 0.5}) {
    for (int trial = 0; trial < 20; ++trial) {
      const double start = rng.uniform(0.01, 1.0), target = rng.uniform(0.01, 1.0);
      DlfeState s(1, alpha);
      const std::vector<ValidExample> seed = {example(1, start)};
      s.update(seed);
      for (int n = 1; n <= 60; ++n) {
        const std::vector<ValidExample> b = {example(1, target)};
        s.update(b);
        const double bound = std::pow(1 - alpha, n) * std::abs(start - target);
        CHECK(std::abs(*s.running()[0] - target) <= bound * (1 + 1e-12) + 1e-15);
      }
    }
  }
}

TEST_CASE("train_est equals DLFE with alpha 1 and one batch per class") {
  CounterRng rng(6, 0, 0);
  std::vector<ValidExample> all;
  DlfeState s(4, 1.0);
  for (int r = 1; r <= 4; ++r) {
    std::vector<ValidExample> batch;
    for (int i = 0; i < 7; ++i) batch.push_back(example(r, rng.uniform(0.01, 1.0)));
    s.update(batch);
    all.insert(all.end(), batch.begin(), batch.end());
  }
  const auto a = train_est(all, 4);
  const auto b = dlfe_finalize(s);
  for (int r = 0; r < 4; ++r) CHECK(*a.c[r] == doctest::Approx(*b.c[r]).epsilon(1e-15));
}

TEST_CASE("recover_unbiased examples") {
  const auto p = pair(object(0, 0, 1, 1, 0), object(1, 1, 2, 2, 0), {0.6, 0.4});
  auto q = recover_unbiased(p, estimate({1.0, 1.0}), false);
  CHECK(q.pred_probs == p.pred_probs);
  CHECK(q.recovered);

  q = recover_unbiased(p, estimate({0.5, 0.25}), true);
  CHECK(q.pred_probs[0] == doctest::Approx(3.0 / 7.0).epsilon(1e-15));
  CHECK(q.pred_probs[1] == doctest::Approx(4.0 / 7.0).epsilon(1e-15));

  const auto on = pair(object(0, 0, 1, 1, 0), object(1, 1, 2, 2, 0), {0.6, 0.2}, 0.2);
  q = recover_unbiased(on, estimate({0.9, 0.1}), false);
  CHECK(q.pred_probs[1] == doctest::Approx(2.0));
  CHECK(q.pred_probs[0] == doctest::Approx(2.0 / 3.0));
  CHECK(q.bg_prob == on.bg_prob);
}

TEST_CASE("recover_unbiased errors") {
  const auto p = pair(object(0, 0, 1, 1, 0), object(1, 1, 2, 2, 0), {0.6, 0.4});
  CHECK_THROWS_AS(recover_unbiased(p, estimate({0.5, std::nullopt})), DataError);
  CHECK_THROWS_AS(recover_unbiased(p, estimate({0.5, 0.0})), DataError);
  CHECK_THROWS_AS(recover_unbiased(p, estimate({0.5})), UsageError);
}

TEST_CASE("recovery keeps ranking of p/c and is scale invariant") {
  CounterRng rng(7, 0, 0);
  for (int trial = 0; trial < 500; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(8));
    std::vector<double> probs(static_cast<size_t>(k));
    std::vector<std::optional<double>> c(static_cast<size_t>(k));
    double total = 0;
    for (int r = 0; r < k; ++r) {
      probs[r] = rng.uniform(0.0, 1.0);
      total += probs[r];
      c[r] = rng.uniform(0.05, 1.0);
    }
    for (auto& v : probs) v /= total;
    const auto p = pair(object(0, 0, 1, 1, 0), object(1, 1, 2, 2, 0), probs);
    const auto q = recover_unbiased(p, estimate(c), true);
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        if (probs[a] / *c[a] > probs[b] / *c[b]) CHECK(q.pred_probs[a] > q.pred_probs[b]);
      }
    }
    const double lambda = rng.uniform(0.1, 0.99);
    auto scaled = c;
    for (auto& v : scaled) *v *= lambda;
    const auto q2 = recover_unbiased(p, estimate(scaled), true);
    for (int r = 0; r < k; ++r) CHECK(std::abs(q.pred_probs[r] - q2.pred_probs[r]) <= 1e-12);
  }
}

TEST_CASE("train_est on the simulator's deterministic stream recovers c") {
  auto config = SimConfig::illustrative(4, 21);
  config.label_frequency = {0.9, 0.6, 0.25, 0.1};
  config.class_prior = {0.0, 0.1, 0.2, 0.3, 0.4};
  config.num_examples = 400000;
  const auto corpus = simulate(config);
  const ScarModel model(config);
  const auto ex = labeled_examples(corpus, model, PosteriorSource::kEmpirical);
  const auto est = train_est(ex, 4);
  CHECK(est.valid_counts[2] >= 1000);
  for (int r = 0; r < 4; ++r) {
    CHECK(std::abs(*est.c[r] - config.label_frequency[r]) <= 0.01);
  }
  const auto exact = train_est(labeled_examples(corpus, model, PosteriorSource::kOracle), 4);
  for (int r = 0; r < 4; ++r) {
    INFO("deviation " << (*exact.c[r] - config.label_frequency[r]));
    CHECK(std::abs(*exact.c[r] - config.label_frequency[r]) <= 1e-12);
  }
}
