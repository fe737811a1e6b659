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
#include <numeric>

#include "doctest.h"
#include "sgpu/error.hpp"
#include "sgpu/io.hpp"
#include "sgpu/pu.hpp"
#include "sgpu/scar_sim.hpp"

using namespace sgpu;

namespace {

SimConfig small_config(int k, std::uint64_t seed) {
  auto c = SimConfig::illustrative(k, seed);
  c.num_examples = 20000;
  c.train_images = 20;
  c.test_images = 10;
  return c;
}

LabelFrequencyEstimate exact(const std::vector<double>& c) {
  LabelFrequencyEstimate e;
  for (double v : c) e.c.emplace_back(v);
  e.valid_counts.assign(c.size(), 1);
  return e;
}

}  // namespace

TEST_CASE("labels are either the true class or background") {
  for (auto mode : {LabelMode::kDeterministic, LabelMode::kStochastic}) {
    auto c = small_config(6, 1);
    c.label_mode = mode;
    const auto corpus = simulate(c);
    CHECK(corpus.examples.size() == c.num_examples);
    for (const auto& e : corpus.examples) {
      CHECK((e.observed_label == 0 || e.observed_label == e.true_class));
    }
  }
}

TEST_CASE("label frequency one labels every positive") {
  auto c = small_config(4, 2);
  c.label_frequency.assign(4, 1.0);
  for (const auto& e : simulate(c).examples) CHECK(e.observed_label == e.true_class);
}

TEST_CASE("labeled fraction concentrates around the propensity") {
  auto c = SimConfig::illustrative(2, 3);
  c.class_prior = {0.0, 0.5, 0.5};
  c.label_frequency = {0.25, 0.9};
  c.num_examples = 200000;
  const auto corpus = simulate(c);
  std::uint64_t positives = 0, labeled = 0;
  for (const auto& e : corpus.examples) {
    if (e.true_class != 1) continue;
    ++positives;
    labeled += e.observed_label == 1;
  }
  CHECK(positives >= 98500);
  CHECK(positives <= 101500);
  const double frac = static_cast<double>(labeled) / static_cast<double>(positives);
  CHECK(frac >= 0.24);
  CHECK(frac <= 0.26);
  CHECK(std::abs(frac - 0.25) <= 0.01);
}

TEST_CASE("generation is reproducible and independent of thread count") {
  const auto c = small_config(5, 9);
  const auto a = simulate(c, 1), b = simulate(c, 1), d = simulate(c, 4);
  REQUIRE(a.examples.size() == b.examples.size());
  for (size_t i = 0; i < a.examples.size(); ++i) {
    CHECK(a.examples[i].context == b.examples[i].context);
    CHECK(a.examples[i].true_class == d.examples[i].true_class);
    CHECK(a.examples[i].observed_label == d.examples[i].observed_label);
  }
  auto other = c;
  other.seed = 10;
  const auto e = simulate(other, 1);
  bool differs = false;
  for (size_t i = 0; i < a.examples.size() && !differs; ++i) {
    differs = a.examples[i].context != e.examples[i].context;
  }
  CHECK(differs);
}

TEST_CASE("biased posterior is the propensity-weighted true posterior") {
  for (auto mode : {LabelMode::kDeterministic, LabelMode::kStochastic}) {
    auto c = small_config(5, 4);
    c.label_mode = mode;
    const ScarModel m(c);
    for (int x = 0; x < m.num_contexts(); ++x) {
      const auto t = oracle_true_posterior(x, m), b = oracle_biased_posterior(x, m);
      double fg = 0;
      for (int r = 1; r <= 5; ++r) {
        CHECK(b[r] == t[r] * c.label_frequency[r - 1]);
        fg += b[r];
      }
      CHECK(std::abs(b[0] - (1.0 - fg)) <= 1e-15);
      CHECK(std::abs(std::accumulate(t.begin(), t.end(), 0.0) - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("unit propensities leave the posterior unchanged") {
  auto c = small_config(3, 5);
  c.label_mode = LabelMode::kStochastic;
  c.label_frequency.assign(3, 1.0);
  const ScarModel m(c);
  for (int x = 0; x < m.num_contexts(); ++x) {
    const auto t = oracle_true_posterior(x, m), b = oracle_biased_posterior(x, m);
    for (size_t r = 1; r < t.size(); ++r) CHECK(b[r] == t[r]);
  }
}

TEST_CASE("deterministic contexts are one-hot and their biased value is the propensity") {
  const auto c = small_config(6, 6);
  const ScarModel m(c);
  for (int x = 0; x < m.num_contexts(); ++x) {
    const auto t = oracle_true_posterior(x, m);
    int ones = 0, y = -1;
    for (size_t r = 0; r < t.size(); ++r) {
      if (t[r] == 1.0) {
        ++ones;
        y = static_cast<int>(r);
      } else {
        CHECK(t[r] == 0.0);
      }
    }
    REQUIRE(ones == 1);
    if (y > 0) CHECK(oracle_biased_posterior(x, m)[y] == c.label_frequency[y - 1]);
  }
}

TEST_CASE("recovery from exact biased posteriors reproduces the true posterior") {
  for (auto mode : {LabelMode::kDeterministic, LabelMode::kStochastic}) {
    auto c = small_config(8, 7);
    c.label_mode = mode;
    const ScarModel m(c);
    for (int x = 0; x < m.num_contexts(); ++x) {
      const auto t = oracle_true_posterior(x, m), b = oracle_biased_posterior(x, m);
      const double fg = std::accumulate(t.begin() + 1, t.end(), 0.0);
      if (fg == 0.0) continue;
      PairPrediction p;
      p.pred_probs.assign(b.begin() + 1, b.end());
      p.bg_prob = b[0];
      const auto q = recover_unbiased(p, exact(c.label_frequency), true);
      for (int r = 1; r <= 8; ++r) CHECK(std::abs(q.pred_probs[r - 1] - t[r] / fg) <= 1e-9);
    }
  }
}

TEST_CASE("stochastic labels bias Train-Est downward") {
  auto c = SimConfig::illustrative(4, 8);
  c.label_mode = LabelMode::kStochastic;
  c.num_examples = 50000;
  const auto corpus = simulate(c);
  const ScarModel m(c);
  const auto est = train_est(labeled_examples(corpus, m, PosteriorSource::kOracle), 4);
  for (int r = 0; r < 4; ++r) {
    REQUIRE(est.c[r].has_value());
    CHECK(*est.c[r] < c.label_frequency[r]);
  }
}

TEST_CASE("rendered corpus invariants") {
  auto c = small_config(5, 11);
  const auto a = render_scene_corpus(c, 1);
  const auto b = render_scene_corpus(c, 3);
  REQUIRE(a.train.size() == 20);
  REQUIRE(a.test.size() == 10);
  CHECK(a.trace.size() == static_cast<size_t>(c.epochs * c.train_images));
  for (size_t i = 0; i < a.train.size(); ++i) {
    CHECK(io::scene_graph_to_line(a.train[i].full) == io::scene_graph_to_line(b.train[i].full));
    CHECK(io::predictions_to_line(a.train[i].predictions) ==
          io::predictions_to_line(b.train[i].predictions));
  }
  for (const auto& s : a.train) {
    CHECK(validate_scene_graph(s.full).empty());
    CHECK(s.annotated.relations.size() <= s.full.relations.size());
    for (size_t i = 0; i < s.full.objects.size(); ++i) {
      for (size_t j = i + 1; j < s.full.objects.size(); ++j) {
        CHECK(iou(s.full.objects[i].box, s.full.objects[j].box) < 0.5);
      }
    }
    const auto n = s.full.objects.size();
    CHECK(s.predictions.pairs.size() == n * (n - 1));
    for (const auto& p : s.predictions.pairs) CHECK_NOTHROW(check_pair(p));
  }
  for (size_t i = 1; i < a.trace.size(); ++i) CHECK(*a.trace[i].batch_id >= *a.trace[i - 1].batch_id);
}

TEST_CASE("unit propensities render identical graphs; background-only renders none") {
  auto c = small_config(3, 12);
  c.label_frequency.assign(3, 1.0);
  for (const auto& s : render_scene_corpus(c).train) {
    CHECK(io::scene_graph_to_line(s.annotated) == io::scene_graph_to_line(s.full));
  }
  auto none = small_config(3, 13);
  none.class_prior = {1.0, 0.0, 0.0, 0.0};
  for (const auto& s : render_scene_corpus(none).train) CHECK(s.full.relations.empty());
}

TEST_CASE("invalid configs are rejected") {
  auto c = small_config(3, 1);
  c.class_prior = {0.5, 0.5, 0.5, 0.5};
  CHECK_THROWS_AS(c.check(), DataError);
  c = small_config(3, 1);
  c.label_frequency[0] = 0.0;
  CHECK_THROWS_AS(c.check(), DataError);
  c = small_config(3, 1);
  c.class_prior.pop_back();
  CHECK_THROWS_AS(simulate(c), DataError);
}
