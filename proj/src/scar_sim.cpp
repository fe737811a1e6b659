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

#include "sgpu/scar_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "sgpu/error.hpp"
#include "sgpu/parallel.hpp"
#include "sgpu/random.hpp"

namespace sgpu {

namespace {

// Random stream ids.
constexpr std::uint64_t kContextStream = 1;
constexpr std::uint64_t kExampleStream = 2;
constexpr std::uint64_t kSceneStream = 3;
constexpr std::uint64_t kEpochStream = 4;
constexpr std::uint64_t kPairStream = 5;

std::string numbered_id(const char* prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s_%06d", prefix, i);
  return buf;
}

}  // namespace

const char* to_string(LabelMode m) {
  return m == LabelMode::kStochastic ? "stochastic" : "deterministic";
}

LabelMode label_mode_from_string(const std::string& s) {
  if (s == "deterministic") return LabelMode::kDeterministic;
  if (s == "stochastic") return LabelMode::kStochastic;
  throw UsageError("unknown label mode '" + s +
                   "' (expected deterministic|stochastic)");
}

void SimConfig::check() const {
  const int k = num_predicates;
  if (k < 1) throw DataError("sim config: num_predicates must be >= 1");
  if (static_cast<int>(class_prior.size()) != k + 1) {
    throw DataError("sim config: class_prior needs K + 1 = " + std::to_string(k + 1) +
                    " entries, got " + std::to_string(class_prior.size()));
  }
  double total = 0.0;
  for (double p : class_prior) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw DataError("sim config: class_prior entries must be non-negative");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw DataError("sim config: class_prior sums to " + std::to_string(total));
  }
  if (static_cast<int>(label_frequency.size()) != k) {
    throw DataError("sim config: label_frequency needs K = " + std::to_string(k) +
                    " entries, got " + std::to_string(label_frequency.size()));
  }
  for (double c : label_frequency) {
    if (!(c > 0.0 && c <= 1.0)) {
      throw DataError("sim config: label frequencies must lie in (0, 1]");
    }
  }
  if (num_contexts < 1) throw DataError("sim config: num_contexts must be >= 1");
  if (label_mode == LabelMode::kDeterministic) {
    const auto supported = std::count_if(class_prior.begin(), class_prior.end(),
                                         [](double p) { return p > 0.0; });
    if (num_contexts < supported) {
      throw DataError("sim config: deterministic mode needs at least one context "
                      "per class with positive prior (" +
                      std::to_string(supported) + ")");
    }
  }
  if (num_object_classes < 1) {
    throw DataError("sim config: num_object_classes must be >= 1");
  }
  if (min_objects < 1 || max_objects < min_objects) {
    throw DataError("sim config: need 1 <= min_objects <= max_objects");
  }
  if (train_images < 0 || test_images < 0 || epochs < 0) {
    throw DataError("sim config: image and epoch counts must be >= 0");
  }
  if (images_per_batch < 1) {
    throw DataError("sim config: images_per_batch must be >= 1");
  }
  if (!(image_width > 0.0 && image_height > 0.0)) {
    throw DataError("sim config: image size must be positive");
  }
}

SimConfig SimConfig::illustrative(int num_predicates, std::uint64_t seed) {
  SimConfig c;
  c.num_predicates = num_predicates;
  c.seed = seed;
  const int k = std::max(num_predicates, 1);
  std::vector<double> fg(static_cast<size_t>(k));
  for (int r = 0; r < k; ++r) fg[static_cast<size_t>(r)] = std::pow(0.8, r);
  const double fg_total = std::accumulate(fg.begin(), fg.end(), 0.0);
  c.class_prior.push_back(0.5);
  for (double w : fg) c.class_prior.push_back(0.5 * w / fg_total);
  for (int r = 0; r < k; ++r) {
    const double t = k == 1 ? 0.0 : static_cast<double>(r) / (k - 1);
    c.label_frequency.push_back(0.9 * std::pow(0.05 / 0.9, t));
  }
  c.num_contexts = std::max(100, 2 * (k + 1));
  return c;
}

ScarModel::ScarModel(SimConfig config) : config_(std::move(config)) {
  config_.check();
  const int k = config_.num_predicates;
  const int n = config_.num_contexts;
  posterior_.assign(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(k + 1), 0.0));
  if (config_.label_mode == LabelMode::kDeterministic) {
    class_contexts_.resize(static_cast<size_t>(k + 1));
    int x = 0;
    for (int y = 0; y <= k; ++y) {
      if (config_.class_prior[static_cast<size_t>(y)] > 0.0) {
        class_contexts_[static_cast<size_t>(y)].push_back(x++);
      }
    }
    for (; x < n; ++x) {
      CounterRng rng(config_.seed, kContextStream, static_cast<std::uint64_t>(x));
      const auto y = rng.categorical(config_.class_prior);
      class_contexts_[y].push_back(x);
    }
    for (int y = 0; y <= k; ++y) {
      for (int cx : class_contexts_[static_cast<size_t>(y)]) {
        posterior_[static_cast<size_t>(cx)][static_cast<size_t>(y)] = 1.0;
      }
    }
  } else {
    for (int x = 0; x < n; ++x) {
      CounterRng rng(config_.seed, kContextStream, static_cast<std::uint64_t>(x));
      auto& p = posterior_[static_cast<size_t>(x)];
      double total = 0.0;
      for (int y = 0; y <= k; ++y) {
        const double prior = config_.class_prior[static_cast<size_t>(y)];
        const double e = rng.exponential();
        p[static_cast<size_t>(y)] = prior > 0.0 ? prior * e : 0.0;
        total += p[static_cast<size_t>(y)];
      }
      for (auto& v : p) v /= total;
    }
  }
}

const std::vector<double>& ScarModel::true_posterior(int x) const {
  if (x < 0 || x >= config_.num_contexts) {
    throw UsageError("context " + std::to_string(x) + " outside the feature space");
  }
  return posterior_[static_cast<size_t>(x)];
}

std::vector<double> ScarModel::biased_posterior(int x) const {
  const auto& p = true_posterior(x);
  std::vector<double> b(p.size());
  double unlabeled = p[0];
  for (size_t r = 1; r < p.size(); ++r) {
    const double c = config_.label_frequency[r - 1];
    b[r] = c * p[r];
    unlabeled += (1.0 - c) * p[r];
  }
  b[0] = unlabeled;
  return b;
}

SimExample ScarModel::sample(std::uint64_t stream, std::uint64_t index) const {
  CounterRng rng(config_.seed, stream, index);
  SimExample e;
  if (config_.label_mode == LabelMode::kDeterministic) {
    e.true_class = static_cast<int>(rng.categorical(config_.class_prior));
    const auto& owned = class_contexts_[static_cast<size_t>(e.true_class)];
    e.context = owned[rng.below(owned.size())];
  } else {
    e.context = static_cast<int>(rng.below(static_cast<std::uint64_t>(config_.num_contexts)));
    e.true_class = static_cast<int>(rng.categorical(posterior_[static_cast<size_t>(e.context)]));
  }
  if (e.true_class != 0 &&
      rng.bernoulli(config_.label_frequency[static_cast<size_t>(e.true_class - 1)])) {
    e.observed_label = e.true_class;
  }
  return e;
}

SyntheticCorpus simulate(const SimConfig& config, int threads) {
  const ScarModel model(config);
  SyntheticCorpus corpus;
  corpus.config = config;
  corpus.examples.resize(config.num_examples);
  parallel_for(config.num_examples, threads, [&](std::size_t i) {
    corpus.examples[i] = model.sample(kExampleStream, i);
  });
  return corpus;
}

std::vector<double> oracle_true_posterior(int x, const ScarModel& model) {
  return model.true_posterior(x);
}

std::vector<double> oracle_biased_posterior(int x, const ScarModel& model) {
  return model.biased_posterior(x);
}

EmpiricalBiasedModel::EmpiricalBiasedModel(const SyntheticCorpus& corpus)
    : k_(corpus.config.num_predicates) {
  const auto n = static_cast<size_t>(corpus.config.num_contexts);
  counts_.assign(n, std::vector<std::uint64_t>(static_cast<size_t>(k_ + 1), 0));
  totals_.assign(n, 0);
  for (const auto& e : corpus.examples) {
    ++counts_[static_cast<size_t>(e.context)][static_cast<size_t>(e.observed_label)];
    ++totals_[static_cast<size_t>(e.context)];
  }
}

double EmpiricalBiasedModel::prob(int x, int label) const {
  const auto total = totals_[static_cast<size_t>(x)];
  if (total == 0) return 1.0 / (k_ + 1);
  return static_cast<double>(counts_[static_cast<size_t>(x)][static_cast<size_t>(label)]) /
         static_cast<double>(total);
}

std::vector<double> EmpiricalBiasedModel::posterior(int x) const {
  std::vector<double> p(static_cast<size_t>(k_ + 1));
  for (int s = 0; s <= k_; ++s) p[static_cast<size_t>(s)] = prob(x, s);
  return p;
}

std::vector<ValidExample> labeled_examples(const SyntheticCorpus& corpus,
                                           const ScarModel& model,
                                           PosteriorSource source) {
  std::vector<std::vector<double>> table(static_cast<size_t>(model.num_contexts()));
  if (source == PosteriorSource::kOracle) {
    for (int x = 0; x < model.num_contexts(); ++x) {
      table[static_cast<size_t>(x)] = model.biased_posterior(x);
    }
  } else {
    const EmpiricalBiasedModel fitted(corpus);
    for (int x = 0; x < model.num_contexts(); ++x) {
      table[static_cast<size_t>(x)] = fitted.posterior(x);
    }
  }
  std::vector<ValidExample> out;
  for (size_t i = 0; i < corpus.examples.size(); ++i) {
    const auto& e = corpus.examples[i];
    if (e.observed_label == 0) continue;
    out.push_back({std::string(), i, e.observed_label,
                   table[static_cast<size_t>(e.context)][static_cast<size_t>(e.observed_label)]});
  }
  return out;
}

namespace {

RenderedScene render_one(const ScarModel& model, const std::string& image_id,
                         std::uint64_t index) {
  const auto& cfg = model.config();
  CounterRng rng(cfg.seed, kSceneStream, index);
  RenderedScene scene;
  SceneGraph g;
  g.image_id = image_id;
  g.width = cfg.image_width;
  g.height = cfg.image_height;
  const int n = rng.between(cfg.min_objects, cfg.max_objects);
  for (int i = 0; i < n; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
      const double w = rng.uniform(0.1, 0.4) * cfg.image_width;
      const double h = rng.uniform(0.1, 0.4) * cfg.image_height;
      const double x0 = rng.uniform(0.0, cfg.image_width - w);
      const double y0 = rng.uniform(0.0, cfg.image_height - h);
      const BoundingBox box{x0, y0, x0 + w, y0 + h};
      placed = std::all_of(g.objects.begin(), g.objects.end(), [&](const auto& o) {
        return iou(o.box, box) < 0.5;
      });
      if (placed) {
        const int label = static_cast<int>(
            rng.below(static_cast<std::uint64_t>(cfg.num_object_classes)));
        g.objects.push_back({box, label, 1.0});
      }
    }
    if (!placed) {
      throw DataError("scene renderer could not place " + std::to_string(n) +
                      " boxes with IoU < 0.5 in image " + image_id);
    }
  }
  scene.annotated = g;
  scene.full = g;
  scene.predictions.image_id = image_id;
  scene.bayes.image_id = image_id;
  std::uint64_t pair_no = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const SimExample e = model.sample(kPairStream, (index << 32) | pair_no++);
      if (e.true_class != 0) scene.full.relations.push_back({i, e.true_class, j});
      if (e.observed_label != 0) {
        scene.annotated.relations.push_back({i, e.observed_label, j});
      }
      const auto biased = model.biased_posterior(e.context);
      const auto& truth = model.true_posterior(e.context);
      PairPrediction p;
      p.subj = g.objects[static_cast<size_t>(i)];
      p.obj = g.objects[static_cast<size_t>(j)];
      p.subj_index = i;
      p.obj_index = j;
      p.pred_probs.assign(biased.begin() + 1, biased.end());
      p.bg_prob = biased[0];
      scene.predictions.pairs.push_back(p);
      p.pred_probs.assign(truth.begin() + 1, truth.end());
      p.bg_prob = truth[0];
      scene.bayes.pairs.push_back(std::move(p));
    }
  }
  return scene;
}

}  // namespace

SceneCorpus render_scene_corpus(const SimConfig& config, int threads) {
  const ScarModel model(config);
  SceneCorpus out;
  const auto train_n = static_cast<size_t>(config.train_images);
  const auto total = train_n + static_cast<size_t>(config.test_images);
  auto scenes = parallel_map(total, threads, [&](std::size_t i) {
    const std::string id = i < train_n
                               ? numbered_id("train", static_cast<int>(i))
                               : numbered_id("test", static_cast<int>(i - train_n));
    return render_one(model, id, i);
  });
  out.train.assign(std::make_move_iterator(scenes.begin()),
                   std::make_move_iterator(scenes.begin() + static_cast<std::ptrdiff_t>(train_n)));
  out.test.assign(std::make_move_iterator(scenes.begin() + static_cast<std::ptrdiff_t>(train_n)),
                  std::make_move_iterator(scenes.end()));

  std::vector<std::uint64_t> freq(static_cast<size_t>(config.num_predicates), 0);
  for (const auto& s : out.train) {
    for (const auto& r : s.annotated.relations) ++freq[static_cast<size_t>(r.pred - 1)];
  }
  out.vocab = PredicateVocabulary::numbered(config.num_predicates, freq);

  std::int64_t batch = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<size_t> order(train_n);
    std::iota(order.begin(), order.end(), 0);
    CounterRng rng(config.seed, kEpochStream, static_cast<std::uint64_t>(epoch));
    for (size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.below(i)]);
    }
    for (size_t pos = 0; pos < order.size(); ++pos) {
      if (pos > 0 && pos % static_cast<size_t>(config.images_per_batch) == 0) ++batch;
      ImagePredictions rec = out.train[order[pos]].predictions;
      rec.batch_id = batch;
      out.trace.push_back(std::move(rec));
    }
    ++batch;
  }
  return out;
}

}  // namespace sgpu
