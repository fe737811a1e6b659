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

#ifndef SGPU_SCAR_SIM_HPP_
#define SGPU_SCAR_SIM_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "sgpu/pu.hpp"
#include "sgpu/scene_graph.hpp"

namespace sgpu {

enum class LabelMode {
  kDeterministic,  // every context has a single true class
  kStochastic,     // P(y | x) is a proper mixture
};

const char* to_string(LabelMode m);
LabelMode label_mode_from_string(const std::string& s);

// Synthetic positive-unlabeled generator. Contexts x are a finite set; each
// carries a true posterior P(y | x) over 0..K (0 = no relation). A positive
// of class r is annotated with probability label_frequency[r - 1],
// independently of x.
struct SimConfig {
  int num_predicates = 10;
  std::vector<double> class_prior;      // K + 1 entries, [0] = background
  std::vector<double> label_frequency;  // c*, K entries in (0, 1]
  int num_contexts = 100;
  LabelMode label_mode = LabelMode::kDeterministic;
  std::uint64_t num_examples = 10000;
  std::uint64_t seed = 0;

  // Scene rendering.
  int num_object_classes = 8;
  int min_objects = 2;
  int max_objects = 4;
  int train_images = 200;
  int test_images = 100;
  int epochs = 2;
  int images_per_batch = 8;
  double image_width = 640.0;
  double image_height = 480.0;

  // Throws DataError naming the first inconsistent field.
  void check() const;

  // Head-to-tail profile: geometric class prior and label frequencies falling
  // from 0.9 to 0.05 with frequency rank. Illustrative only.
  static SimConfig illustrative(int num_predicates, std::uint64_t seed = 0);
};

struct SimExample {
  int context = 0;
  int true_class = 0;      // y
  int observed_label = 0;  // s: y when annotated, else 0
};

// The generative model behind a SimConfig: context posteriors and sampling.
class ScarModel {
 public:
  explicit ScarModel(SimConfig config);

  const SimConfig& config() const { return config_; }
  int num_contexts() const { return config_.num_contexts; }
  int num_predicates() const { return config_.num_predicates; }

  // P(y = . | x), K + 1 entries.
  const std::vector<double>& true_posterior(int x) const;
  // P(s = r | x) = c*_r P(y = r | x); P(s = 0 | x) takes the remainder.
  std::vector<double> biased_posterior(int x) const;

  // Draw (x, y) then s for example `index` of random stream `stream`.
  SimExample sample(std::uint64_t stream, std::uint64_t index) const;

 private:
  SimConfig config_;
  std::vector<std::vector<double>> posterior_;
  // Deterministic mode: contexts owned by each class.
  std::vector<std::vector<int>> class_contexts_;
};

struct SyntheticCorpus {
  SimConfig config;
  std::vector<SimExample> examples;
};

// num_examples SCAR draws; bit-identical for equal configs.
SyntheticCorpus simulate(const SimConfig& config, int threads = 1);

std::vector<double> oracle_true_posterior(int x, const ScarModel& model);
std::vector<double> oracle_biased_posterior(int x, const ScarModel& model);

// Count-based estimate of P(s | x) from a corpus: the biased classifier one
// would fit by treating unlabelled examples as negatives.
class EmpiricalBiasedModel {
 public:
  explicit EmpiricalBiasedModel(const SyntheticCorpus& corpus);
  // K + 1 entries; uniform for unseen contexts.
  std::vector<double> posterior(int x) const;
  double prob(int x, int label) const;

 private:
  int k_;
  std::vector<std::vector<std::uint64_t>> counts_;
  std::vector<std::uint64_t> totals_;
};

enum class PosteriorSource { kOracle, kEmpirical };

// Annotated examples (s != 0) as valid examples, each carrying the biased
// probability of its label under the chosen model. pair_index is the
// example index.
std::vector<ValidExample> labeled_examples(const SyntheticCorpus& corpus,
                                           const ScarModel& model,
                                           PosteriorSource source);

struct RenderedScene {
  SceneGraph annotated;  // positive-unlabeled labels
  SceneGraph full;       // every true relation
  ImagePredictions predictions;  // oracle biased posteriors per ordered pair
  ImagePredictions bayes;        // oracle true posteriors per ordered pair
};

struct SceneCorpus {
  std::vector<RenderedScene> train;
  std::vector<RenderedScene> test;
  // Training-trace replay: training predictions in epoch order with batch ids.
  std::vector<ImagePredictions> trace;
  PredicateVocabulary vocab;  // train_frequency from annotated training labels
};

// Images with random boxes (pairwise IoU < 0.5), one context per ordered
// object pair, annotations dropped per c*. Deterministic under the seed.
SceneCorpus render_scene_corpus(const SimConfig& config, int threads = 1);

}  // namespace sgpu

#endif  // SGPU_SCAR_SIM_HPP_
