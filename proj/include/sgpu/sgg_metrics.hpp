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

#ifndef SGPU_SGG_METRICS_HPP_
#define SGPU_SGG_METRICS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sgpu/pu.hpp"
#include "sgpu/scene_graph.hpp"

namespace sgpu {

enum class EvalMode { kPredCls, kSGCls, kSGDet };

const char* to_string(EvalMode m);
EvalMode eval_mode_from_string(const std::string& s);

// One scored (subject, predicate, object) candidate. pair_index refers to the
// pair it was expanded from.
struct RankedTriplet {
  std::size_t pair_index = 0;
  ObjectInstance subj;
  int pred = 1;
  ObjectInstance obj;
  double score = 0.0;
};

// Expands pairs into candidates scored subj.score * obj.score * p_r (object
// scores count as 1 in PredCls) and sorts them by descending score. Ties keep
// pair order, then ascending predicate. With the graph constraint each pair
// contributes only its highest-scoring predicate (lowest index on ties).
std::vector<RankedTriplet> rank_predictions(std::span<const PairPrediction> pairs,
                                            EvalMode mode, bool graph_constraint);

// Rank (0-based) of the candidate that hits each ground-truth relation when
// the first `limit` candidates are scanned greedily, or std::nullopt.
// A candidate hits a relation when predicate, subject label and object label
// agree and both boxes match (exact equality in PredCls/SGCls, IoU >= 0.5 in
// SGDet). Each relation is hit at most once; a candidate takes the
// lowest-index unmatched relation it matches.
std::vector<std::optional<std::size_t>> hit_ranks(
    std::span<const RankedTriplet> candidates, const SceneGraph& gt,
    EvalMode mode, std::size_t limit);

// Indices of the ground-truth relations hit within the top k candidates.
std::vector<int> match_ranked(std::span<const RankedTriplet> candidates,
                              const SceneGraph& gt, int k, EvalMode mode);

struct SggSample {
  SceneGraph gt;
  ImagePredictions predictions;
};

// Image-wise recall averaged over images holding at least one relation.
// Throws DataError when no such image exists.
double recall_at_k(std::span<const SggSample> dataset, int k, EvalMode mode,
                   bool graph_constraint);

struct MeanRecall {
  double value = 0.0;
  // Recall of class r at [r - 1]; std::nullopt for classes without ground
  // truth.
  std::vector<std::optional<double>> per_class;
};

MeanRecall mean_recall_at_k(std::span<const SggSample> dataset, int k,
                            int num_predicates, EvalMode mode,
                            bool graph_constraint);

enum class Bucket { kHead, kMiddle, kTail };

const char* to_string(Bucket b);

struct BucketSizes {
  int head = 0;
  int middle = 0;
  int tail = 0;
};

// 15/20/15 of 50 scaled to K: head = tail = round(0.3 K).
BucketSizes bucket_sizes(int k);

// Bucket of class r at [r - 1], by descending training frequency (ties by
// class index). Throws DataError for K < 3.
std::vector<Bucket> assign_buckets(const PredicateVocabulary& vocab);

// 1-based rank of each class by training frequency.
std::vector<int> frequency_ranks(const PredicateVocabulary& vocab);

struct BucketRecall {
  std::optional<double> head;
  std::optional<double> middle;
  std::optional<double> tail;
};

// Mean per-class recall over the classes of each bucket that have a value.
BucketRecall head_middle_tail(const PredicateVocabulary& vocab,
                              std::span<const std::optional<double>> per_class);

enum class GraphConstraint { kOn, kOff, kBoth };

GraphConstraint graph_constraint_from_string(const std::string& s);

struct RecallAtK {
  int k = 0;
  double recall = 0.0;
  double mean_recall = 0.0;
  std::vector<std::optional<double>> per_class;
  BucketRecall buckets;
};

struct RecallReport {
  EvalMode mode = EvalMode::kPredCls;
  std::vector<int> ks;
  std::size_t images = 0;           // images with >= 1 relation
  std::vector<std::uint64_t> gt_per_class;
  std::vector<RecallAtK> constrained;     // empty unless requested
  std::vector<RecallAtK> unconstrained;   // "ng" variants
};

// Per-image evaluation outcome; produced independently per image and merged
// in input order.
struct ImageRecall {
  std::size_t gt_count = 0;
  std::vector<int> gt_classes;
  std::vector<std::optional<std::size_t>> constrained_ranks;
  std::vector<std::optional<std::size_t>> unconstrained_ranks;
};

class SggEvaluator {
 public:
  SggEvaluator(int num_predicates, EvalMode mode, std::vector<int> ks,
               GraphConstraint which);

  ImageRecall evaluate(const SceneGraph& gt,
                       const ImagePredictions& predictions) const;
  void add(const ImageRecall& image);
  // Throws DataError if no image with a relation was added.
  RecallReport report(const PredicateVocabulary& vocab) const;

  int num_predicates() const { return num_predicates_; }

 private:
  struct Tally {
    std::vector<double> recall_sum;                      // per K
    std::vector<std::vector<std::uint64_t>> class_hits;  // per K, per class
  };
  void accumulate(Tally& tally, const ImageRecall& image,
                  const std::vector<std::optional<std::size_t>>& ranks);
  std::vector<RecallAtK> finish(const Tally& tally,
                                const PredicateVocabulary& vocab) const;

  int num_predicates_;
  EvalMode mode_;
  std::vector<int> ks_;
  bool constrained_;
  bool unconstrained_;
  std::size_t images_ = 0;
  std::vector<std::uint64_t> gt_per_class_;
  Tally on_;
  Tally off_;
};

}  // namespace sgpu

#endif  // SGPU_SGG_METRICS_HPP_
