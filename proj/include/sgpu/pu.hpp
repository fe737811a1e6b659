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

#ifndef SGPU_PU_HPP_
#define SGPU_PU_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sgpu/scene_graph.hpp"

namespace sgpu {

// Predicate distribution for one ordered object pair. pred_probs[r - 1] is the
// score of foreground class r; bg_prob is the "no relation" mass when the
// model emits one.
//
// A biased pair holds P(s | x) and obeys the probability invariants checked
// by check_pair(). A recovered pair (output of recover_unbiased) holds
// P(s | x) / c and may exceed 1 in raw mode.
struct PairPrediction {
  ObjectInstance subj;
  ObjectInstance obj;
  int subj_index = -1;
  int obj_index = -1;
  std::vector<double> pred_probs;
  std::optional<double> bg_prob;
  bool recovered = false;

  int num_classes() const { return static_cast<int>(pred_probs.size()); }
  double prob(int r) const { return pred_probs[static_cast<size_t>(r - 1)]; }
};

// Throws DataError describing the first broken invariant. `tolerance` bounds
// the allowed deviation of the probability mass from 1.
void check_pair(const PairPrediction& p, double tolerance = 1e-6);

// All pair predictions of one image. batch_id orders training-trace replay.
struct ImagePredictions {
  std::string image_id;
  std::optional<std::int64_t> batch_id;
  std::vector<PairPrediction> pairs;
};

// A predicted pair that matches an annotated relation (r = label).
// label_prob caches the pair's biased probability for class r.
struct ValidExample {
  std::string image_id;
  std::size_t pair_index = 0;
  int label = 1;
  double label_prob = 0.0;
};

enum class Estimator { kTrainEst, kDlfe };

const char* to_string(Estimator e);
Estimator estimator_from_string(const std::string& s);

// Per-class label frequency c_r = P(s = r | y = r). c[r - 1] is std::nullopt
// while class r has no valid example.
struct LabelFrequencyEstimate {
  std::vector<std::optional<double>> c;
  std::vector<std::uint64_t> valid_counts;
  Estimator estimator = Estimator::kTrainEst;
  std::optional<double> alpha;
  std::string mode;

  int size() const { return static_cast<int>(c.size()); }
  bool complete() const;
};

// IoU threshold (inclusive) for a proposal box to match a ground-truth box.
inline constexpr double kValidExampleIou = 0.5;

// Every predicted pair whose subject and object match a ground-truth
// relation's boxes (IoU >= 0.5) and labels yields one ValidExample labelled
// with that relation's predicate. Throws UsageError on image_id mismatch.
std::vector<ValidExample> match_valid_pairs(const ImagePredictions& predictions,
                                            const SceneGraph& gt);

// Per-class mean of the biased probability over the class's valid examples.
LabelFrequencyEstimate train_est(std::span<const ValidExample> examples, int k);

// Unset entries take the median of the set entries. Throws DataError when
// nothing is set.
LabelFrequencyEstimate fill_missing(const LabelFrequencyEstimate& estimate);

// Running label-frequency estimate updated once per training batch with an
// exponential moving average. A class is seeded by its first batch mean and
// only updated by batches holding at least one of its valid examples.
// Updates are order-sensitive: feed batches from a single thread in order.
class DlfeState {
 public:
  DlfeState(int k, double alpha);

  void update(std::span<const ValidExample> batch);

  int size() const { return static_cast<int>(running_.size()); }
  double alpha() const { return alpha_; }
  const std::vector<std::optional<double>>& running() const { return running_; }
  const std::vector<std::uint64_t>& class_batches() const {
    return class_batches_;
  }
  const std::vector<std::uint64_t>& valid_counts() const {
    return valid_counts_;
  }
  std::uint64_t batches_seen() const { return batches_seen_; }

 private:
  double alpha_;
  std::vector<std::optional<double>> running_;
  std::vector<std::uint64_t> class_batches_;
  std::vector<std::uint64_t> valid_counts_;
  std::uint64_t batches_seen_ = 0;
  // Scratch buffers reused across updates.
  std::vector<double> sums_;
  std::vector<std::uint64_t> counts_;
};

DlfeState dlfe_update(DlfeState state, std::span<const ValidExample> batch);

// Snapshot of the running estimate. Throws DataError if no class was ever set.
LabelFrequencyEstimate dlfe_finalize(const DlfeState& state);

// q_r = p_r / c_r over the foreground classes; background is left as is.
// With renormalize the foreground vector is scaled to sum to 1.
// Throws DataError when c has unset or non-positive entries, UsageError on
// a class-count mismatch.
PairPrediction recover_unbiased(const PairPrediction& p,
                                const LabelFrequencyEstimate& c,
                                bool renormalize = true);

ImagePredictions recover_unbiased(const ImagePredictions& image,
                                  const LabelFrequencyEstimate& c,
                                  bool renormalize = true);

}  // namespace sgpu

#endif  // SGPU_PU_HPP_
