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

#include "sgpu/pu.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sgpu/error.hpp"

namespace sgpu {

void check_pair(const PairPrediction& p, double tolerance) {
  if (p.pred_probs.empty()) throw DataError("pair has no predicate scores");
  double sum = 0.0;
  for (size_t i = 0; i < p.pred_probs.size(); ++i) {
    const double v = p.pred_probs[i];
    if (!std::isfinite(v) || v < 0.0 || (!p.recovered && v > 1.0)) {
      throw DataError("pred_probs[" + std::to_string(i) + "] = " +
                      std::to_string(v) + " is not a valid score");
    }
    sum += v;
  }
  if (p.recovered) return;
  if (p.bg_prob) {
    const double bg = *p.bg_prob;
    if (!std::isfinite(bg) || bg < 0.0 || bg > 1.0) {
      throw DataError("bg_prob = " + std::to_string(bg) + " outside [0, 1]");
    }
    if (std::abs(sum + bg - 1.0) > tolerance) {
      throw DataError("pred_probs + bg_prob sums to " +
                      std::to_string(sum + bg) + ", expected 1");
    }
  } else if (sum > 1.0 + tolerance) {
    throw DataError("pred_probs sums to " + std::to_string(sum) +
                    ", expected at most 1");
  }
}

const char* to_string(Estimator e) {
  return e == Estimator::kDlfe ? "dlfe" : "train-est";
}

Estimator estimator_from_string(const std::string& s) {
  if (s == "dlfe") return Estimator::kDlfe;
  if (s == "train-est") return Estimator::kTrainEst;
  throw UsageError("unknown estimator '" + s + "' (expected dlfe|train-est)");
}

bool LabelFrequencyEstimate::complete() const {
  return std::all_of(c.begin(), c.end(), [](const auto& v) { return v.has_value(); });
}

std::vector<ValidExample> match_valid_pairs(const ImagePredictions& predictions,
                                            const SceneGraph& gt) {
  if (predictions.image_id != gt.image_id) {
    throw UsageError("match_valid_pairs: predictions for '" +
                     predictions.image_id + "' paired with ground truth '" +
                     gt.image_id + "'");
  }
  std::vector<ValidExample> out;
  for (const auto& rel : gt.relations) {
    const auto& gs = gt.objects[static_cast<size_t>(rel.subj)];
    const auto& go = gt.objects[static_cast<size_t>(rel.obj)];
    for (size_t i = 0; i < predictions.pairs.size(); ++i) {
      const auto& p = predictions.pairs[i];
      if (rel.pred > p.num_classes()) {
        throw DataError("image '" + gt.image_id + "': predicate " +
                        std::to_string(rel.pred) + " exceeds the " +
                        std::to_string(p.num_classes()) + " predicted classes");
      }
      if (p.subj.label != gs.label || p.obj.label != go.label) continue;
      if (iou(p.subj.box, gs.box) < kValidExampleIou) continue;
      if (iou(p.obj.box, go.box) < kValidExampleIou) continue;
      out.push_back({gt.image_id, i, rel.pred, p.prob(rel.pred)});
    }
  }
  return out;
}

LabelFrequencyEstimate train_est(std::span<const ValidExample> examples, int k) {
  if (k < 1) throw UsageError("train_est: K must be >= 1");
  std::vector<double> sums(static_cast<size_t>(k), 0.0);
  LabelFrequencyEstimate est;
  est.estimator = Estimator::kTrainEst;
  est.valid_counts.assign(static_cast<size_t>(k), 0);
  for (const auto& e : examples) {
    if (e.label < 1 || e.label > k) {
      throw DataError("valid example label " + std::to_string(e.label) +
                      " outside 1.." + std::to_string(k));
    }
    sums[static_cast<size_t>(e.label - 1)] += e.label_prob;
    ++est.valid_counts[static_cast<size_t>(e.label - 1)];
  }
  est.c.resize(static_cast<size_t>(k));
  for (size_t r = 0; r < sums.size(); ++r) {
    if (est.valid_counts[r] > 0) {
      est.c[r] = sums[r] / static_cast<double>(est.valid_counts[r]);
    }
  }
  return est;
}

LabelFrequencyEstimate fill_missing(const LabelFrequencyEstimate& estimate) {
  std::vector<double> set;
  for (const auto& v : estimate.c) {
    if (v) set.push_back(*v);
  }
  if (set.empty()) {
    throw DataError("fill_missing: no class has a label frequency estimate");
  }
  std::sort(set.begin(), set.end());
  const size_t n = set.size();
  const double median =
      n % 2 == 1 ? set[n / 2] : 0.5 * (set[n / 2 - 1] + set[n / 2]);
  LabelFrequencyEstimate out = estimate;
  for (auto& v : out.c) {
    if (!v) v = median;
  }
  return out;
}

DlfeState::DlfeState(int k, double alpha) : alpha_(alpha) {
  if (k < 1) throw UsageError("DLFE: K must be >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw UsageError("DLFE: momentum must lie in (0, 1], got " +
                     std::to_string(alpha));
  }
  running_.resize(static_cast<size_t>(k));
  class_batches_.assign(static_cast<size_t>(k), 0);
  valid_counts_.assign(static_cast<size_t>(k), 0);
  sums_.assign(static_cast<size_t>(k), 0.0);
  counts_.assign(static_cast<size_t>(k), 0);
}

void DlfeState::update(std::span<const ValidExample> batch) {
  const int k = size();
  std::fill(sums_.begin(), sums_.end(), 0.0);
  std::fill(counts_.begin(), counts_.end(), 0);
  for (const auto& e : batch) {
    if (e.label < 1 || e.label > k) {
      throw DataError("valid example label " + std::to_string(e.label) +
                      " outside 1.." + std::to_string(k));
    }
    sums_[static_cast<size_t>(e.label - 1)] += e.label_prob;
    ++counts_[static_cast<size_t>(e.label - 1)];
  }
  for (size_t r = 0; r < running_.size(); ++r) {
    if (counts_[r] == 0) continue;
    const double batch_mean = sums_[r] / static_cast<double>(counts_[r]);
    auto& c = running_[r];
    c = c ? alpha_ * batch_mean + (1.0 - alpha_) * *c : batch_mean;
    ++class_batches_[r];
    valid_counts_[r] += counts_[r];
  }
  ++batches_seen_;
}

DlfeState dlfe_update(DlfeState state, std::span<const ValidExample> batch) {
  state.update(batch);
  return state;
}

LabelFrequencyEstimate dlfe_finalize(const DlfeState& state) {
  const auto& run = state.running();
  if (std::none_of(run.begin(), run.end(),
                   [](const auto& v) { return v.has_value(); })) {
    throw DataError("DLFE: no valid example was observed in any batch");
  }
  LabelFrequencyEstimate est;
  est.c = run;
  est.valid_counts = state.valid_counts();
  est.estimator = Estimator::kDlfe;
  est.alpha = state.alpha();
  return est;
}

PairPrediction recover_unbiased(const PairPrediction& p,
                                const LabelFrequencyEstimate& c,
                                bool renormalize) {
  if (c.size() != p.num_classes()) {
    throw UsageError("recover_unbiased: " + std::to_string(c.size()) +
                     " label frequencies for " +
                     std::to_string(p.num_classes()) + " predicate classes");
  }
  PairPrediction out = p;
  for (size_t r = 0; r < p.pred_probs.size(); ++r) {
    const auto& cr = c.c[r];
    if (!cr) {
      throw DataError("label frequency of class " + std::to_string(r + 1) +
                      " is unset");
    }
    if (!(*cr > 0.0)) {
      throw DataError("label frequency of class " + std::to_string(r + 1) +
                      " must be positive, got " + std::to_string(*cr));
    }
    out.pred_probs[r] = p.pred_probs[r] / *cr;
  }
  if (renormalize) {
    const double total =
        std::accumulate(out.pred_probs.begin(), out.pred_probs.end(), 0.0);
    if (total > 0.0) {
      for (auto& v : out.pred_probs) v /= total;
    }
  }
  out.recovered = true;
  return out;
}

ImagePredictions recover_unbiased(const ImagePredictions& image,
                                  const LabelFrequencyEstimate& c,
                                  bool renormalize) {
  ImagePredictions out;
  out.image_id = image.image_id;
  out.batch_id = image.batch_id;
  out.pairs.reserve(image.pairs.size());
  for (const auto& p : image.pairs) {
    out.pairs.push_back(recover_unbiased(p, c, renormalize));
  }
  return out;
}

}  // namespace sgpu
