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

#include "sgpu/sgg_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sgpu/error.hpp"

namespace sgpu {

const char* to_string(EvalMode m) {
  switch (m) {
    case EvalMode::kPredCls: return "predcls";
    case EvalMode::kSGCls: return "sgcls";
    case EvalMode::kSGDet: return "sgdet";
  }
  return "?";
}

EvalMode eval_mode_from_string(const std::string& s) {
  if (s == "predcls") return EvalMode::kPredCls;
  if (s == "sgcls") return EvalMode::kSGCls;
  if (s == "sgdet") return EvalMode::kSGDet;
  throw UsageError("unknown evaluation mode '" + s +
                   "' (expected predcls|sgcls|sgdet)");
}

const char* to_string(Bucket b) {
  switch (b) {
    case Bucket::kHead: return "head";
    case Bucket::kMiddle: return "middle";
    case Bucket::kTail: return "tail";
  }
  return "?";
}

GraphConstraint graph_constraint_from_string(const std::string& s) {
  if (s == "on") return GraphConstraint::kOn;
  if (s == "off") return GraphConstraint::kOff;
  if (s == "both") return GraphConstraint::kBoth;
  throw UsageError("unknown graph-constraint selection '" + s +
                   "' (expected on|off|both)");
}

std::vector<RankedTriplet> rank_predictions(std::span<const PairPrediction> pairs,
                                            EvalMode mode, bool graph_constraint) {
  std::vector<RankedTriplet> out;
  for (size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    if (p.pred_probs.empty()) continue;
    const double pair_score =
        mode == EvalMode::kPredCls ? 1.0 : p.subj.score * p.obj.score;
    if (graph_constraint) {
      const auto best = std::max_element(p.pred_probs.begin(), p.pred_probs.end());
      const int r = static_cast<int>(best - p.pred_probs.begin()) + 1;
      out.push_back({i, p.subj, r, p.obj, pair_score * *best});
    } else {
      for (int r = 1; r <= p.num_classes(); ++r) {
        out.push_back({i, p.subj, r, p.obj, pair_score * p.prob(r)});
      }
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const RankedTriplet& a, const RankedTriplet& b) {
                     return a.score > b.score;
                   });
  return out;
}

namespace {

bool boxes_match(const BoundingBox& pred, const BoundingBox& gt, EvalMode mode) {
  if (mode == EvalMode::kSGDet) return iou(pred, gt) >= kValidExampleIou;
  return pred == gt;
}

bool candidate_matches(const RankedTriplet& c, const SceneGraph& gt,
                       const RelationTriple& rel, EvalMode mode) {
  if (c.pred != rel.pred) return false;
  const auto& s = gt.objects[static_cast<size_t>(rel.subj)];
  const auto& o = gt.objects[static_cast<size_t>(rel.obj)];
  return c.subj.label == s.label && c.obj.label == o.label &&
         boxes_match(c.subj.box, s.box, mode) && boxes_match(c.obj.box, o.box, mode);
}

int infer_num_predicates(std::span<const SggSample> dataset) {
  int k = 0;
  for (const auto& s : dataset) {
    for (const auto& r : s.gt.relations) k = std::max(k, r.pred);
    for (const auto& p : s.predictions.pairs) k = std::max(k, p.num_classes());
  }
  return std::max(k, 1);
}

RecallReport evaluate_dataset(std::span<const SggSample> dataset, int k,
                              int num_predicates, EvalMode mode,
                              bool graph_constraint) {
  SggEvaluator ev(num_predicates, mode, {k},
                  graph_constraint ? GraphConstraint::kOn : GraphConstraint::kOff);
  for (const auto& s : dataset) ev.add(ev.evaluate(s.gt, s.predictions));
  if (num_predicates < 3) {
    // Bucket aggregates need K >= 3; report recall without them.
    return ev.report(PredicateVocabulary{});
  }
  return ev.report(PredicateVocabulary::numbered(num_predicates));
}

}  // namespace

std::vector<std::optional<std::size_t>> hit_ranks(
    std::span<const RankedTriplet> candidates, const SceneGraph& gt,
    EvalMode mode, std::size_t limit) {
  std::vector<std::optional<std::size_t>> ranks(gt.relations.size());
  const size_t n = std::min(limit, candidates.size());
  size_t remaining = gt.relations.size();
  for (size_t i = 0; i < n && remaining > 0; ++i) {
    for (size_t g = 0; g < gt.relations.size(); ++g) {
      if (ranks[g]) continue;
      if (candidate_matches(candidates[i], gt, gt.relations[g], mode)) {
        ranks[g] = i;
        --remaining;
        break;
      }
    }
  }
  return ranks;
}

std::vector<int> match_ranked(std::span<const RankedTriplet> candidates,
                              const SceneGraph& gt, int k, EvalMode mode) {
  if (k < 1) throw UsageError("match_ranked: K must be >= 1");
  const auto ranks = hit_ranks(candidates, gt, mode, static_cast<size_t>(k));
  std::vector<int> hits;
  for (size_t g = 0; g < ranks.size(); ++g) {
    if (ranks[g]) hits.push_back(static_cast<int>(g));
  }
  return hits;
}

double recall_at_k(std::span<const SggSample> dataset, int k, EvalMode mode,
                   bool graph_constraint) {
  const int np = infer_num_predicates(dataset);
  const auto rep = evaluate_dataset(dataset, k, np, mode, graph_constraint);
  return graph_constraint ? rep.constrained.front().recall
                          : rep.unconstrained.front().recall;
}

MeanRecall mean_recall_at_k(std::span<const SggSample> dataset, int k,
                            int num_predicates, EvalMode mode,
                            bool graph_constraint) {
  const auto rep = evaluate_dataset(dataset, k, num_predicates, mode, graph_constraint);
  const auto& r = graph_constraint ? rep.constrained.front()
                                   : rep.unconstrained.front();
  return {r.mean_recall, r.per_class};
}

BucketSizes bucket_sizes(int k) {
  if (k < 3) {
    throw DataError("head/middle/tail split needs at least 3 predicate classes");
  }
  BucketSizes b;
  b.head = static_cast<int>(std::lround(0.3 * k));
  b.tail = b.head;
  b.middle = k - b.head - b.tail;
  return b;
}

std::vector<int> frequency_ranks(const PredicateVocabulary& vocab) {
  const int k = vocab.size();
  std::vector<int> order(static_cast<size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  auto freq = [&vocab](int i) -> std::uint64_t {
    return vocab.train_frequency.empty()
               ? 0
               : vocab.train_frequency[static_cast<size_t>(i)];
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return freq(a) > freq(b); });
  std::vector<int> rank(static_cast<size_t>(k));
  for (int pos = 0; pos < k; ++pos) rank[static_cast<size_t>(order[pos])] = pos + 1;
  return rank;
}

std::vector<Bucket> assign_buckets(const PredicateVocabulary& vocab) {
  const BucketSizes sizes = bucket_sizes(vocab.size());
  const auto rank = frequency_ranks(vocab);
  std::vector<Bucket> out(rank.size());
  for (size_t r = 0; r < rank.size(); ++r) {
    if (rank[r] <= sizes.head) {
      out[r] = Bucket::kHead;
    } else if (rank[r] <= sizes.head + sizes.middle) {
      out[r] = Bucket::kMiddle;
    } else {
      out[r] = Bucket::kTail;
    }
  }
  return out;
}

BucketRecall head_middle_tail(const PredicateVocabulary& vocab,
                              std::span<const std::optional<double>> per_class) {
  if (static_cast<int>(per_class.size()) != vocab.size()) {
    throw UsageError("head_middle_tail: " + std::to_string(per_class.size()) +
                     " recalls for " + std::to_string(vocab.size()) + " classes");
  }
  const auto buckets = assign_buckets(vocab);
  double sum[3] = {0, 0, 0};
  int count[3] = {0, 0, 0};
  for (size_t r = 0; r < per_class.size(); ++r) {
    if (!per_class[r]) continue;
    const auto b = static_cast<size_t>(buckets[r]);
    sum[b] += *per_class[r];
    ++count[b];
  }
  auto mean = [&](Bucket b) -> std::optional<double> {
    const auto i = static_cast<size_t>(b);
    if (count[i] == 0) return std::nullopt;
    return sum[i] / count[i];
  };
  return {mean(Bucket::kHead), mean(Bucket::kMiddle), mean(Bucket::kTail)};
}

SggEvaluator::SggEvaluator(int num_predicates, EvalMode mode, std::vector<int> ks,
                           GraphConstraint which)
    : num_predicates_(num_predicates),
      mode_(mode),
      ks_(std::move(ks)),
      constrained_(which != GraphConstraint::kOff),
      unconstrained_(which != GraphConstraint::kOn) {
  if (num_predicates_ < 1) throw UsageError("evaluator needs K >= 1 predicates");
  if (ks_.empty()) throw UsageError("no recall cutoff given");
  for (int k : ks_) {
    if (k < 1) throw UsageError("recall cutoff must be >= 1, got " + std::to_string(k));
  }
  gt_per_class_.assign(static_cast<size_t>(num_predicates_), 0);
  for (Tally* t : {&on_, &off_}) {
    t->recall_sum.assign(ks_.size(), 0.0);
    t->class_hits.assign(ks_.size(),
                         std::vector<std::uint64_t>(static_cast<size_t>(num_predicates_), 0));
  }
}

ImageRecall SggEvaluator::evaluate(const SceneGraph& gt,
                                   const ImagePredictions& predictions) const {
  ImageRecall out;
  out.gt_count = gt.relations.size();
  for (const auto& r : gt.relations) {
    if (r.pred < 1 || r.pred > num_predicates_) {
      throw DataError("image '" + gt.image_id + "': predicate " +
                      std::to_string(r.pred) + " outside 1.." +
                      std::to_string(num_predicates_));
    }
    out.gt_classes.push_back(r.pred);
  }
  if (out.gt_count == 0) return out;
  const auto limit = static_cast<size_t>(*std::max_element(ks_.begin(), ks_.end()));
  if (constrained_) {
    const auto c = rank_predictions(predictions.pairs, mode_, true);
    out.constrained_ranks = hit_ranks(c, gt, mode_, limit);
  }
  if (unconstrained_) {
    const auto c = rank_predictions(predictions.pairs, mode_, false);
    out.unconstrained_ranks = hit_ranks(c, gt, mode_, limit);
  }
  return out;
}

void SggEvaluator::accumulate(Tally& tally, const ImageRecall& image,
                              const std::vector<std::optional<std::size_t>>& ranks) {
  for (size_t ki = 0; ki < ks_.size(); ++ki) {
    const auto k = static_cast<size_t>(ks_[ki]);
    std::uint64_t hits = 0;
    for (size_t g = 0; g < ranks.size(); ++g) {
      if (ranks[g] && *ranks[g] < k) {
        ++hits;
        ++tally.class_hits[ki][static_cast<size_t>(image.gt_classes[g] - 1)];
      }
    }
    tally.recall_sum[ki] +=
        static_cast<double>(hits) / static_cast<double>(image.gt_count);
  }
}

void SggEvaluator::add(const ImageRecall& image) {
  if (image.gt_count == 0) return;
  ++images_;
  for (int c : image.gt_classes) ++gt_per_class_[static_cast<size_t>(c - 1)];
  if (constrained_) accumulate(on_, image, image.constrained_ranks);
  if (unconstrained_) accumulate(off_, image, image.unconstrained_ranks);
}

std::vector<RecallAtK> SggEvaluator::finish(const Tally& tally,
                                            const PredicateVocabulary& vocab) const {
  std::vector<RecallAtK> out;
  const bool with_buckets = vocab.size() == num_predicates_ && num_predicates_ >= 3;
  for (size_t ki = 0; ki < ks_.size(); ++ki) {
    RecallAtK r;
    r.k = ks_[ki];
    r.recall = tally.recall_sum[ki] / static_cast<double>(images_);
    r.per_class.resize(static_cast<size_t>(num_predicates_));
    double sum = 0.0;
    int classes = 0;
    for (size_t c = 0; c < r.per_class.size(); ++c) {
      if (gt_per_class_[c] == 0) continue;
      r.per_class[c] = static_cast<double>(tally.class_hits[ki][c]) /
                       static_cast<double>(gt_per_class_[c]);
      sum += *r.per_class[c];
      ++classes;
    }
    r.mean_recall = classes > 0 ? sum / classes : 0.0;
    if (with_buckets) r.buckets = head_middle_tail(vocab, r.per_class);
    out.push_back(std::move(r));
  }
  return out;
}

RecallReport SggEvaluator::report(const PredicateVocabulary& vocab) const {
  if (images_ == 0) {
    throw DataError("no image with at least one ground-truth relation");
  }
  RecallReport rep;
  rep.mode = mode_;
  rep.ks = ks_;
  rep.images = images_;
  rep.gt_per_class = gt_per_class_;
  if (constrained_) rep.constrained = finish(on_, vocab);
  if (unconstrained_) rep.unconstrained = finish(off_, vocab);
  return rep;
}

}  // namespace sgpu
