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

#include "sgpu/hoi_metrics.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

#include "sgpu/error.hpp"

namespace sgpu {

std::vector<HoiDetection> top100_filter(const KeyframePrediction& keyframe,
                                        std::size_t cap) {
  std::vector<HoiDetection> dets;
  for (size_t i = 0; i < keyframe.pairs.size(); ++i) {
    const auto& p = keyframe.pairs[i];
    const double pair_score = p.human_score * p.object_score;
    for (size_t c = 0; c < p.interaction_scores.size(); ++c) {
      dets.push_back({i, static_cast<int>(c), p.object_label, p.human, p.object,
                      pair_score * p.interaction_scores[c]});
    }
  }
  std::stable_sort(dets.begin(), dets.end(),
                   [](const HoiDetection& a, const HoiDetection& b) {
                     return a.score > b.score;
                   });
  if (dets.size() > cap) dets.resize(cap);
  return dets;
}

std::vector<bool> match_hoi(std::span<const HoiDetection> ranked,
                            std::span<const HoiGroundTruth> gt) {
  // matched[g] holds the interactions of pair g already claimed.
  std::vector<std::set<int>> matched(gt.size());
  std::vector<bool> flags(ranked.size(), false);
  for (size_t d = 0; d < ranked.size(); ++d) {
    const auto& det = ranked[d];
    double best = -1.0;
    size_t best_g = gt.size();
    for (size_t g = 0; g < gt.size(); ++g) {
      const auto& t = gt[g];
      if (t.object_label != det.object_label) continue;
      if (std::find(t.interactions.begin(), t.interactions.end(), det.predicate) ==
          t.interactions.end()) {
        continue;
      }
      if (matched[g].count(det.predicate)) continue;
      const double ih = iou(det.human, t.human);
      const double io = iou(det.object, t.object);
      if (!(ih > kHoiMatchIou && io > kHoiMatchIou)) continue;
      const double overlap = std::min(ih, io);
      if (overlap > best) {
        best = overlap;
        best_g = g;
      }
    }
    if (best_g < gt.size()) {
      matched[best_g].insert(det.predicate);
      flags[d] = true;
    }
  }
  return flags;
}

double average_precision(const std::vector<bool>& flags, std::size_t gt_count) {
  if (gt_count == 0) throw UsageError("average_precision: no ground truth");
  const size_t n = flags.size();
  std::vector<double> precision(n);
  size_t tp = 0;
  for (size_t i = 0; i < n; ++i) {
    if (flags[i]) ++tp;
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
  }
  for (size_t i = n; i-- > 1;) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  double ap = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if (flags[i]) ap += precision[i];
  }
  return std::min(1.0, ap / static_cast<double>(gt_count));
}

const char* to_string(HoiSplit s) {
  switch (s) {
    case HoiSplit::kFull: return "full";
    case HoiSplit::kRare: return "rare";
    case HoiSplit::kNonRare: return "nonrare";
  }
  return "?";
}

HoiSplit hoi_split_from_string(const std::string& s) {
  if (s == "full") return HoiSplit::kFull;
  if (s == "rare") return HoiSplit::kRare;
  if (s == "nonrare" || s == "non-rare") return HoiSplit::kNonRare;
  throw UsageError("unknown split '" + s + "' (expected full|rare|nonrare)");
}

std::uint64_t CategorySplit::count(const HoiCategory& c) const {
  const auto it = counts.find(c);
  return it == counts.end() ? 0 : it->second;
}

bool CategorySplit::contains(HoiSplit split, const HoiCategory& c) const {
  switch (split) {
    case HoiSplit::kFull: return true;
    case HoiSplit::kRare: return rare(c);
    case HoiSplit::kNonRare: return !rare(c);
  }
  return false;
}

CategorySplit CategorySplit::from_annotations(std::span<const KeyframeAnnotation> gt) {
  CategorySplit out;
  for (const auto& kf : gt) {
    for (const auto& p : kf.pairs) {
      for (int c : p.interactions) ++out.counts[{c, p.object_label}];
    }
  }
  return out;
}

namespace {

template <typename Key>
void pool(std::map<Key, RankedFlags>& groups, const Key& key, double score,
          bool flag) {
  auto& g = groups[key];
  g.scores.push_back(score);
  g.flags.push_back(flag);
}

template <typename Key>
void sort_pooled(std::map<Key, RankedFlags>& groups) {
  for (auto& [key, g] : groups) {
    std::vector<size_t> order(g.scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&g](size_t a, size_t b) { return g.scores[a] > g.scores[b]; });
    RankedFlags sorted;
    sorted.gt_count = g.gt_count;
    for (size_t i : order) {
      sorted.scores.push_back(g.scores[i]);
      sorted.flags.push_back(g.flags[i]);
    }
    g = std::move(sorted);
  }
}

}  // namespace

HoiEvaluation evaluate_hoi(std::span<const HoiSample> dataset, std::size_t cap) {
  HoiEvaluation eval;
  for (const auto& s : dataset) {
    for (const auto& p : s.gt.pairs) {
      for (int c : p.interactions) {
        ++eval.categories[{c, p.object_label}].gt_count;
        ++eval.predicates[c].gt_count;
      }
    }
  }
  for (const auto& s : dataset) {
    const auto dets = top100_filter(s.predictions, cap);
    const auto flags = match_hoi(dets, s.gt.pairs);
    for (size_t i = 0; i < dets.size(); ++i) {
      pool(eval.categories, dets[i].category(), dets[i].score, flags[i]);
      pool(eval.predicates, dets[i].predicate, dets[i].score, flags[i]);
    }
  }
  sort_pooled(eval.categories);
  sort_pooled(eval.predicates);
  return eval;
}

namespace {

HoiMapResult map_over(const HoiEvaluation& eval,
                      const std::function<bool(const HoiCategory&)>& keep) {
  HoiMapResult out;
  double sum = 0.0;
  for (const auto& [cat, g] : eval.categories) {
    if (g.gt_count == 0 || !keep(cat)) continue;
    const double ap = average_precision(g.flags, g.gt_count);
    out.ap[cat] = ap;
    sum += ap;
  }
  if (!out.ap.empty()) out.map = sum / static_cast<double>(out.ap.size());
  return out;
}

}  // namespace

HoiMapResult hoi_map(const HoiEvaluation& eval, HoiSplit split,
                     const CategorySplit& counts) {
  auto out = map_over(eval, [&](const HoiCategory& c) {
    return counts.contains(split, c);
  });
  if (out.ap.empty()) {
    throw DataError(std::string("no category with ground truth in split '") +
                    to_string(split) + "'");
  }
  return out;
}

std::map<int, double> predicate_ap(const HoiEvaluation& eval) {
  std::map<int, double> out;
  for (const auto& [p, g] : eval.predicates) {
    if (g.gt_count > 0) out[p] = average_precision(g.flags, g.gt_count);
  }
  return out;
}

TemporalSpatialMap temporal_spatial_map(const HoiEvaluation& eval,
                                        const std::vector<bool>& temporal_tags) {
  if (temporal_tags.empty()) {
    throw UsageError("temporal_spatial_map: no temporal tags given");
  }
  for (const auto& [cat, g] : eval.categories) {
    if (cat.predicate < 0 ||
        cat.predicate >= static_cast<int>(temporal_tags.size())) {
      throw UsageError("temporal tags cover " +
                       std::to_string(temporal_tags.size()) +
                       " interactions but interaction " +
                       std::to_string(cat.predicate) + " occurs");
    }
  }
  auto tagged = [&](const HoiCategory& c) {
    return static_cast<bool>(temporal_tags[static_cast<size_t>(c.predicate)]);
  };
  TemporalSpatialMap out;
  auto t = map_over(eval, tagged);
  auto s = map_over(eval, [&](const HoiCategory& c) { return !tagged(c); });
  if (!t.ap.empty()) out.temporal = std::move(t);
  if (!s.ap.empty()) out.spatial = std::move(s);
  return out;
}

std::vector<std::optional<std::size_t>> relation_hit_ranks(
    const VideoRelations& video, std::vector<std::size_t>* order_out,
    std::vector<bool>* flags_out) {
  const auto& preds = video.predictions;
  std::vector<size_t> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&preds](size_t a, size_t b) {
    return preds[a].score > preds[b].score;
  });
  std::vector<std::optional<size_t>> ranks(video.gt.size());
  std::vector<bool> flags(preds.size(), false);
  for (size_t rank = 0; rank < order.size(); ++rank) {
    const auto& p = preds[order[rank]];
    double best = -1.0;
    size_t best_g = video.gt.size();
    for (size_t g = 0; g < video.gt.size(); ++g) {
      if (ranks[g]) continue;
      const auto& t = video.gt[g];
      if (t.triplet != p.triplet) continue;
      const double vs = viou(p.subj, t.subj);
      const double vo = viou(p.obj, t.obj);
      if (!(vs >= kRelationMatchViou && vo >= kRelationMatchViou)) continue;
      const double overlap = std::min(vs, vo);
      if (overlap > best) {
        best = overlap;
        best_g = g;
      }
    }
    if (best_g < video.gt.size()) {
      ranks[best_g] = rank;
      flags[rank] = true;
    }
  }
  if (order_out) *order_out = std::move(order);
  if (flags_out) *flags_out = std::move(flags);
  return ranks;
}

RelationDetectionResult relation_detection_eval(std::span<const VideoRelations> videos,
                                                std::span<const int> ks) {
  for (int k : ks) {
    if (k < 1) throw UsageError("recall cutoff must be >= 1");
  }
  std::vector<double> recall_sum(ks.size(), 0.0);
  size_t counted = 0;
  std::map<RelationTriplet, RankedFlags> groups;
  for (const auto& v : videos) {
    for (const auto& g : v.gt) ++groups[g.triplet].gt_count;
  }
  for (const auto& v : videos) {
    std::vector<size_t> order;
    std::vector<bool> flags;
    const auto ranks = relation_hit_ranks(v, &order, &flags);
    for (size_t r = 0; r < order.size(); ++r) {
      const auto& p = v.predictions[order[r]];
      pool(groups, p.triplet, p.score, static_cast<bool>(flags[r]));
    }
    if (v.gt.empty()) continue;
    ++counted;
    for (size_t ki = 0; ki < ks.size(); ++ki) {
      const auto k = static_cast<size_t>(ks[ki]);
      const auto hits = std::count_if(ranks.begin(), ranks.end(), [k](const auto& r) {
        return r && *r < k;
      });
      recall_sum[ki] += static_cast<double>(hits) / static_cast<double>(v.gt.size());
    }
  }
  if (counted == 0) throw DataError("no video with ground-truth relations");
  sort_pooled(groups);

  RelationDetectionResult out;
  for (size_t ki = 0; ki < ks.size(); ++ki) {
    out.recall.emplace_back(ks[ki], recall_sum[ki] / static_cast<double>(counted));
  }
  double sum = 0.0;
  for (const auto& [t, g] : groups) {
    if (g.gt_count == 0) continue;
    const double ap = average_precision(g.flags, g.gt_count);
    out.ap[t] = ap;
    sum += ap;
  }
  out.map = sum / static_cast<double>(out.ap.size());
  return out;
}

std::vector<std::pair<int, double>> relation_tagging_precision(
    std::span<const VideoRelations> videos, std::span<const int> ks) {
  for (int k : ks) {
    if (k < 1) throw UsageError("precision cutoff must be >= 1");
  }
  std::vector<double> sum(ks.size(), 0.0);
  size_t counted = 0;
  for (const auto& v : videos) {
    if (v.gt.empty()) continue;
    ++counted;
    std::set<RelationTriplet> truth;
    for (const auto& g : v.gt) truth.insert(g.triplet);
    // Distinct labels in first-occurrence order with their best score.
    std::vector<RelationTriplet> labels;
    std::map<RelationTriplet, double> best;
    for (const auto& p : v.predictions) {
      auto [it, fresh] = best.try_emplace(p.triplet, p.score);
      if (fresh) {
        labels.push_back(p.triplet);
      } else {
        it->second = std::max(it->second, p.score);
      }
    }
    std::stable_sort(labels.begin(), labels.end(),
                     [&best](const RelationTriplet& a, const RelationTriplet& b) {
                       return best[a] > best[b];
                     });
    for (size_t ki = 0; ki < ks.size(); ++ki) {
      const auto k = static_cast<size_t>(ks[ki]);
      size_t correct = 0;
      for (size_t i = 0; i < std::min(k, labels.size()); ++i) {
        if (truth.count(labels[i])) ++correct;
      }
      sum[ki] += static_cast<double>(correct) / static_cast<double>(k);
    }
  }
  if (counted == 0) throw DataError("no video with ground-truth relations");
  std::vector<std::pair<int, double>> out;
  for (size_t ki = 0; ki < ks.size(); ++ki) {
    out.emplace_back(ks[ki], sum[ki] / static_cast<double>(counted));
  }
  return out;
}

}  // namespace sgpu
