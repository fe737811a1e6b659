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

#include "sgpu/oracle.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "sgpu/error.hpp"
#include "sgpu/random.hpp"

namespace sgpu::oracle {

namespace {

double box_area(const BoundingBox& b) { return (b.x1 - b.x0) * (b.y1 - b.y0); }

double overlap_ratio(const BoundingBox& a, const BoundingBox& b) {
  const double left = a.x0 > b.x0 ? a.x0 : b.x0;
  const double right = a.x1 < b.x1 ? a.x1 : b.x1;
  const double top = a.y0 > b.y0 ? a.y0 : b.y0;
  const double bottom = a.y1 < b.y1 ? a.y1 : b.y1;
  const double inter = (right > left && bottom > top) ? (right - left) * (bottom - top) : 0.0;
  const double uni = box_area(a) + box_area(b) - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

bool same_box(const BoundingBox& a, const BoundingBox& b) {
  return a.x0 == b.x0 && a.y0 == b.y0 && a.x1 == b.x1 && a.y1 == b.y1;
}

void refuse(const std::string& what) {
  throw UsageError("oracle refuses instance: " + what);
}

struct Candidate {
  int pair = 0;
  int pred = 0;
  double score = 0.0;
  const PairPrediction* source = nullptr;
};

// Position of each candidate in the ranked list, by counting how many
// candidates beat it. Ties fall back to generation order (pair, predicate).
std::vector<int> rank_by_counting(const std::vector<Candidate>& c) {
  std::vector<int> pos(c.size(), 0);
  for (size_t i = 0; i < c.size(); ++i) {
    for (size_t j = 0; j < c.size(); ++j) {
      if (i == j) continue;
      const bool ahead =
          c[j].score > c[i].score ||
          (c[j].score == c[i].score &&
           (c[j].pair < c[i].pair || (c[j].pair == c[i].pair && c[j].pred < c[i].pred)));
      if (ahead) ++pos[i];
    }
  }
  return pos;
}

std::vector<Candidate> candidates(const ImagePredictions& preds, EvalMode mode,
                                  bool constrained) {
  std::vector<Candidate> out;
  for (size_t i = 0; i < preds.pairs.size(); ++i) {
    const auto& p = preds.pairs[i];
    const double base = mode == EvalMode::kPredCls ? 1.0 : p.subj.score * p.obj.score;
    const int k = static_cast<int>(p.pred_probs.size());
    if (constrained) {
      int best = -1;
      for (int r = 0; r < k && best < 0; ++r) {
        bool top = true;
        for (int q = 0; q < k; ++q) {
          if (p.pred_probs[static_cast<size_t>(q)] > p.pred_probs[static_cast<size_t>(r)]) top = false;
        }
        if (top) best = r;
      }
      if (best >= 0) {
        out.push_back({static_cast<int>(i), best + 1,
                       base * p.pred_probs[static_cast<size_t>(best)], &p});
      }
    } else {
      for (int r = 0; r < k; ++r) {
        out.push_back({static_cast<int>(i), r + 1, base * p.pred_probs[static_cast<size_t>(r)], &p});
      }
    }
  }
  return out;
}

bool hits(const Candidate& c, const SceneGraph& gt, const RelationTriple& rel,
          EvalMode mode) {
  const auto& s = gt.objects[static_cast<size_t>(rel.subj)];
  const auto& o = gt.objects[static_cast<size_t>(rel.obj)];
  if (c.pred != rel.pred) return false;
  if (c.source->subj.label != s.label || c.source->obj.label != o.label) return false;
  if (mode == EvalMode::kSGDet) {
    return overlap_ratio(c.source->subj.box, s.box) >= 0.5 &&
           overlap_ratio(c.source->obj.box, o.box) >= 0.5;
  }
  return same_box(c.source->subj.box, s.box) && same_box(c.source->obj.box, o.box);
}

// Hit flags of the GT relations when only the top `k` candidates are scanned.
std::vector<bool> hits_at(const std::vector<Candidate>& cands,
                          const std::vector<int>& pos, const SceneGraph& gt,
                          EvalMode mode, int k) {
  std::vector<bool> hit(gt.relations.size(), false);
  for (int p = 0; p < k; ++p) {
    size_t idx = cands.size();
    for (size_t i = 0; i < cands.size(); ++i) {
      if (pos[i] == p) idx = i;
    }
    if (idx == cands.size()) break;
    for (size_t g = 0; g < gt.relations.size(); ++g) {
      if (!hit[g] && hits(cands[idx], gt, gt.relations[g], mode)) {
        hit[g] = true;
        break;
      }
    }
  }
  return hit;
}

void bucket_means(const PredicateVocabulary& vocab,
                  const std::vector<std::optional<double>>& per_class,
                  SggReference& out) {
  const int k = vocab.size();
  if (k < 3) return;
  const int head = static_cast<int>(0.3 * k + 0.5);
  const int tail = head;
  const int middle = k - head - tail;
  double sums[3] = {0, 0, 0};
  int counts[3] = {0, 0, 0};
  for (int r = 0; r < k; ++r) {
    int rank = 1;
    for (int j = 0; j < k; ++j) {
      const auto fj = vocab.train_frequency[static_cast<size_t>(j)];
      const auto fr = vocab.train_frequency[static_cast<size_t>(r)];
      if (fj > fr || (fj == fr && j < r)) ++rank;
    }
    const int b = rank <= head ? 0 : (rank <= head + middle ? 1 : 2);
    if (per_class[static_cast<size_t>(r)]) {
      sums[b] += *per_class[static_cast<size_t>(r)];
      ++counts[b];
    }
  }
  if (counts[0]) out.head = sums[0] / counts[0];
  if (counts[1]) out.middle = sums[1] / counts[1];
  if (counts[2]) out.tail = sums[2] / counts[2];
}

std::vector<SggReference> sgg_variant(std::span<const SggSample> images,
                                      const PredicateVocabulary& vocab,
                                      EvalMode mode, std::span<const int> ks,
                                      bool constrained) {
  const int np = vocab.size();
  std::vector<SggReference> out;
  for (int k : ks) {
    SggReference ref;
    ref.k = k;
    double recall_sum = 0.0;
    int counted = 0;
    std::vector<std::uint64_t> class_hits(static_cast<size_t>(np), 0);
    std::vector<std::uint64_t> class_gt(static_cast<size_t>(np), 0);
    for (const auto& img : images) {
      if (img.gt.relations.empty()) continue;
      const auto cands = candidates(img.predictions, mode, constrained);
      const auto pos = rank_by_counting(cands);
      const auto hit = hits_at(cands, pos, img.gt, mode, k);
      int n_hit = 0;
      for (size_t g = 0; g < hit.size(); ++g) {
        const auto c = static_cast<size_t>(img.gt.relations[g].pred - 1);
        ++class_gt[c];
        if (hit[g]) {
          ++n_hit;
          ++class_hits[c];
        }
      }
      recall_sum += static_cast<double>(n_hit) / static_cast<double>(hit.size());
      ++counted;
    }
    if (counted == 0) refuse("no image with ground truth");
    ref.recall = recall_sum / counted;
    ref.per_class.resize(static_cast<size_t>(np));
    double sum = 0.0;
    int classes = 0;
    for (int r = 0; r < np; ++r) {
      if (class_gt[static_cast<size_t>(r)] == 0) continue;
      const double v = static_cast<double>(class_hits[static_cast<size_t>(r)]) /
                       static_cast<double>(class_gt[static_cast<size_t>(r)]);
      ref.per_class[static_cast<size_t>(r)] = v;
      sum += v;
      ++classes;
    }
    ref.mean_recall = classes ? sum / classes : 0.0;
    bucket_means(vocab, ref.per_class, ref);
    out.push_back(std::move(ref));
  }
  return out;
}

}  // namespace

SggOracleResult sgg_metrics(std::span<const SggSample> images,
                            const PredicateVocabulary& vocab, EvalMode mode,
                            std::span<const int> ks) {
  if (static_cast<int>(images.size()) > kMaxImages) refuse("too many images");
  if (vocab.size() > kMaxPredicates) refuse("too many predicates");
  for (const auto& img : images) {
    if (static_cast<int>(img.gt.objects.size()) > kMaxObjects) refuse("too many objects");
    if (static_cast<int>(img.predictions.pairs.size()) > kMaxObjects * (kMaxObjects - 1)) {
      refuse("too many pairs");
    }
  }
  return {sgg_variant(images, vocab, mode, ks, true),
          sgg_variant(images, vocab, mode, ks, false)};
}

double average_precision(const std::vector<bool>& flags, std::size_t gt_count) {
  if (gt_count == 0) refuse("AP without ground truth");
  const size_t n = flags.size();
  double ap = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if (!flags[i]) continue;
    // Interpolated precision: best precision at any rank with recall >= this.
    double best = 0.0;
    for (size_t j = i; j < n; ++j) {
      size_t tp = 0;
      for (size_t q = 0; q <= j; ++q) tp += flags[q] ? 1 : 0;
      const double prec = static_cast<double>(tp) / static_cast<double>(j + 1);
      if (prec > best) best = prec;
    }
    ap += best;
  }
  const double v = ap / static_cast<double>(gt_count);
  return v > 1.0 ? 1.0 : v;
}

namespace {

struct PooledEntry {
  double score;
  int group;     // keyframe or video index
  int position;  // position within that group
  bool tp;
};

// Orders pooled entries by counting, ties to (group, position).
std::vector<bool> ordered_flags(const std::vector<PooledEntry>& e) {
  std::vector<bool> flags(e.size());
  for (size_t i = 0; i < e.size(); ++i) {
    size_t pos = 0;
    for (size_t j = 0; j < e.size(); ++j) {
      if (i == j) continue;
      if (e[j].score > e[i].score ||
          (e[j].score == e[i].score &&
           (e[j].group < e[i].group ||
            (e[j].group == e[i].group && e[j].position < e[i].position)))) {
        ++pos;
      }
    }
    flags[pos] = e[i].tp;
  }
  return flags;
}

struct HoiDet {
  int pair;
  int pred;
  double score;
  const HoiPairPrediction* src;
};

}  // namespace

HoiOracleResult hoi_metrics(std::span<const HoiSample> keyframes,
                            const std::map<HoiCategory, std::uint64_t>& counts) {
  if (static_cast<int>(keyframes.size()) > kMaxImages) refuse("too many keyframes");
  std::map<HoiCategory, std::vector<PooledEntry>> by_cat;
  std::map<int, std::vector<PooledEntry>> by_pred;
  std::map<HoiCategory, std::size_t> gt_cat;
  std::map<int, std::size_t> gt_pred;

  for (size_t f = 0; f < keyframes.size(); ++f) {
    const auto& kf = keyframes[f];
    for (const auto& g : kf.gt.pairs) {
      for (int c : g.interactions) {
        ++gt_cat[{c, g.object_label}];
        ++gt_pred[c];
      }
    }
    std::vector<HoiDet> dets;
    for (size_t i = 0; i < kf.predictions.pairs.size(); ++i) {
      const auto& p = kf.predictions.pairs[i];
      for (size_t c = 0; c < p.interaction_scores.size(); ++c) {
        dets.push_back({static_cast<int>(i), static_cast<int>(c),
                        (p.human_score * p.object_score) * p.interaction_scores[c], &p});
      }
    }
    if (static_cast<int>(dets.size()) > kMaxDetections) refuse("too many detections");
    std::vector<int> pos(dets.size(), 0);
    for (size_t i = 0; i < dets.size(); ++i) {
      for (size_t j = 0; j < dets.size(); ++j) {
        if (j != i && (dets[j].score > dets[i].score ||
                       (dets[j].score == dets[i].score && j < i))) {
          ++pos[i];
        }
      }
    }
    // Claimed (gt pair, interaction) units.
    std::set<std::pair<size_t, int>> claimed;
    for (int p = 0; p < static_cast<int>(dets.size()); ++p) {
      if (p >= static_cast<int>(kKeyframeDetectionCap)) break;
      size_t d = 0;
      while (pos[d] != p) ++d;
      const auto& det = dets[d];
      double best = -1.0;
      size_t best_g = kf.gt.pairs.size();
      for (size_t g = 0; g < kf.gt.pairs.size(); ++g) {
        const auto& t = kf.gt.pairs[g];
        bool has = false;
        for (int c : t.interactions) has = has || c == det.pred;
        if (!has || t.object_label != det.src->object_label) continue;
        if (claimed.count({g, det.pred})) continue;
        const double ih = overlap_ratio(det.src->human, t.human);
        const double io = overlap_ratio(det.src->object, t.object);
        if (ih <= 0.5 || io <= 0.5) continue;
        const double m = ih < io ? ih : io;
        if (m > best) {
          best = m;
          best_g = g;
        }
      }
      const bool tp = best_g < kf.gt.pairs.size();
      if (tp) claimed.insert({best_g, det.pred});
      const PooledEntry e{det.score, static_cast<int>(f), p, tp};
      by_cat[{det.pred, det.src->object_label}].push_back(e);
      by_pred[det.pred].push_back(e);
    }
  }

  HoiOracleResult out;
  double sums[3] = {0, 0, 0};
  int n[3] = {0, 0, 0};
  for (const auto& [cat, g] : gt_cat) {
    const auto it = by_cat.find(cat);
    const auto flags = it == by_cat.end() ? std::vector<bool>{} : ordered_flags(it->second);
    const double ap = average_precision(flags, g);
    out.ap[cat] = ap;
    const auto ct = counts.find(cat);
    const bool rare = ct == counts.end() || ct->second < 25;
    sums[0] += ap;
    ++n[0];
    sums[rare ? 1 : 2] += ap;
    ++n[rare ? 1 : 2];
  }
  if (n[0]) out.full = sums[0] / n[0];
  if (n[1]) out.rare = sums[1] / n[1];
  if (n[2]) out.nonrare = sums[2] / n[2];
  for (const auto& [p, g] : gt_pred) {
    const auto it = by_pred.find(p);
    const auto flags = it == by_pred.end() ? std::vector<bool>{} : ordered_flags(it->second);
    out.predicate_ap[p] = average_precision(flags, g);
  }
  return out;
}

namespace {

double tube_overlap(const Trajectory& a, const Trajectory& b) {
  const int first = a.start_frame < b.start_frame ? a.start_frame : b.start_frame;
  const int last_a = a.start_frame + static_cast<int>(a.boxes.size());
  const int last_b = b.start_frame + static_cast<int>(b.boxes.size());
  const int last = last_a > last_b ? last_a : last_b;
  double inter = 0.0, uni = 0.0;
  for (int f = first; f < last; ++f) {
    const BoundingBox* ba = nullptr;
    const BoundingBox* bb = nullptr;
    if (f >= a.start_frame && f < last_a && a.boxes[static_cast<size_t>(f - a.start_frame)]) {
      ba = &*a.boxes[static_cast<size_t>(f - a.start_frame)];
    }
    if (f >= b.start_frame && f < last_b && b.boxes[static_cast<size_t>(f - b.start_frame)]) {
      bb = &*b.boxes[static_cast<size_t>(f - b.start_frame)];
    }
    if (ba && bb) {
      const double l = ba->x0 > bb->x0 ? ba->x0 : bb->x0;
      const double r = ba->x1 < bb->x1 ? ba->x1 : bb->x1;
      const double t = ba->y0 > bb->y0 ? ba->y0 : bb->y0;
      const double d = ba->y1 < bb->y1 ? ba->y1 : bb->y1;
      const double i = (r > l && d > t) ? (r - l) * (d - t) : 0.0;
      inter += i;
      uni += box_area(*ba) + box_area(*bb) - i;
    } else if (ba) {
      uni += box_area(*ba);
    } else if (bb) {
      uni += box_area(*bb);
    }
  }
  return uni > 0.0 ? inter / uni : 0.0;
}

// Greedy matching over the first `k` ranked predictions; returns per-rank TP
// flags and the number of ground truths hit.
std::pair<std::vector<bool>, int> vid_greedy(const VideoRelations& v,
                                             const std::vector<int>& pos, int k) {
  std::vector<bool> used(v.gt.size(), false);
  std::vector<bool> tp;
  int hit = 0;
  const int n = static_cast<int>(v.predictions.size());
  for (int p = 0; p < k && p < n; ++p) {
    size_t i = 0;
    while (pos[i] != p) ++i;
    const auto& pr = v.predictions[i];
    double best = -1.0;
    size_t best_g = v.gt.size();
    for (size_t g = 0; g < v.gt.size(); ++g) {
      const auto& t = v.gt[g];
      if (used[g]) continue;
      if (t.triplet.subj != pr.triplet.subj || t.triplet.pred != pr.triplet.pred ||
          t.triplet.obj != pr.triplet.obj) {
        continue;
      }
      const double s = tube_overlap(pr.subj, t.subj);
      const double o = tube_overlap(pr.obj, t.obj);
      if (s < 0.5 || o < 0.5) continue;
      const double m = s < o ? s : o;
      if (m > best) {
        best = m;
        best_g = g;
      }
    }
    if (best_g < v.gt.size()) {
      used[best_g] = true;
      ++hit;
      tp.push_back(true);
    } else {
      tp.push_back(false);
    }
  }
  return {tp, hit};
}

}  // namespace

VidOracleResult vidvrd_metrics(std::span<const VideoRelations> videos,
                               std::span<const int> detection_ks,
                               std::span<const int> tagging_ks) {
  if (static_cast<int>(videos.size()) > kMaxImages) refuse("too many videos");
  VidOracleResult out;
  out.recall.assign(detection_ks.size(), 0.0);
  out.precision.assign(tagging_ks.size(), 0.0);
  int counted = 0;
  std::map<RelationTriplet, std::vector<PooledEntry>> pooled;
  std::map<RelationTriplet, std::size_t> gt_count;
  for (size_t vi = 0; vi < videos.size(); ++vi) {
    const auto& v = videos[vi];
    if (static_cast<int>(v.predictions.size()) > kMaxDetections) refuse("too many predictions");
    for (const auto& g : v.gt) ++gt_count[g.triplet];
    const int n = static_cast<int>(v.predictions.size());
    std::vector<int> pos(static_cast<size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (j != i && (v.predictions[static_cast<size_t>(j)].score >
                           v.predictions[static_cast<size_t>(i)].score ||
                       (v.predictions[static_cast<size_t>(j)].score ==
                            v.predictions[static_cast<size_t>(i)].score &&
                        j < i))) {
          ++pos[static_cast<size_t>(i)];
        }
      }
    }
    const auto [flags, all_hits] = vid_greedy(v, pos, n);
    (void)all_hits;
    for (int p = 0; p < n; ++p) {
      size_t i = 0;
      while (pos[i] != p) ++i;
      pooled[v.predictions[i].triplet].push_back(
          {v.predictions[i].score, static_cast<int>(vi), p, flags[static_cast<size_t>(p)]});
    }
    if (v.gt.empty()) continue;
    ++counted;
    for (size_t ki = 0; ki < detection_ks.size(); ++ki) {
      const int h = vid_greedy(v, pos, detection_ks[ki]).second;
      out.recall[ki] += static_cast<double>(h) / static_cast<double>(v.gt.size());
    }
    // Tagging: distinct labels with their best score, ranked by counting.
    std::vector<RelationTriplet> labels;
    std::vector<double> best;
    for (const auto& p : v.predictions) {
      size_t at = labels.size();
      for (size_t l = 0; l < labels.size(); ++l) {
        if (labels[l] == p.triplet) at = l;
      }
      if (at == labels.size()) {
        labels.push_back(p.triplet);
        best.push_back(p.score);
      } else if (p.score > best[at]) {
        best[at] = p.score;
      }
    }
    for (size_t ki = 0; ki < tagging_ks.size(); ++ki) {
      const int k = tagging_ks[ki];
      int correct = 0;
      for (size_t l = 0; l < labels.size(); ++l) {
        int rank = 0;
        for (size_t m = 0; m < labels.size(); ++m) {
          if (m != l && (best[m] > best[l] || (best[m] == best[l] && m < l))) ++rank;
        }
        if (rank >= k) continue;
        bool in_gt = false;
        for (const auto& g : v.gt) in_gt = in_gt || g.triplet == labels[l];
        if (in_gt) ++correct;
      }
      out.precision[ki] += static_cast<double>(correct) / k;
    }
  }
  if (counted == 0) refuse("no video with ground truth");
  for (auto& r : out.recall) r /= counted;
  for (auto& p : out.precision) p /= counted;
  double sum = 0.0;
  for (const auto& [t, g] : gt_count) {
    const auto it = pooled.find(t);
    const auto flags = it == pooled.end() ? std::vector<bool>{} : ordered_flags(it->second);
    sum += average_precision(flags, g);
  }
  out.map = sum / static_cast<double>(gt_count.size());
  return out;
}

namespace {

constexpr std::uint64_t kTinyStream = 100;

BoundingBox grid_box(CounterRng& rng) {
  static constexpr double kCorners[] = {0, 10, 20, 30};
  static constexpr double kSizes[] = {10, 20, 30};
  const double x = kCorners[rng.below(4)];
  const double y = kCorners[rng.below(4)];
  return {x, y, x + kSizes[rng.below(3)], y + kSizes[rng.below(3)]};
}

// A box near `b`: identical, shifted, stretched to IoU exactly 0.5, or random.
BoundingBox near_box(CounterRng& rng, const BoundingBox& b) {
  switch (rng.below(5)) {
    case 0:
    case 1: return b;
    case 2: return {b.x0 + 1, b.y0, b.x1 + 1, b.y1};
    case 3: return {b.x0, b.y0, b.x1 + (b.x1 - b.x0), b.y1};
    default: return grid_box(rng);
  }
}

}  // namespace

TinySgg random_tiny_sgg(std::uint64_t seed) {
  CounterRng rng(seed, kTinyStream, 0);
  static constexpr double kProbs[] = {0.05, 0.1, 0.15, 0.2};
  static constexpr double kScores[] = {0.5, 0.8, 1.0};
  TinySgg t;
  const int np = rng.between(3, kMaxPredicates);
  std::vector<std::uint64_t> freq;
  for (int r = 0; r < np; ++r) freq.push_back(rng.below(4));
  t.vocab = PredicateVocabulary::numbered(np, freq);
  t.mode = static_cast<EvalMode>(rng.below(3));
  const int images = rng.between(1, kMaxImages);
  for (int i = 0; i < images; ++i) {
    SggSample s;
    s.gt.image_id = "img" + std::to_string(i);
    s.gt.width = 100;
    s.gt.height = 100;
    const int n = rng.between(2, kMaxObjects);
    for (int o = 0; o < n; ++o) {
      s.gt.objects.push_back({grid_box(rng), static_cast<int>(rng.below(3)), 1.0});
    }
    const int rels = rng.between(i == 0 ? 1 : 0, 4);
    std::set<RelationTriple> seen;
    for (int r = 0; r < rels; ++r) {
      const int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
      if (b >= a) ++b;
      const RelationTriple rel{a, rng.between(1, np), b};
      if (seen.insert(rel).second) s.gt.relations.push_back(rel);
    }
    s.predictions.image_id = s.gt.image_id;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        if (a == b || rng.bernoulli(0.2)) continue;
        PairPrediction p;
        p.subj = s.gt.objects[static_cast<size_t>(a)];
        p.obj = s.gt.objects[static_cast<size_t>(b)];
        p.subj_index = a;
        p.obj_index = b;
        if (t.mode != EvalMode::kPredCls) {
          p.subj.score = kScores[rng.below(3)];
          p.obj.score = kScores[rng.below(3)];
          if (rng.bernoulli(0.2)) p.subj.label = static_cast<int>(rng.below(3));
          if (rng.bernoulli(0.2)) p.obj.label = static_cast<int>(rng.below(3));
        }
        if (t.mode == EvalMode::kSGDet) {
          p.subj.box = near_box(rng, p.subj.box);
          p.obj.box = near_box(rng, p.obj.box);
        }
        for (int r = 0; r < np; ++r) p.pred_probs.push_back(kProbs[rng.below(4)]);
        s.predictions.pairs.push_back(std::move(p));
      }
    }
    t.images.push_back(std::move(s));
  }
  return t;
}

TinyHoi random_tiny_hoi(std::uint64_t seed) {
  CounterRng rng(seed, kTinyStream, 1);
  static constexpr double kScores[] = {0.1, 0.5, 0.9};
  TinyHoi t;
  t.num_interactions = rng.between(2, 3);
  const int frames = rng.between(1, kMaxImages);
  for (int f = 0; f < frames; ++f) {
    HoiSample s;
    s.gt.video_id = "vid" + std::to_string(f / 2);
    s.gt.frame = f;
    const int gts = rng.between(f == 0 ? 1 : 0, 2);
    for (int g = 0; g < gts; ++g) {
      HoiGroundTruth h;
      h.human = grid_box(rng);
      h.object = grid_box(rng);
      h.object_label = static_cast<int>(rng.below(2));
      for (int c = 0; c < t.num_interactions; ++c) {
        if (rng.bernoulli(0.5)) h.interactions.push_back(c);
      }
      if (h.interactions.empty()) h.interactions.push_back(0);
      s.gt.pairs.push_back(std::move(h));
    }
    s.predictions.video_id = s.gt.video_id;
    s.predictions.frame = f;
    const int max_pairs = kMaxDetections / t.num_interactions;
    const int pairs = rng.between(0, max_pairs);
    for (int p = 0; p < pairs; ++p) {
      HoiPairPrediction pr;
      if (!s.gt.pairs.empty() && rng.bernoulli(0.7)) {
        const auto& g = s.gt.pairs[rng.below(s.gt.pairs.size())];
        pr.human = near_box(rng, g.human);
        pr.object = near_box(rng, g.object);
        pr.object_label = rng.bernoulli(0.8) ? g.object_label : static_cast<int>(rng.below(2));
      } else {
        pr.human = grid_box(rng);
        pr.object = grid_box(rng);
        pr.object_label = static_cast<int>(rng.below(2));
      }
      pr.human_score = kScores[rng.below(3)];
      pr.object_score = kScores[rng.below(3)];
      for (int c = 0; c < t.num_interactions; ++c) {
        pr.interaction_scores.push_back(kScores[rng.below(3)]);
      }
      s.predictions.pairs.push_back(std::move(pr));
    }
    t.keyframes.push_back(std::move(s));
  }
  for (int c = 0; c < t.num_interactions; ++c) {
    for (int o = 0; o < 2; ++o) t.counts[{c, o}] = 20 + rng.below(10);
  }
  return t;
}

std::vector<VideoRelations> random_tiny_vidvrd(std::uint64_t seed) {
  CounterRng rng(seed, kTinyStream, 2);
  static constexpr double kScores[] = {0.2, 0.5, 0.8};
  auto tube = [&rng]() {
    Trajectory t;
    t.start_frame = static_cast<int>(rng.below(2));
    const int len = rng.between(1, 3);
    for (int i = 0; i < len; ++i) {
      if (i > 0 && rng.bernoulli(0.2)) {
        t.boxes.emplace_back(std::nullopt);
      } else {
        t.boxes.emplace_back(grid_box(rng));
      }
    }
    return t;
  };
  auto perturb = [&rng](const Trajectory& t) {
    Trajectory o = t;
    for (auto& b : o.boxes) {
      if (b) *b = near_box(rng, *b);
    }
    if (rng.bernoulli(0.2)) o.start_frame += 1;
    return o;
  };
  std::vector<VideoRelations> out;
  const int videos = rng.between(1, kMaxImages);
  for (int v = 0; v < videos; ++v) {
    VideoRelations vr;
    vr.video_id = "v" + std::to_string(v);
    const int gts = rng.between(v == 0 ? 1 : 0, 2);
    for (int g = 0; g < gts; ++g) {
      RelationInstance r;
      r.triplet = {static_cast<int>(rng.below(2)), static_cast<int>(rng.below(2)),
                   static_cast<int>(rng.below(2))};
      r.subj = tube();
      r.obj = tube();
      vr.gt.push_back(std::move(r));
    }
    const int preds = rng.between(0, kMaxDetections);
    for (int p = 0; p < preds; ++p) {
      RelationInstance r;
      if (!vr.gt.empty() && rng.bernoulli(0.7)) {
        const auto& g = vr.gt[rng.below(vr.gt.size())];
        r.triplet = g.triplet;
        if (rng.bernoulli(0.2)) r.triplet.pred = 1 - r.triplet.pred;
        r.subj = perturb(g.subj);
        r.obj = perturb(g.obj);
      } else {
        r.triplet = {static_cast<int>(rng.below(2)), static_cast<int>(rng.below(2)),
                     static_cast<int>(rng.below(2))};
        r.subj = tube();
        r.obj = tube();
      }
      r.score = kScores[rng.below(3)];
      vr.predictions.push_back(std::move(r));
    }
    out.push_back(std::move(vr));
  }
  return out;
}

}  // namespace sgpu::oracle
