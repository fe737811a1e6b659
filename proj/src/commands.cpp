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

#include "sgpu/commands.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <unordered_map>

#include "sgpu/error.hpp"
#include "sgpu/io.hpp"
#include "sgpu/parallel.hpp"
#include "sgpu/report.hpp"
#include "sgpu/scar_sim.hpp"

namespace sgpu {

using io::Json;

namespace {

constexpr std::size_t kChunk = 512;

class LineWriter {
 public:
  explicit LineWriter(const Path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw DataError("cannot write " + path.string());
  }
  void put(const std::string& line) {
    out_ << line << '\n';
    if (!out_) throw DataError("failed writing " + path_.string());
  }
  void close() {
    out_.close();
    if (!out_) throw DataError("failed writing " + path_.string());
  }

 private:
  Path path_;
  std::ofstream out_;
};

template <typename T, typename Fn>
void write_lines(const Path& path, const std::vector<T>& items, Fn&& fn) {
  LineWriter w(path);
  for (const auto& item : items) w.put(fn(item));
  w.close();
}

void require_threads(int threads) {
  if (threads < 1) throw UsageError("--threads must be at least 1");
}

Json load_json_file(const Path& path) {
  try {
    return Json::parse(io::read_file(path));
  } catch (const Json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::unordered_map<std::string, std::size_t> index_by_id(const std::vector<SceneGraph>& gt) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!index.emplace(gt[i].image_id, i).second) {
      throw DataError("duplicate image_id '" + gt[i].image_id + "' in ground truth");
    }
  }
  return index;
}

Json stats_json(const io::LoadStats& s) {
  return {{"records", s.records}, {"skipped", s.skipped}};
}

}  // namespace

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    int v = 0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size() || v < 1) {
      throw UsageError("'" + text + "' is not a list of positive integers");
    }
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

void run_simulate(const SimulateOptions& options) {
  require_threads(options.threads);
  SimConfig config = options.config ? io::sim_config_from_json(load_json_file(*options.config))
                                    : SimConfig::illustrative(10);
  if (options.seed) config.seed = *options.seed;
  config.check();
  const SceneCorpus corpus = render_scene_corpus(config, options.threads);

  std::error_code ec;
  std::filesystem::create_directories(options.out, ec);
  if (ec) throw DataError("cannot create " + options.out.string() + ": " + ec.message());
  const auto& out = options.out;
  write_lines(out / "gt.jsonl", corpus.train,
              [](const RenderedScene& s) { return io::scene_graph_to_line(s.annotated); });
  write_lines(out / "gt_full.jsonl", corpus.train,
              [](const RenderedScene& s) { return io::scene_graph_to_line(s.full); });
  write_lines(out / "trace.jsonl", corpus.trace,
              [](const ImagePredictions& p) { return io::predictions_to_line(p); });
  write_lines(out / "test_gt.jsonl", corpus.test,
              [](const RenderedScene& s) { return io::scene_graph_to_line(s.annotated); });
  write_lines(out / "test_gt_full.jsonl", corpus.test,
              [](const RenderedScene& s) { return io::scene_graph_to_line(s.full); });
  write_lines(out / "test_preds.jsonl", corpus.test,
              [](const RenderedScene& s) { return io::predictions_to_line(s.predictions); });
  write_lines(out / "test_bayes.jsonl", corpus.test,
              [](const RenderedScene& s) { return io::predictions_to_line(s.bayes); });
  io::write_file(out / "vocab.json", io::vocabulary_to_json(corpus.vocab));
  io::write_file(out / "sim_config.json", io::sim_config_to_json(config).dump(2) + "\n");
}

LabelFrequencyEstimate run_estimate(const EstimateOptions& options) {
  require_threads(options.threads);
  if (options.method == Estimator::kDlfe && !(options.alpha > 0.0 && options.alpha <= 1.0)) {
    throw UsageError("--alpha must lie in (0, 1]");
  }
  const auto k = io::peek_num_predicates(options.preds);
  if (!k) throw DataError(options.preds.string() + ": no predictions");

  io::LoadOptions gt_options;
  gt_options.lenient = options.lenient;
  gt_options.limits.num_predicates = *k;
  const auto gt = io::load_ground_truth(options.gt, gt_options);
  const auto index = index_by_id(gt);

  std::vector<ValidExample> all;
  DlfeState state(*k, options.method == Estimator::kDlfe ? options.alpha : 1.0);
  std::vector<ValidExample> batch;
  std::optional<std::int64_t> batch_id;
  const auto flush_batch = [&] {
    if (batch_id) state.update(batch);
    batch.clear();
  };

  std::vector<ImagePredictions> chunk;
  const auto process = [&] {
    const auto matched = parallel_map(chunk.size(), options.threads, [&](std::size_t i) {
      const auto it = index.find(chunk[i].image_id);
      if (it == index.end()) return std::vector<ValidExample>{};
      return match_valid_pairs(chunk[i], gt[it->second]);
    });
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      if (options.method == Estimator::kTrainEst) {
        all.insert(all.end(), matched[i].begin(), matched[i].end());
        continue;
      }
      const auto& id = chunk[i].batch_id;
      if (!id) throw DataError("record '" + chunk[i].image_id + "' has no batch_id");
      if (batch_id != id) {
        flush_batch();
        batch_id = id;
      }
      batch.insert(batch.end(), matched[i].begin(), matched[i].end());
    }
    chunk.clear();
  };
  io::PredictionOptions pred_options;
  pred_options.lenient = options.lenient;
  io::for_each_prediction(options.preds, *k, pred_options, [&](ImagePredictions&& p) {
    chunk.push_back(std::move(p));
    if (chunk.size() == kChunk) process();
  });
  process();
  flush_batch();

  LabelFrequencyEstimate est =
      options.method == Estimator::kTrainEst ? train_est(all, *k) : dlfe_finalize(state);
  est.mode = options.mode;
  if (options.fill && !est.complete()) est = fill_missing(est);
  io::write_label_frequency(options.out, est);
  return est;
}

std::size_t run_debias(const DebiasOptions& options) {
  require_threads(options.threads);
  const auto freq = io::read_label_frequency(options.freq);
  io::PredictionOptions pred_options;
  pred_options.lenient = options.lenient;
  LineWriter out(options.out);
  std::size_t written = 0;
  std::vector<ImagePredictions> chunk;
  const auto process = [&] {
    const auto lines = parallel_map(chunk.size(), options.threads, [&](std::size_t i) {
      return io::predictions_to_line(recover_unbiased(chunk[i], freq, options.renormalize));
    });
    for (const auto& line : lines) out.put(line);
    written += lines.size();
    chunk.clear();
  };
  io::for_each_prediction(options.preds, freq.size(), pred_options, [&](ImagePredictions&& p) {
    if (!p.pairs.empty() && p.pairs.front().recovered) {
      throw DataError(options.preds.string() + ": image " + p.image_id +
                      " is already recovered; debias expects biased predictions");
    }
    chunk.push_back(std::move(p));
    if (chunk.size() == kChunk) process();
  });
  process();
  out.close();
  return written;
}

RecallReport run_eval_sgg(const EvalSggOptions& options) {
  require_threads(options.threads);
  std::optional<PredicateVocabulary> vocab;
  if (options.vocab) vocab = io::read_vocabulary(*options.vocab);
  std::optional<int> k;
  if (vocab) {
    k = vocab->size();
  } else {
    k = io::peek_num_predicates(options.preds);
  }
  if (!k) throw DataError("cannot infer the number of predicates; pass --vocab");

  io::LoadOptions gt_options;
  gt_options.lenient = options.lenient;
  gt_options.limits.num_predicates = *k;
  io::LoadStats gt_stats;
  const auto gt = io::load_ground_truth(options.gt, gt_options, &gt_stats);
  const auto index = index_by_id(gt);

  io::PredictionOptions pred_options;
  pred_options.lenient = options.lenient;
  std::vector<std::optional<ImagePredictions>> preds(gt.size());
  std::size_t unmatched = 0;
  const auto pred_stats =
      io::for_each_prediction(options.preds, *k, pred_options, [&](ImagePredictions&& p) {
        const auto it = index.find(p.image_id);
        if (it == index.end()) {
          ++unmatched;
          return;
        }
        if (preds[it->second]) {
          throw DataError("duplicate image_id '" + p.image_id + "' in predictions");
        }
        preds[it->second] = std::move(p);
      });

  if (!vocab) {
    std::vector<std::uint64_t> freq(static_cast<std::size_t>(*k), 0);
    for (const auto& g : gt) {
      for (const auto& r : g.relations) ++freq[static_cast<std::size_t>(r.pred - 1)];
    }
    vocab = PredicateVocabulary::numbered(*k, std::move(freq));
  }

  SggEvaluator evaluator(*k, options.mode, options.ks, options.graph_constraint);
  for (std::size_t start = 0; start < gt.size(); start += kChunk) {
    const std::size_t n = std::min(kChunk, gt.size() - start);
    const auto results = parallel_map(n, options.threads, [&](std::size_t i) {
      const auto& g = gt[start + i];
      const auto& p = preds[start + i];
      return evaluator.evaluate(g, p ? *p : ImagePredictions{g.image_id, std::nullopt, {}});
    });
    for (const auto& r : results) evaluator.add(r);
  }
  const RecallReport report = evaluator.report(*vocab);

  std::optional<LabelFrequencyEstimate> freq;
  if (options.freq) freq = io::read_label_frequency(*options.freq);

  ReportBundle bundle;
  bundle.metadata.command = "eval-sgg";
  bundle.metadata.config = {
      {"mode", to_string(options.mode)},
      {"ks", options.ks},
      {"graph_constraint", options.graph_constraint == GraphConstraint::kOn    ? "on"
                           : options.graph_constraint == GraphConstraint::kOff ? "off"
                                                                                : "both"},
      {"lenient", options.lenient},
      {"frequency_source", options.vocab ? "vocab" : "ground_truth"}};
  bundle.metadata.inputs.push_back(digest_input("gt", options.gt));
  bundle.metadata.inputs.push_back(digest_input("preds", options.preds));
  if (options.vocab) bundle.metadata.inputs.push_back(digest_input("vocab", *options.vocab));
  if (options.freq) bundle.metadata.inputs.push_back(digest_input("freq", *options.freq));
  bundle.metrics = sgg_metrics_json(report);
  bundle.metrics["ground_truth"] = stats_json(gt_stats);
  bundle.metrics["predictions"] = stats_json(pred_stats);
  bundle.metrics["predictions"]["unmatched"] = unmatched;
  bundle.tables.emplace_back("per_class_recall.csv", per_class_recall_csv(&report, *vocab));
  bundle.tables.emplace_back("label_freq.csv", label_freq_csv(freq ? &*freq : nullptr));
  write_reports(bundle, options.out);
  return report;
}

namespace {

std::string keyframe_key(const std::string& video, int frame) {
  return video + "\n" + std::to_string(frame);
}

}  // namespace

void run_eval_hoi(const EvalHoiOptions& options) {
  if (options.splits.empty()) throw UsageError("--splits must not be empty");
  const auto gt = io::load_keyframe_annotations(options.gt);
  const auto preds = io::load_keyframe_predictions(options.preds);
  std::unordered_map<std::string, std::size_t> index;
  std::vector<HoiSample> samples(gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!index.emplace(keyframe_key(gt[i].video_id, gt[i].frame), i).second) {
      throw DataError("duplicate keyframe " + gt[i].video_id + "@" +
                      std::to_string(gt[i].frame) + " in ground truth");
    }
    samples[i].gt = gt[i];
    samples[i].predictions.video_id = gt[i].video_id;
    samples[i].predictions.frame = gt[i].frame;
  }
  std::vector<bool> seen(gt.size(), false);
  std::size_t unmatched = 0;
  for (const auto& p : preds) {
    const auto it = index.find(keyframe_key(p.video_id, p.frame));
    if (it == index.end()) {
      ++unmatched;
      continue;
    }
    if (seen[it->second]) {
      throw DataError("duplicate keyframe " + p.video_id + "@" + std::to_string(p.frame) +
                      " in predictions");
    }
    seen[it->second] = true;
    samples[it->second].predictions = p;
  }

  HoiReport report;
  report.counts = options.category_counts
                      ? CategorySplit{io::read_category_counts(*options.category_counts)}
                      : CategorySplit::from_annotations(gt);
  const HoiEvaluation eval = evaluate_hoi(samples);
  for (const auto split : options.splits) {
    std::optional<HoiMapResult> m;
    try {
      m = hoi_map(eval, split, report.counts);
    } catch (const DataError&) {
      if (split == HoiSplit::kFull) throw;
    }
    report.splits.emplace_back(split, std::move(m));
  }
  report.predicate_ap = predicate_ap(eval);
  if (options.temporal_tags) {
    report.temporal_spatial = temporal_spatial_map(eval, io::read_temporal_tags(*options.temporal_tags));
  }

  ReportBundle bundle;
  bundle.metadata.command = "eval-hoi";
  Json splits = Json::array();
  for (const auto s : options.splits) splits.push_back(to_string(s));
  bundle.metadata.config = {{"splits", splits}, {"cap", kKeyframeDetectionCap}};
  bundle.metadata.inputs.push_back(digest_input("gt", options.gt));
  bundle.metadata.inputs.push_back(digest_input("preds", options.preds));
  if (options.temporal_tags) {
    bundle.metadata.inputs.push_back(digest_input("temporal_tags", *options.temporal_tags));
  }
  if (options.category_counts) {
    bundle.metadata.inputs.push_back(digest_input("category_counts", *options.category_counts));
  }
  bundle.metrics = hoi_metrics_json(report);
  bundle.metrics["keyframes"] = gt.size();
  bundle.metrics["unmatched_predictions"] = unmatched;
  bundle.tables.emplace_back("ap_per_category.csv", ap_per_category_csv(&report));
  write_reports(bundle, options.out);
}

void run_eval_vidvrd(const EvalVidvrdOptions& options) {
  const auto gt = io::load_video_relations(options.gt, false);
  const auto preds = io::load_video_relations(options.preds, true);
  std::unordered_map<std::string, std::size_t> index;
  std::vector<VideoRelations> videos(gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!index.emplace(gt[i].first, i).second) {
      throw DataError("duplicate video_id '" + gt[i].first + "' in ground truth");
    }
    videos[i].video_id = gt[i].first;
    videos[i].gt = gt[i].second;
  }
  std::vector<bool> seen(gt.size(), false);
  std::size_t unmatched = 0;
  for (const auto& [id, rel] : preds) {
    const auto it = index.find(id);
    if (it == index.end()) {
      ++unmatched;
      continue;
    }
    if (seen[it->second]) throw DataError("duplicate video_id '" + id + "' in predictions");
    seen[it->second] = true;
    videos[it->second].predictions = rel;
  }
  const auto detection = relation_detection_eval(videos, options.ks);
  const auto tagging = relation_tagging_precision(videos, options.tag_ks);

  ReportBundle bundle;
  bundle.metadata.command = "eval-vidvrd";
  bundle.metadata.config = {{"ks", options.ks}, {"tag_ks", options.tag_ks}};
  bundle.metadata.inputs.push_back(digest_input("gt", options.gt));
  bundle.metadata.inputs.push_back(digest_input("preds", options.preds));
  bundle.metrics = vidvrd_metrics_json(detection, tagging);
  bundle.metrics["videos"] = videos.size();
  bundle.metrics["unmatched_predictions"] = unmatched;
  write_reports(bundle, options.out);
}

}  // namespace sgpu
