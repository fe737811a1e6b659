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
#include <cstdlib>
#include <map>

#include "doctest.h"
#include "sgpu/commands.hpp"
#include "sgpu/error.hpp"
#include "sgpu/io.hpp"
#include "sgpu/oracle.hpp"
#include "sgpu/report.hpp"
#include "sgpu/scar_sim.hpp"
#include "support.hpp"

using namespace sgpu;
using sgpu::testing::TempDir;

namespace {

const Path kData = SGPU_TEST_DATA;

// Compares `produced` against the committed file, or rewrites it when
// SGPU_UPDATE_GOLDEN is set.
void check_golden(const Path& produced, const Path& expected) {
  if (std::getenv("SGPU_UPDATE_GOLDEN")) {
    std::filesystem::create_directories(expected.parent_path());
    io::write_file(expected, io::read_file(produced));
  }
  INFO(expected.string());
  CHECK(io::read_file(produced) == io::read_file(expected));
}

bool close(const io::Json& v, std::optional<double> ref) {
  if (!ref) return v.is_null();
  return !v.is_null() && std::abs(v.get<double>() - *ref) <= 1e-12;
}

}  // namespace

TEST_CASE("parse_int_list") {
  CHECK(parse_int_list("20,50,100") == std::vector<int>{20, 50, 100});
  CHECK(parse_int_list("7") == std::vector<int>{7});
  CHECK_THROWS_AS(parse_int_list(""), UsageError);
  CHECK_THROWS_AS(parse_int_list("20,,50"), UsageError);
  CHECK_THROWS_AS(parse_int_list("0"), UsageError);
  CHECK_THROWS_AS(parse_int_list("5x"), UsageError);
}

TEST_CASE("golden scene-graph report") {
  TempDir out("golden_sgg");
  EvalSggOptions o;
  o.gt = kData / "golden_sgg" / "gt.jsonl";
  o.preds = kData / "golden_sgg" / "preds.jsonl";
  o.mode = EvalMode::kSGCls;
  o.ks = {1, 3, 5};
  o.vocab = kData / "golden_sgg" / "vocab.json";
  o.freq = kData / "golden_sgg" / "freq.json";
  o.out = out.path();
  run_eval_sgg(o);
  for (const char* f : {"report.json", "per_class_recall.csv", "label_freq.csv"}) {
    check_golden(out / f, kData / "golden_sgg" / "expected" / f);
  }

  const auto gt = io::load_ground_truth(o.gt);
  const auto preds = io::load_predictions(o.preds, 5);
  std::vector<SggSample> samples;
  for (size_t i = 0; i < gt.size(); ++i) samples.push_back({gt[i], preds[i]});
  const auto vocab = io::read_vocabulary(*o.vocab);
  const auto ref = oracle::sgg_metrics(samples, vocab, o.mode, o.ks);
  const auto report = io::Json::parse(io::read_file(out / "report.json"))["metrics"];
  for (size_t i = 0; i < o.ks.size(); ++i) {
    for (const auto& [key, rows] :
         {std::pair{"graph_constraint", &ref.constrained}, std::pair{"no_graph_constraint", &ref.unconstrained}}) {
      const auto& row = report[key][i];
      const auto& r = (*rows)[i];
      CHECK(close(row["recall"], r.recall));
      CHECK(close(row["mean_recall"], r.mean_recall));
      CHECK(close(row["head"], r.head));
      CHECK(close(row["middle"], r.middle));
      CHECK(close(row["tail"], r.tail));
      for (size_t c = 0; c < r.per_class.size(); ++c) CHECK(close(row["per_class"][c], r.per_class[c]));
    }
  }
}

TEST_CASE("golden HOI report") {
  TempDir out("golden_hoi");
  EvalHoiOptions o;
  o.gt = kData / "golden_hoi" / "gt.jsonl";
  o.preds = kData / "golden_hoi" / "preds.jsonl";
  o.temporal_tags = kData / "golden_hoi" / "temporal_tags.csv";
  o.category_counts = kData / "golden_hoi" / "category_counts.csv";
  o.out = out.path();
  run_eval_hoi(o);
  for (const char* f : {"report.json", "ap_per_category.csv"}) {
    check_golden(out / f, kData / "golden_hoi" / "expected" / f);
  }

  const auto gt = io::load_keyframe_annotations(o.gt);
  const auto preds = io::load_keyframe_predictions(o.preds);
  std::vector<HoiSample> samples;
  for (size_t i = 0; i < gt.size(); ++i) samples.push_back({gt[i], preds[i]});
  const auto ref = oracle::hoi_metrics(samples, io::read_category_counts(*o.category_counts));
  const auto m = io::Json::parse(io::read_file(out / "report.json"))["metrics"];
  CHECK(close(m["splits"]["full"]["map"], ref.full));
  CHECK(close(m["splits"]["rare"]["map"], ref.rare));
  CHECK(close(m["splits"]["nonrare"]["map"], ref.nonrare));
  for (const auto& row : m["predicate_ap"]) {
    CHECK(close(row["ap"], ref.predicate_ap.at(row["predicate"].get<int>())));
  }
}

TEST_CASE("file pipeline equals the in-process computation") {
  TempDir dir("pipeline");
  auto config = SimConfig::illustrative(6, 5);
  config.label_mode = LabelMode::kStochastic;
  config.train_images = 30;
  config.test_images = 15;
  config.max_objects = 5;
  io::write_file(dir / "config.json", io::sim_config_to_json(config).dump());

  SimulateOptions sim;
  sim.config = dir / "config.json";
  sim.out = dir / "sim";
  run_simulate(sim);

  EstimateOptions est;
  est.gt = dir / "sim" / "gt.jsonl";
  est.preds = dir / "sim" / "trace.jsonl";
  est.out = dir / "freq.json";
  const auto file_est = run_estimate(est);

  const auto corpus = render_scene_corpus(config);
  std::map<std::string, const SceneGraph*> by_id;
  for (const auto& s : corpus.train) by_id[s.annotated.image_id] = &s.annotated;
  DlfeState state(6, 0.1);
  std::vector<ValidExample> batch;
  std::optional<std::int64_t> current;
  for (const auto& rec : corpus.trace) {
    if (current != rec.batch_id) {
      if (current) state.update(batch);
      batch.clear();
      current = rec.batch_id;
    }
    const auto v = match_valid_pairs(rec, *by_id.at(rec.image_id));
    batch.insert(batch.end(), v.begin(), v.end());
  }
  state.update(batch);
  auto mem_est = dlfe_finalize(state);
  if (!mem_est.complete()) mem_est = fill_missing(mem_est);
  for (int r = 0; r < 6; ++r) CHECK(std::abs(*mem_est.c[r] - *file_est.c[r]) <= 1e-9);
  CHECK(mem_est.valid_counts == file_est.valid_counts);

  DebiasOptions deb;
  deb.preds = dir / "sim" / "test_preds.jsonl";
  deb.freq = dir / "freq.json";
  deb.out = dir / "recovered.jsonl";
  CHECK(run_debias(deb) == corpus.test.size());
  DebiasOptions twice = deb;
  twice.preds = deb.out;
  twice.out = dir / "twice.jsonl";
  CHECK_THROWS_AS(run_debias(twice), DataError);
  const auto recovered = io::load_predictions(deb.out, 6);
  SggEvaluator ev(6, EvalMode::kPredCls, {20, 50, 100}, GraphConstraint::kBoth);
  for (size_t i = 0; i < corpus.test.size(); ++i) {
    const auto mem = recover_unbiased(corpus.test[i].predictions, mem_est, true);
    for (size_t p = 0; p < mem.pairs.size(); ++p) {
      for (int r = 0; r < 6; ++r) {
        CHECK(std::abs(mem.pairs[p].pred_probs[r] - recovered[i].pairs[p].pred_probs[r]) <= 1e-9);
      }
    }
    ev.add(ev.evaluate(corpus.test[i].full, mem));
  }
  const auto mem_report = ev.report(corpus.vocab);

  EvalSggOptions eval;
  eval.gt = dir / "sim" / "test_gt_full.jsonl";
  eval.preds = deb.out;
  eval.vocab = dir / "sim" / "vocab.json";
  eval.out = dir / "report";
  eval.threads = 3;
  const auto file_report = run_eval_sgg(eval);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(file_report.constrained[i].recall - mem_report.constrained[i].recall) <= 1e-9);
    CHECK(std::abs(file_report.unconstrained[i].mean_recall -
                   mem_report.unconstrained[i].mean_recall) <= 1e-9);
  }
}

TEST_CASE("lenient evaluation counts skipped records") {
  TempDir dir("lenient");
  const auto gt = io::read_file(kData / "golden_sgg" / "gt.jsonl");
  io::write_file(dir / "gt.jsonl",
                 gt + R"({"image_id":"bad","width":10,"height":10,"objects":[{"box":[0,0,1,1],"label":0}],"relations":[[0,1,3]]})" "\n");
  EvalSggOptions o;
  o.gt = dir / "gt.jsonl";
  o.preds = kData / "golden_sgg" / "preds.jsonl";
  o.out = dir / "out";
  CHECK_THROWS_AS(run_eval_sgg(o), DataError);
  o.lenient = true;
  run_eval_sgg(o);
  const auto m = io::Json::parse(io::read_file(dir / "out" / "report.json"))["metrics"];
  CHECK(m["ground_truth"]["skipped"] == 1);
  CHECK(m["ground_truth"]["records"] == 3);
}

TEST_CASE("video relation report") {
  TempDir dir("vid");
  io::write_file(dir / "gt.jsonl",
                 R"({"video_id":"v","relations":[{"triplet":[0,1,2],"subj":{"start":0,"boxes":[[0,0,10,10],[0,0,10,10]]},"obj":{"start":0,"boxes":[[20,0,30,10],null]}}]})" "\n");
  io::write_file(dir / "preds.jsonl",
                 R"({"video_id":"v","relations":[{"triplet":[0,1,2],"score":0.9,"subj":{"start":0,"boxes":[[0,0,10,10],[0,0,10,10]]},"obj":{"start":0,"boxes":[[20,0,30,10],null]}},)"
                 R"({"triplet":[0,3,2],"score":0.8,"subj":{"start":0,"boxes":[[0,0,10,10]]},"obj":{"start":0,"boxes":[[20,0,30,10]]}}]})" "\n");
  EvalVidvrdOptions o;
  o.gt = dir / "gt.jsonl";
  o.preds = dir / "preds.jsonl";
  o.ks = {1, 2};
  o.tag_ks = {1, 2};
  o.out = dir / "out";
  run_eval_vidvrd(o);
  const auto m = io::Json::parse(io::read_file(dir / "out" / "report.json"))["metrics"];
  CHECK(m["detection"]["recall"][0]["recall"] == 1.0);
  CHECK(m["detection"]["map"] == 1.0);
  CHECK(m["tagging"][0]["precision"] == 1.0);
  CHECK(m["tagging"][1]["precision"] == 0.5);
}
