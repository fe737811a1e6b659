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

#ifndef SGPU_COMMANDS_HPP_
#define SGPU_COMMANDS_HPP_

// The command-line operations as library calls. Each reads its inputs from
// files and writes its outputs to files; results do not depend on `threads`.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sgpu/hoi_metrics.hpp"
#include "sgpu/pu.hpp"
#include "sgpu/sgg_metrics.hpp"

namespace sgpu {

using Path = std::filesystem::path;

struct SimulateOptions {
  std::optional<Path> config;  // JSON; illustrative defaults when absent
  Path out;
  std::optional<std::uint64_t> seed;  // overrides the config's seed
  int threads = 1;
};

// Writes gt.jsonl, gt_full.jsonl, trace.jsonl, test_gt.jsonl,
// test_gt_full.jsonl, test_preds.jsonl, test_bayes.jsonl, vocab.json and
// sim_config.json into `out`.
void run_simulate(const SimulateOptions& options);

struct EstimateOptions {
  Estimator method = Estimator::kDlfe;
  double alpha = 0.1;
  Path gt;
  Path preds;
  std::string mode = "predcls";
  Path out;
  bool fill = true;  // replace unset classes by the median of the others
  bool lenient = false;
  int threads = 1;
};

LabelFrequencyEstimate run_estimate(const EstimateOptions& options);

struct DebiasOptions {
  Path preds;
  Path freq;
  bool renormalize = true;
  Path out;
  bool lenient = false;
  int threads = 1;
};

// Returns the number of records written.
std::size_t run_debias(const DebiasOptions& options);

struct EvalSggOptions {
  Path gt;
  Path preds;
  EvalMode mode = EvalMode::kPredCls;
  std::vector<int> ks = {20, 50, 100};
  GraphConstraint graph_constraint = GraphConstraint::kBoth;
  std::optional<Path> vocab;
  std::optional<Path> freq;  // echoed into label_freq.csv
  Path out;
  bool lenient = false;
  int threads = 1;
};

RecallReport run_eval_sgg(const EvalSggOptions& options);

struct EvalHoiOptions {
  Path gt;
  Path preds;
  std::vector<HoiSplit> splits = {HoiSplit::kFull, HoiSplit::kRare, HoiSplit::kNonRare};
  std::optional<Path> temporal_tags;
  std::optional<Path> category_counts;  // defaults to counts in `gt`
  Path out;
};

void run_eval_hoi(const EvalHoiOptions& options);

struct EvalVidvrdOptions {
  Path gt;
  Path preds;
  std::vector<int> ks = {50, 100};
  std::vector<int> tag_ks = {1, 5, 10};
  Path out;
};

void run_eval_vidvrd(const EvalVidvrdOptions& options);

// "20,50,100" -> {20, 50, 100}; UsageError unless every entry is a positive
// integer and the list is non-empty.
std::vector<int> parse_int_list(const std::string& text);

}  // namespace sgpu

#endif  // SGPU_COMMANDS_HPP_
