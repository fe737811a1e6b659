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

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "sgpu/commands.hpp"
#include "sgpu/error.hpp"
#include "sgpu/report.hpp"

namespace {

using sgpu::ExitCode;

int code(ExitCode c) { return static_cast<int>(c); }

int default_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

std::vector<sgpu::HoiSplit> parse_splits(const std::string& text) {
  std::vector<sgpu::HoiSplit> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = std::min(text.find(',', pos), text.size());
    out.push_back(sgpu::hoi_split_from_string(text.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scene-graph evaluation and label-frequency debiasing"};
  app.set_version_flag("--version", std::string(sgpu::tool_version()));
  app.require_subcommand(1);
  int threads = default_threads();
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  sgpu::SimulateOptions sim;
  std::string sim_config;
  std::uint64_t sim_seed = 0;
  auto* simulate = app.add_subcommand("simulate", "Render a synthetic SCAR corpus");
  simulate->add_option("--config", sim_config, "Simulation config (JSON)")->check(CLI::ExistingFile);
  simulate->add_option("--out", sim.out, "Output directory")->required();
  auto* seed_opt = simulate->add_option("--seed", sim_seed, "Random seed");

  sgpu::EstimateOptions est;
  std::string method = "dlfe";
  auto* estimate = app.add_subcommand("estimate", "Estimate per-class label frequencies");
  estimate->add_option("--method", method, "dlfe or train-est")
      ->check(CLI::IsMember({"dlfe", "train-est"}));
  estimate->add_option("--alpha", est.alpha, "DLFE momentum");
  estimate->add_option("--gt", est.gt, "Annotated training scene graphs")
      ->required()->check(CLI::ExistingFile);
  estimate->add_option("--preds", est.preds, "Biased predictions (training trace)")
      ->required()->check(CLI::ExistingFile);
  estimate->add_option("--mode", est.mode, "Evaluation setting tag")
      ->check(CLI::IsMember({"predcls", "sgcls", "sgdet"}));
  estimate->add_option("--out", est.out, "Output freq.json")->required();
  bool no_fill = false;
  estimate->add_flag("--no-fill", no_fill, "Leave classes without valid examples unset");
  estimate->add_flag("--lenient", est.lenient, "Skip invalid records");

  sgpu::DebiasOptions deb;
  bool no_renorm = false;
  auto* debias = app.add_subcommand("debias", "Recover unbiased probabilities");
  debias->add_option("--preds", deb.preds, "Biased predictions")->required()->check(CLI::ExistingFile);
  debias->add_option("--freq", deb.freq, "Label frequencies (freq.json)")
      ->required()->check(CLI::ExistingFile);
  debias->add_flag("--no-renormalize", no_renorm, "Keep raw quotients");
  debias->add_option("--out", deb.out, "Output predictions")->required();
  debias->add_flag("--lenient", deb.lenient, "Skip invalid records");

  sgpu::EvalSggOptions sgg;
  std::string sgg_mode = "predcls", sgg_k = "20,50,100", sgg_gc = "both";
  std::string sgg_vocab, sgg_freq;
  auto* eval_sgg = app.add_subcommand("eval-sgg", "Scene-graph recall metrics");
  eval_sgg->add_option("--gt", sgg.gt, "Ground-truth scene graphs")->required()->check(CLI::ExistingFile);
  eval_sgg->add_option("--preds", sgg.preds, "Pair predictions")->required()->check(CLI::ExistingFile);
  eval_sgg->add_option("--mode", sgg_mode, "predcls, sgcls or sgdet")
      ->check(CLI::IsMember({"predcls", "sgcls", "sgdet"}));
  eval_sgg->add_option("--k", sgg_k, "Comma-separated K values");
  eval_sgg->add_option("--graph-constraint", sgg_gc, "on, off or both")
      ->check(CLI::IsMember({"on", "off", "both"}));
  eval_sgg->add_option("--vocab", sgg_vocab, "Predicate vocabulary (JSON)")->check(CLI::ExistingFile);
  eval_sgg->add_option("--freq", sgg_freq, "Label frequencies to tabulate")->check(CLI::ExistingFile);
  eval_sgg->add_option("--out", sgg.out, "Report directory")->required();
  eval_sgg->add_flag("--lenient", sgg.lenient, "Skip invalid records");

  sgpu::EvalHoiOptions hoi;
  std::string hoi_splits = "full,rare,nonrare", hoi_tags, hoi_counts;
  auto* eval_hoi = app.add_subcommand("eval-hoi", "Keyframe HOI mAP");
  eval_hoi->add_option("--gt", hoi.gt, "Keyframe annotations")->required()->check(CLI::ExistingFile);
  eval_hoi->add_option("--preds", hoi.preds, "Keyframe predictions")->required()->check(CLI::ExistingFile);
  eval_hoi->add_option("--splits", hoi_splits, "Comma-separated splits");
  eval_hoi->add_option("--temporal-tags", hoi_tags, "predicate,temporal CSV")->check(CLI::ExistingFile);
  eval_hoi->add_option("--category-counts", hoi_counts, "predicate,object_label,count CSV")
      ->check(CLI::ExistingFile);
  eval_hoi->add_option("--out", hoi.out, "Report directory")->required();

  sgpu::EvalVidvrdOptions vid;
  std::string vid_k = "50,100", vid_tag_k = "1,5,10";
  auto* eval_vid = app.add_subcommand("eval-vidvrd", "Video relation detection and tagging");
  eval_vid->add_option("--gt", vid.gt, "Ground-truth relations")->required()->check(CLI::ExistingFile);
  eval_vid->add_option("--preds", vid.preds, "Predicted relations")->required()->check(CLI::ExistingFile);
  eval_vid->add_option("--k", vid_k, "Detection K values");
  eval_vid->add_option("--tag-k", vid_tag_k, "Tagging K values");
  eval_vid->add_option("--out", vid.out, "Report directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : code(ExitCode::kUsage);
  }

  try {
    if (*simulate) {
      if (!sim_config.empty()) sim.config = sim_config;
      if (*seed_opt) sim.seed = sim_seed;
      sim.threads = threads;
      sgpu::run_simulate(sim);
    } else if (*estimate) {
      est.method = sgpu::estimator_from_string(method);
      est.fill = !no_fill;
      est.threads = threads;
      sgpu::run_estimate(est);
    } else if (*debias) {
      deb.renormalize = !no_renorm;
      deb.threads = threads;
      sgpu::run_debias(deb);
    } else if (*eval_sgg) {
      sgg.mode = sgpu::eval_mode_from_string(sgg_mode);
      sgg.ks = sgpu::parse_int_list(sgg_k);
      sgg.graph_constraint = sgpu::graph_constraint_from_string(sgg_gc);
      if (!sgg_vocab.empty()) sgg.vocab = sgg_vocab;
      if (!sgg_freq.empty()) sgg.freq = sgg_freq;
      sgg.threads = threads;
      sgpu::run_eval_sgg(sgg);
    } else if (*eval_hoi) {
      hoi.splits = parse_splits(hoi_splits);
      if (!hoi_tags.empty()) hoi.temporal_tags = hoi_tags;
      if (!hoi_counts.empty()) hoi.category_counts = hoi_counts;
      sgpu::run_eval_hoi(hoi);
    } else if (*eval_vid) {
      vid.ks = sgpu::parse_int_list(vid_k);
      vid.tag_ks = sgpu::parse_int_list(vid_tag_k);
      sgpu::run_eval_vidvrd(vid);
    }
  } catch (const sgpu::UsageError& e) {
    std::fprintf(stderr, "sgpu: usage error: %s\n", e.what());
    return code(ExitCode::kUsage);
  } catch (const sgpu::DataError& e) {
    std::fprintf(stderr, "sgpu: data error: %s\n", e.what());
    return code(ExitCode::kData);
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "sgpu: data error: %s\n", e.what());
    return code(ExitCode::kData);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "sgpu: internal error: %s\n", e.what());
    return code(ExitCode::kInternal);
  }
  return 0;
}
