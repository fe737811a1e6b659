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

#ifndef SGPU_REPORT_HPP_
#define SGPU_REPORT_HPP_

// Report bundles: report.json plus per-class CSV tables. Output depends only
// on inputs and configuration, so identical runs give identical bytes.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "sgpu/hoi_metrics.hpp"
#include "sgpu/io.hpp"
#include "sgpu/pu.hpp"
#include "sgpu/sgg_metrics.hpp"

namespace sgpu {

const char* tool_version();

struct InputDigest {
  std::string role;  // e.g. "gt", "preds"
  std::string name;  // file name without directories
  std::string fnv1a;
};

InputDigest digest_input(const std::string& role, const std::filesystem::path& path);

struct RunMetadata {
  std::string command;
  io::Json config;  // must not contain paths or thread counts
  std::vector<InputDigest> inputs;
};

io::Json metadata_json(const RunMetadata& meta);

struct ReportBundle {
  RunMetadata metadata;
  io::Json metrics = io::Json::object();
  std::vector<std::pair<std::string, std::string>> tables;  // file name, CSV
};

// Creates `dir` if needed and writes report.json and every table.
void write_reports(const ReportBundle& bundle, const std::filesystem::path& dir);

io::Json sgg_metrics_json(const RecallReport& report);

// class,name,train_freq_rank,bucket,R@K...,ng-R@K... ; headers only when
// `report` is null.
std::string per_class_recall_csv(const RecallReport* report,
                                 const PredicateVocabulary& vocab);

// class,c,valid_count ; headers only when `est` is null.
std::string label_freq_csv(const LabelFrequencyEstimate* est);

struct HoiReport {
  // nullopt when the split has no category with ground truth.
  std::vector<std::pair<HoiSplit, std::optional<HoiMapResult>>> splits;
  std::map<int, double> predicate_ap;
  std::optional<TemporalSpatialMap> temporal_spatial;
  CategorySplit counts;
};

io::Json hoi_metrics_json(const HoiReport& report);

// predicate,object_label,train_count,rare,ap ; one row per category with
// ground truth.
std::string ap_per_category_csv(const HoiReport* report);

io::Json vidvrd_metrics_json(const RelationDetectionResult& detection,
                             const std::vector<std::pair<int, double>>& tagging);

}  // namespace sgpu

#endif  // SGPU_REPORT_HPP_
