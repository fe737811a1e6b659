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

#include "sgpu/report.hpp"

#include <system_error>

#include "sgpu/error.hpp"

#ifndef SGPU_VERSION
#define SGPU_VERSION "0.0.0"
#endif

namespace sgpu {

namespace fs = std::filesystem;
using io::Json;

const char* tool_version() { return SGPU_VERSION; }

InputDigest digest_input(const std::string& role, const fs::path& path) {
  return {role, path.filename().string(), io::file_digest(path)};
}

Json metadata_json(const RunMetadata& meta) {
  Json j;
  j["tool"] = "sgpu";
  j["version"] = tool_version();
  j["command"] = meta.command;
  j["config"] = meta.config;
  j["config_hash"] = io::fnv1a_hex(meta.config.dump());
  Json inputs = Json::array();
  for (const auto& in : meta.inputs) {
    inputs.push_back({{"role", in.role}, {"name", in.name}, {"fnv1a", in.fnv1a}});
  }
  j["inputs"] = std::move(inputs);
  return j;
}

void write_reports(const ReportBundle& bundle, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
  Json report;
  report["metadata"] = metadata_json(bundle.metadata);
  report["metrics"] = bundle.metrics;
  io::write_file(dir / "report.json", report.dump(2) + "\n");
  for (const auto& [name, content] : bundle.tables) io::write_file(dir / name, content);
}

namespace {

Json optional_json(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::string cell(const std::optional<double>& v) {
  return v ? io::format_shortest(*v) : std::string();
}

Json recall_list_json(const std::vector<RecallAtK>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    Json j;
    j["k"] = r.k;
    j["recall"] = r.recall;
    j["mean_recall"] = r.mean_recall;
    j["head"] = optional_json(r.buckets.head);
    j["middle"] = optional_json(r.buckets.middle);
    j["tail"] = optional_json(r.buckets.tail);
    Json pc = Json::array();
    for (const auto& v : r.per_class) pc.push_back(optional_json(v));
    j["per_class"] = std::move(pc);
    out.push_back(std::move(j));
  }
  return out;
}

Json map_json(const HoiMapResult& m) {
  Json j;
  j["map"] = m.map;
  j["categories"] = m.ap.size();
  return j;
}

}  // namespace

Json sgg_metrics_json(const RecallReport& report) {
  Json j;
  j["mode"] = to_string(report.mode);
  j["ks"] = report.ks;
  j["images"] = report.images;
  j["gt_per_class"] = report.gt_per_class;
  if (!report.constrained.empty()) j["graph_constraint"] = recall_list_json(report.constrained);
  if (!report.unconstrained.empty()) {
    j["no_graph_constraint"] = recall_list_json(report.unconstrained);
  }
  return j;
}

std::string per_class_recall_csv(const RecallReport* report, const PredicateVocabulary& vocab) {
  std::string s = "class,name,train_freq_rank,bucket";
  if (report) {
    for (const auto& r : report->constrained) s += ",R@" + std::to_string(r.k);
    for (const auto& r : report->unconstrained) s += ",ng-R@" + std::to_string(r.k);
  }
  s += "\n";
  if (!report) return s;
  const auto ranks = frequency_ranks(vocab);
  std::vector<Bucket> buckets;
  if (vocab.size() >= 3) buckets = assign_buckets(vocab);
  for (int r = 1; r <= vocab.size(); ++r) {
    const auto i = static_cast<size_t>(r - 1);
    std::string name = vocab.names[i];
    if (name.find_first_of(",\"\n") != std::string::npos) {
      std::string q = "\"";
      for (char ch : name) {
        if (ch == '"') q += '"';
        q += ch;
      }
      name = q + "\"";
    }
    s += std::to_string(r) + "," + name + "," + std::to_string(ranks[i]) + ",";
    if (!buckets.empty()) s += to_string(buckets[i]);
    for (const auto& row : report->constrained) s += "," + cell(row.per_class[i]);
    for (const auto& row : report->unconstrained) s += "," + cell(row.per_class[i]);
    s += "\n";
  }
  return s;
}

std::string label_freq_csv(const LabelFrequencyEstimate* est) {
  std::string s = "class,c,valid_count\n";
  if (!est) return s;
  for (size_t r = 0; r < est->c.size(); ++r) {
    s += std::to_string(r + 1) + "," + cell(est->c[r]) + "," +
         std::to_string(est->valid_counts[r]) + "\n";
  }
  return s;
}

Json hoi_metrics_json(const HoiReport& report) {
  Json j;
  Json splits = Json::object();
  for (const auto& [split, m] : report.splits) {
    splits[to_string(split)] = m ? map_json(*m) : Json(nullptr);
  }
  j["splits"] = std::move(splits);
  if (report.temporal_spatial) {
    const auto& ts = *report.temporal_spatial;
    j["temporal"] = ts.temporal ? map_json(*ts.temporal) : Json(nullptr);
    j["spatial"] = ts.spatial ? map_json(*ts.spatial) : Json(nullptr);
  }
  Json pred = Json::array();
  for (const auto& [p, ap] : report.predicate_ap) pred.push_back({{"predicate", p}, {"ap", ap}});
  j["predicate_ap"] = std::move(pred);
  return j;
}

std::string ap_per_category_csv(const HoiReport* report) {
  std::string s = "predicate,object_label,train_count,rare,ap\n";
  if (!report) return s;
  const HoiMapResult* full = nullptr;
  for (const auto& [split, m] : report->splits) {
    if (split == HoiSplit::kFull && m) full = &*m;
  }
  if (!full) return s;
  for (const auto& [cat, ap] : full->ap) {
    s += std::to_string(cat.predicate) + "," + std::to_string(cat.object_label) + "," +
         std::to_string(report->counts.count(cat)) + "," +
         (report->counts.rare(cat) ? "1" : "0") + "," + io::format_shortest(ap) + "\n";
  }
  return s;
}

Json vidvrd_metrics_json(const RelationDetectionResult& detection,
                         const std::vector<std::pair<int, double>>& tagging) {
  Json j;
  Json recall = Json::array();
  for (const auto& [k, v] : detection.recall) recall.push_back({{"k", k}, {"recall", v}});
  j["detection"]["recall"] = std::move(recall);
  j["detection"]["map"] = detection.map;
  j["detection"]["categories"] = detection.ap.size();
  Json prec = Json::array();
  for (const auto& [k, v] : tagging) prec.push_back({{"k", k}, {"precision", v}});
  j["tagging"] = std::move(prec);
  return j;
}

}  // namespace sgpu
