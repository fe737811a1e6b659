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

#include "sgpu/scene_graph.hpp"

#include <cmath>
#include <set>
#include <unordered_set>

#include "sgpu/error.hpp"

namespace sgpu {

void PredicateVocabulary::check() const {
  if (names.empty()) throw DataError("predicate vocabulary is empty");
  if (!train_frequency.empty() && train_frequency.size() != names.size()) {
    throw DataError("predicate vocabulary: " + std::to_string(names.size()) +
                    " names but " + std::to_string(train_frequency.size()) +
                    " frequencies");
  }
  std::unordered_set<std::string> seen;
  for (const auto& n : names) {
    if (!seen.insert(n).second) {
      throw DataError("predicate vocabulary: duplicate name '" + n + "'");
    }
  }
}

PredicateVocabulary PredicateVocabulary::numbered(
    int k, std::vector<std::uint64_t> freq) {
  PredicateVocabulary v;
  for (int r = 1; r <= k; ++r) v.names.push_back("pred_" + std::to_string(r));
  v.train_frequency = std::move(freq);
  if (v.train_frequency.empty()) v.train_frequency.assign(k, 0);
  return v;
}

std::vector<Violation> validate_scene_graph(const SceneGraph& g,
                                            const ValidationLimits& limits) {
  std::vector<Violation> out;
  auto add = [&out](std::string loc, std::string msg) {
    out.push_back({std::move(loc), std::move(msg)});
  };

  if (!(std::isfinite(g.width) && std::isfinite(g.height)) || g.width < 0 ||
      g.height < 0) {
    add("image", "image size must be finite and non-negative");
  }

  const int n = static_cast<int>(g.objects.size());
  for (int i = 0; i < n; ++i) {
    const auto& o = g.objects[static_cast<size_t>(i)];
    const std::string loc = "objects[" + std::to_string(i) + "]";
    if (!o.box.valid()) {
      add(loc, "box corners must be finite with x0 <= x1 and y0 <= y1");
    } else if (!o.box.inside(g.width, g.height)) {
      add(loc, "box lies outside the image");
    }
    if (o.label < 0 ||
        (limits.num_object_classes && o.label >= *limits.num_object_classes)) {
      add(loc, "object label " + std::to_string(o.label) + " out of range");
    }
    if (!(o.score >= 0.0 && o.score <= 1.0)) {
      add(loc, "score must lie in [0, 1]");
    }
  }

  std::set<RelationTriple> seen;
  for (size_t i = 0; i < g.relations.size(); ++i) {
    const auto& r = g.relations[i];
    const std::string loc = "relations[" + std::to_string(i) + "]";
    bool ok = true;
    if (r.subj < 0 || r.subj >= n) {
      add(loc, "subject index " + std::to_string(r.subj) + " out of range");
      ok = false;
    }
    if (r.obj < 0 || r.obj >= n) {
      add(loc, "object index " + std::to_string(r.obj) + " out of range");
      ok = false;
    }
    if (ok && r.subj == r.obj) add(loc, "subject and object are the same");
    if (r.pred < 1 || (limits.num_predicates && r.pred > *limits.num_predicates)) {
      add(loc, "predicate " + std::to_string(r.pred) + " out of range");
    }
    if (!seen.insert(r).second) add(loc, "duplicate relation triple");
  }
  return out;
}

}  // namespace sgpu
