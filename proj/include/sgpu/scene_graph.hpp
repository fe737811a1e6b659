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

#ifndef SGPU_SCENE_GRAPH_HPP_
#define SGPU_SCENE_GRAPH_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sgpu/geometry.hpp"

namespace sgpu {

// Detected or annotated object. Ground-truth objects carry score 1.
struct ObjectInstance {
  BoundingBox box;
  int label = 0;
  double score = 1.0;

  friend bool operator==(const ObjectInstance&, const ObjectInstance&) = default;
};

// (subject, predicate, object) edge. subj/obj index SceneGraph::objects;
// pred is a foreground predicate class in 1..K.
struct RelationTriple {
  int subj = 0;
  int pred = 1;
  int obj = 0;

  friend bool operator==(const RelationTriple&, const RelationTriple&) = default;
  friend auto operator<=>(const RelationTriple&, const RelationTriple&) = default;
};

struct SceneGraph {
  std::string image_id;
  double width = 0.0;
  double height = 0.0;
  std::vector<ObjectInstance> objects;
  std::vector<RelationTriple> relations;
};

// Predicate classes 1..K. names[r - 1] and train_frequency[r - 1] describe
// class r. Index 0 is reserved for background / "no relation".
struct PredicateVocabulary {
  std::vector<std::string> names;
  std::vector<std::uint64_t> train_frequency;

  int size() const { return static_cast<int>(names.size()); }
  // Throws DataError on K < 1, duplicate names or mismatched lengths.
  void check() const;
  // Synthetic vocabulary "pred_1".."pred_K" with the given frequencies.
  static PredicateVocabulary numbered(int k,
                                      std::vector<std::uint64_t> freq = {});
};

struct Violation {
  std::string location;  // e.g. "relations[3]"
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationLimits {
  std::optional<int> num_object_classes;
  std::optional<int> num_predicates;
};

// Collects every invariant violation in g. An empty result means well-formed.
std::vector<Violation> validate_scene_graph(const SceneGraph& g,
                                            const ValidationLimits& limits = {});

}  // namespace sgpu

#endif  // SGPU_SCENE_GRAPH_HPP_
