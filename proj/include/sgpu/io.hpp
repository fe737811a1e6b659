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

#ifndef SGPU_IO_HPP_
#define SGPU_IO_HPP_

// File formats. Record files are JSON Lines, one image / keyframe / video per
// line; probabilities are written with 17 significant digits so 64-bit values
// survive a round trip.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "sgpu/hoi_metrics.hpp"
#include "sgpu/pu.hpp"
#include "sgpu/scar_sim.hpp"
#include "sgpu/scene_graph.hpp"
#include "sgpu/st_kernels.hpp"

namespace sgpu::io {

using Json = nlohmann::json;

// "%.17g"; throws DataError for non-finite values.
std::string format_probability(double v);
// Shortest representation that parses back to v.
std::string format_shortest(double v);

// Line-by-line JSON reader with 1-based line numbers in its errors.
class JsonlReader {
 public:
  explicit JsonlReader(const std::filesystem::path& path);
  // False at end of file. Blank lines are skipped.
  bool next(Json& record);
  std::size_t line() const { return line_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::size_t line_ = 0;
};

// "<path>:<line>: <message>" as a DataError.
[[noreturn]] void fail_at(const std::filesystem::path& path, std::size_t line,
                          const std::string& message);

// ---- scene graphs ---------------------------------------------------------
//
// {"image_id": "...", "width": W, "height": H,
//  "objects": [{"box": [x0, y0, x1, y1], "label": l, "score": s?}, ...],
//  "relations": [[subj, pred, obj], ...]}

SceneGraph scene_graph_from_json(const Json& j);
std::string scene_graph_to_line(const SceneGraph& g);

struct LoadOptions {
  bool lenient = false;  // drop invalid records instead of failing
  ValidationLimits limits;
};

struct LoadStats {
  std::size_t records = 0;
  std::size_t skipped = 0;
  std::vector<std::string> skipped_reasons;  // "<line>: <message>"
};

// Streams records to `sink`. Throws DataError (with the line number) on a
// parse error or, unless lenient, a validation failure.
LoadStats for_each_ground_truth(const std::filesystem::path& path,
                                const LoadOptions& options,
                                const std::function<void(SceneGraph&&)>& sink);
std::vector<SceneGraph> load_ground_truth(const std::filesystem::path& path,
                                          const LoadOptions& options = {},
                                          LoadStats* stats = nullptr);

// ---- pair predictions ------------------------------------------------------
//
// {"image_id": "...", "batch_id": b?, "calibration": "biased"|"recovered",
//  "objects": [{"box": [...], "label": l, "score": s}, ...],
//  "pairs": [{"subj": i, "obj": j, "probs": [p_1..p_K], "bg": p_0?}, ...]}

struct PredictionOptions {
  // Mass deviation accepted on load; within it the vector is renormalized.
  double tolerance = 1e-2;
  bool lenient = false;
};

ImagePredictions predictions_from_json(const Json& j, int k,
                                       const PredictionOptions& options = {});
std::string predictions_to_line(const ImagePredictions& image);

LoadStats for_each_prediction(const std::filesystem::path& path, int k,
                              const PredictionOptions& options,
                              const std::function<void(ImagePredictions&&)>& sink);
std::vector<ImagePredictions> load_predictions(const std::filesystem::path& path,
                                               int k,
                                               const PredictionOptions& options = {},
                                               LoadStats* stats = nullptr);

// Length of the first record's probability vectors (K), or nullopt for an
// empty file.
std::optional<int> peek_num_predicates(const std::filesystem::path& path);

// ---- label frequencies ----------------------------------------------------
//
// {"estimator": "dlfe", "alpha": 0.1, "mode": "predcls",
//  "c": [c_1..c_K (null when unset)], "valid_counts": [n_1..n_K]}

std::string label_frequency_to_json(const LabelFrequencyEstimate& est);
LabelFrequencyEstimate label_frequency_from_json(const Json& j);
LabelFrequencyEstimate read_label_frequency(const std::filesystem::path& path);
void write_label_frequency(const std::filesystem::path& path,
                           const LabelFrequencyEstimate& est);

// ---- vocabulary / simulation config ----------------------------------------

// {"names": [...], "train_frequency": [...]}
PredicateVocabulary read_vocabulary(const std::filesystem::path& path);
std::string vocabulary_to_json(const PredicateVocabulary& vocab);

// Fields absent from the object keep SimConfig::illustrative defaults.
SimConfig sim_config_from_json(const Json& j);
Json sim_config_to_json(const SimConfig& c);

// ---- HOI keyframes ----------------------------------------------------------
//
// Annotation: {"video_id", "frame", "pairs": [{"human": [..], "object": [..],
//              "object_label": l, "interactions": [c, ...]}]}
// Prediction: {"video_id", "frame", "pairs": [{"human": [..], "human_score",
//              "object": [..], "object_label", "object_score",
//              "scores": [s_0..s_{C-1}]}]}

KeyframeAnnotation keyframe_annotation_from_json(const Json& j);
KeyframePrediction keyframe_prediction_from_json(const Json& j);
std::vector<KeyframeAnnotation> load_keyframe_annotations(const std::filesystem::path& path);
std::vector<KeyframePrediction> load_keyframe_predictions(const std::filesystem::path& path);

// "predicate,temporal" rows (temporal is 0/1). Result indexed by predicate.
std::vector<bool> read_temporal_tags(const std::filesystem::path& path);
// "predicate,object_label,count" rows.
std::map<HoiCategory, std::uint64_t> read_category_counts(const std::filesystem::path& path);

// ---- video relations ----------------------------------------------------------
//
// {"video_id", "relations": [{"triplet": [s, p, o], "score": x?,
//   "subj": {"start": f, "boxes": [[..] | null, ...]}, "obj": {...}}]}

Trajectory trajectory_from_json(const Json& j);
Json trajectory_to_json(const Trajectory& t);
std::vector<std::pair<std::string, std::vector<RelationInstance>>> load_video_relations(
    const std::filesystem::path& path, bool require_score);

// ---- feature volumes ----------------------------------------------------------
//
// Little-endian. Header of eight int32: magic 0x4C4F5646 ("FVOL"), version 1,
// d, T, H, W, h, w (h and w reserved, 0). Then d*T*H*W float32 in C order.

inline constexpr std::int32_t kFeatureVolumeMagic = 0x4C4F5646;
inline constexpr std::int32_t kFeatureVolumeVersion = 1;

void write_feature_volume(const std::filesystem::path& path, const FeatureVolume& vol);
FeatureVolume read_feature_volume(const std::filesystem::path& path);

// ---- misc ---------------------------------------------------------------------

// 64-bit FNV-1a, as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);
std::string file_digest(const std::filesystem::path& path);
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace sgpu::io

#endif  // SGPU_IO_HPP_
