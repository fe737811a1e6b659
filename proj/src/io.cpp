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

#include "sgpu/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numeric>
#include <sstream>

#include "sgpu/error.hpp"

namespace sgpu::io {

namespace fs = std::filesystem;

std::string format_probability(double v) {
  if (!std::isfinite(v)) throw DataError("cannot serialize non-finite value");
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_shortest(double v) {
  if (!std::isfinite(v)) throw DataError("cannot serialize non-finite value");
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void fail_at(const fs::path& path, std::size_t line, const std::string& message) {
  throw DataError(path.string() + ":" + std::to_string(line) + ": " + message);
}

JsonlReader::JsonlReader(const fs::path& path) : path_(path), in_(path) {
  if (!in_) throw DataError("cannot open " + path.string());
}

bool JsonlReader::next(Json& record) {
  std::string text;
  while (std::getline(in_, text)) {
    ++line_;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      record = Json::parse(text);
    } catch (const Json::exception& e) {
      fail_at(path_, line_, std::string("malformed JSON: ") + e.what());
    }
    return true;
  }
  return false;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw DataError("failed writing " + path.string());
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string file_digest(const fs::path& path) { return fnv1a_hex(read_file(path)); }

namespace {

BoundingBox box_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) {
    throw DataError("box must be an array [x0, y0, x1, y1]");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

std::string box_to_json(const BoundingBox& b) {
  return "[" + format_probability(b.x0) + "," + format_probability(b.y0) + "," +
         format_probability(b.x1) + "," + format_probability(b.y1) + "]";
}

std::string quoted(const std::string& s) { return Json(s).dump(); }

ObjectInstance object_from_json(const Json& j) {
  ObjectInstance o;
  o.box = box_from_json(j.at("box"));
  o.label = j.at("label").get<int>();
  o.score = j.value("score", 1.0);
  return o;
}

std::string object_to_json(const ObjectInstance& o) {
  return "{\"box\":" + box_to_json(o.box) + ",\"label\":" + std::to_string(o.label) +
         ",\"score\":" + format_probability(o.score) + "}";
}

template <typename T, typename Parse>
LoadStats stream_records(const fs::path& path, bool lenient, Parse&& parse,
                         const std::function<void(T&&)>& sink) {
  JsonlReader reader(path);
  LoadStats stats;
  Json j;
  while (reader.next(j)) {
    try {
      T rec = parse(j);
      ++stats.records;
      sink(std::move(rec));
    } catch (const Json::exception& e) {
      fail_at(path, reader.line(), std::string("bad record: ") + e.what());
    } catch (const DataError& e) {
      if (!lenient) fail_at(path, reader.line(), e.what());
      ++stats.skipped;
      stats.skipped_reasons.push_back(std::to_string(reader.line()) + ": " + e.what());
    }
  }
  return stats;
}

}  // namespace

SceneGraph scene_graph_from_json(const Json& j) {
  SceneGraph g;
  g.image_id = j.at("image_id").get<std::string>();
  g.width = j.at("width").get<double>();
  g.height = j.at("height").get<double>();
  for (const auto& o : j.at("objects")) g.objects.push_back(object_from_json(o));
  for (const auto& r : j.value("relations", Json::array())) {
    if (!r.is_array() || r.size() != 3) {
      throw DataError("relation must be [subj, pred, obj]");
    }
    g.relations.push_back({r[0].get<int>(), r[1].get<int>(), r[2].get<int>()});
  }
  return g;
}

std::string scene_graph_to_line(const SceneGraph& g) {
  std::string s = "{\"image_id\":" + quoted(g.image_id) +
                  ",\"width\":" + format_probability(g.width) +
                  ",\"height\":" + format_probability(g.height) + ",\"objects\":[";
  for (size_t i = 0; i < g.objects.size(); ++i) {
    if (i) s += ",";
    s += object_to_json(g.objects[i]);
  }
  s += "],\"relations\":[";
  for (size_t i = 0; i < g.relations.size(); ++i) {
    const auto& r = g.relations[i];
    if (i) s += ",";
    s += "[" + std::to_string(r.subj) + "," + std::to_string(r.pred) + "," +
         std::to_string(r.obj) + "]";
  }
  s += "]}";
  return s;
}

LoadStats for_each_ground_truth(const fs::path& path, const LoadOptions& options,
                                const std::function<void(SceneGraph&&)>& sink) {
  return stream_records<SceneGraph>(
      path, options.lenient,
      [&options](const Json& j) {
        SceneGraph g = scene_graph_from_json(j);
        const auto violations = validate_scene_graph(g, options.limits);
        if (!violations.empty()) {
          std::string msg = "image '" + g.image_id + "' is invalid:";
          for (const auto& v : violations) msg += " " + v.location + ": " + v.message + ";";
          throw DataError(msg);
        }
        return g;
      },
      sink);
}

std::vector<SceneGraph> load_ground_truth(const fs::path& path, const LoadOptions& options,
                                          LoadStats* stats) {
  std::vector<SceneGraph> out;
  const auto s = for_each_ground_truth(path, options,
                                       [&out](SceneGraph&& g) { out.push_back(std::move(g)); });
  if (stats) *stats = s;
  return out;
}

ImagePredictions predictions_from_json(const Json& j, int k,
                                       const PredictionOptions& options) {
  ImagePredictions img;
  img.image_id = j.at("image_id").get<std::string>();
  if (j.contains("batch_id") && !j["batch_id"].is_null()) {
    img.batch_id = j["batch_id"].get<std::int64_t>();
  }
  const std::string calibration = j.value("calibration", std::string("biased"));
  if (calibration != "biased" && calibration != "recovered") {
    throw DataError("calibration must be 'biased' or 'recovered'");
  }
  const bool recovered = calibration == "recovered";
  std::vector<ObjectInstance> objects;
  for (const auto& o : j.at("objects")) objects.push_back(object_from_json(o));
  const auto& pairs = j.at("pairs");
  for (size_t i = 0; i < pairs.size(); ++i) {
    const auto& pj = pairs[i];
    const std::string where = "pairs[" + std::to_string(i) + "]";
    PairPrediction p;
    p.subj_index = pj.at("subj").get<int>();
    p.obj_index = pj.at("obj").get<int>();
    const int n = static_cast<int>(objects.size());
    if (p.subj_index < 0 || p.subj_index >= n || p.obj_index < 0 || p.obj_index >= n) {
      throw DataError(where + ": object index out of range");
    }
    p.subj = objects[static_cast<size_t>(p.subj_index)];
    p.obj = objects[static_cast<size_t>(p.obj_index)];
    p.pred_probs = pj.at("probs").get<std::vector<double>>();
    if (static_cast<int>(p.pred_probs.size()) != k) {
      throw DataError(where + ".probs: expected K = " + std::to_string(k) +
                      " values, got " + std::to_string(p.pred_probs.size()));
    }
    if (pj.contains("bg") && !pj["bg"].is_null()) p.bg_prob = pj["bg"].get<double>();
    p.recovered = recovered;
    if (!recovered) {
      const double fg = std::accumulate(p.pred_probs.begin(), p.pred_probs.end(), 0.0);
      const double mass = fg + p.bg_prob.value_or(0.0);
      const bool off = p.bg_prob ? std::abs(mass - 1.0) > options.tolerance
                                 : mass > 1.0 + options.tolerance;
      if (off) {
        throw DataError(where + ": probability mass " + std::to_string(mass) +
                        " outside tolerance");
      }
      const bool renorm = p.bg_prob ? std::abs(mass - 1.0) > 1e-6 : mass > 1.0 + 1e-6;
      if (renorm && mass > 0.0) {
        for (auto& v : p.pred_probs) v /= mass;
        if (p.bg_prob) *p.bg_prob /= mass;
      }
    }
    try {
      check_pair(p);
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
    img.pairs.push_back(std::move(p));
  }
  return img;
}

std::string predictions_to_line(const ImagePredictions& image) {
  // Rebuild the object table from the pair endpoints.
  std::vector<ObjectInstance> objects;
  auto slot = [&objects](const ObjectInstance& o, int hint) {
    if (hint >= 0) {
      if (static_cast<size_t>(hint) >= objects.size()) objects.resize(static_cast<size_t>(hint) + 1);
      objects[static_cast<size_t>(hint)] = o;
      return hint;
    }
    for (size_t i = 0; i < objects.size(); ++i) {
      if (objects[i] == o) return static_cast<int>(i);
    }
    objects.push_back(o);
    return static_cast<int>(objects.size() - 1);
  };
  std::vector<std::pair<int, int>> ends;
  const bool indexed = std::all_of(image.pairs.begin(), image.pairs.end(), [](const auto& p) {
    return p.subj_index >= 0 && p.obj_index >= 0;
  });
  for (const auto& p : image.pairs) {
    const int s = slot(p.subj, indexed ? p.subj_index : -1);
    const int o = slot(p.obj, indexed ? p.obj_index : -1);
    ends.emplace_back(s, o);
  }
  const bool recovered = !image.pairs.empty() && image.pairs.front().recovered;
  std::string s = "{\"image_id\":" + quoted(image.image_id);
  if (image.batch_id) s += ",\"batch_id\":" + std::to_string(*image.batch_id);
  s += std::string(",\"calibration\":\"") + (recovered ? "recovered" : "biased") + "\"";
  s += ",\"objects\":[";
  for (size_t i = 0; i < objects.size(); ++i) {
    if (i) s += ",";
    s += object_to_json(objects[i]);
  }
  s += "],\"pairs\":[";
  for (size_t i = 0; i < image.pairs.size(); ++i) {
    const auto& p = image.pairs[i];
    if (i) s += ",";
    s += "{\"subj\":" + std::to_string(ends[i].first) +
         ",\"obj\":" + std::to_string(ends[i].second) + ",\"probs\":[";
    for (size_t r = 0; r < p.pred_probs.size(); ++r) {
      if (r) s += ",";
      s += format_probability(p.pred_probs[r]);
    }
    s += "]";
    if (p.bg_prob) s += ",\"bg\":" + format_probability(*p.bg_prob);
    s += "}";
  }
  s += "]}";
  return s;
}

LoadStats for_each_prediction(const fs::path& path, int k, const PredictionOptions& options,
                              const std::function<void(ImagePredictions&&)>& sink) {
  return stream_records<ImagePredictions>(
      path, options.lenient,
      [k, &options](const Json& j) { return predictions_from_json(j, k, options); }, sink);
}

std::vector<ImagePredictions> load_predictions(const fs::path& path, int k,
                                               const PredictionOptions& options,
                                               LoadStats* stats) {
  std::vector<ImagePredictions> out;
  const auto s = for_each_prediction(path, k, options, [&out](ImagePredictions&& p) {
    out.push_back(std::move(p));
  });
  if (stats) *stats = s;
  return out;
}

std::optional<int> peek_num_predicates(const fs::path& path) {
  JsonlReader reader(path);
  Json j;
  while (reader.next(j)) {
    if (!j.contains("pairs")) fail_at(path, reader.line(), "record has no 'pairs'");
    for (const auto& p : j["pairs"]) {
      if (p.contains("probs")) return static_cast<int>(p["probs"].size());
    }
  }
  return std::nullopt;
}

std::string label_frequency_to_json(const LabelFrequencyEstimate& est) {
  std::string s = std::string("{\"estimator\":\"") + to_string(est.estimator) + "\",\"alpha\":";
  s += est.alpha ? format_probability(*est.alpha) : "null";
  s += ",\"mode\":" + quoted(est.mode) + ",\"c\":[";
  for (size_t r = 0; r < est.c.size(); ++r) {
    if (r) s += ",";
    s += est.c[r] ? format_probability(*est.c[r]) : "null";
  }
  s += "],\"valid_counts\":[";
  for (size_t r = 0; r < est.valid_counts.size(); ++r) {
    if (r) s += ",";
    s += std::to_string(est.valid_counts[r]);
  }
  s += "]}\n";
  return s;
}

LabelFrequencyEstimate label_frequency_from_json(const Json& j) {
  LabelFrequencyEstimate est;
  try {
    est.estimator = estimator_from_string(j.at("estimator").get<std::string>());
  } catch (const UsageError& e) {
    throw DataError(e.what());
  }
  if (j.contains("alpha") && !j["alpha"].is_null()) est.alpha = j["alpha"].get<double>();
  est.mode = j.value("mode", std::string());
  for (const auto& v : j.at("c")) {
    est.c.push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
  }
  est.valid_counts = j.value("valid_counts", std::vector<std::uint64_t>(est.c.size(), 0));
  if (est.valid_counts.size() != est.c.size()) {
    throw DataError("label frequency file: c and valid_counts differ in length");
  }
  return est;
}

LabelFrequencyEstimate read_label_frequency(const fs::path& path) {
  try {
    return label_frequency_from_json(Json::parse(read_file(path)));
  } catch (const Json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_label_frequency(const fs::path& path, const LabelFrequencyEstimate& est) {
  write_file(path, label_frequency_to_json(est));
}

PredicateVocabulary read_vocabulary(const fs::path& path) {
  try {
    const Json j = Json::parse(read_file(path));
    PredicateVocabulary v;
    v.names = j.at("names").get<std::vector<std::string>>();
    v.train_frequency = j.value("train_frequency", std::vector<std::uint64_t>());
    if (v.train_frequency.empty()) v.train_frequency.assign(v.names.size(), 0);
    v.check();
    return v;
  } catch (const Json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string vocabulary_to_json(const PredicateVocabulary& vocab) {
  Json j;
  j["names"] = vocab.names;
  j["train_frequency"] = vocab.train_frequency;
  return j.dump(2) + "\n";
}

SimConfig sim_config_from_json(const Json& j) {
  const int k = j.value("num_predicates", 10);
  SimConfig c = SimConfig::illustrative(k, j.value("seed", std::uint64_t{0}));
  if (j.contains("class_prior")) c.class_prior = j["class_prior"].get<std::vector<double>>();
  if (j.contains("label_frequency")) {
    c.label_frequency = j["label_frequency"].get<std::vector<double>>();
  }
  c.num_contexts = j.value("num_contexts", c.num_contexts);
  if (j.contains("label_mode")) {
    c.label_mode = label_mode_from_string(j["label_mode"].get<std::string>());
  }
  c.num_examples = j.value("num_examples", c.num_examples);
  c.num_object_classes = j.value("num_object_classes", c.num_object_classes);
  c.min_objects = j.value("min_objects", c.min_objects);
  c.max_objects = j.value("max_objects", c.max_objects);
  c.train_images = j.value("train_images", c.train_images);
  c.test_images = j.value("test_images", c.test_images);
  c.epochs = j.value("epochs", c.epochs);
  c.images_per_batch = j.value("images_per_batch", c.images_per_batch);
  c.image_width = j.value("image_width", c.image_width);
  c.image_height = j.value("image_height", c.image_height);
  c.check();
  return c;
}

Json sim_config_to_json(const SimConfig& c) {
  Json j;
  j["num_predicates"] = c.num_predicates;
  j["class_prior"] = c.class_prior;
  j["label_frequency"] = c.label_frequency;
  j["num_contexts"] = c.num_contexts;
  j["label_mode"] = to_string(c.label_mode);
  j["num_examples"] = c.num_examples;
  j["seed"] = c.seed;
  j["num_object_classes"] = c.num_object_classes;
  j["min_objects"] = c.min_objects;
  j["max_objects"] = c.max_objects;
  j["train_images"] = c.train_images;
  j["test_images"] = c.test_images;
  j["epochs"] = c.epochs;
  j["images_per_batch"] = c.images_per_batch;
  j["image_width"] = c.image_width;
  j["image_height"] = c.image_height;
  return j;
}

KeyframeAnnotation keyframe_annotation_from_json(const Json& j) {
  KeyframeAnnotation kf;
  kf.video_id = j.at("video_id").get<std::string>();
  kf.frame = j.at("frame").get<int>();
  for (const auto& p : j.at("pairs")) {
    HoiGroundTruth g;
    g.human = box_from_json(p.at("human"));
    g.object = box_from_json(p.at("object"));
    g.object_label = p.at("object_label").get<int>();
    g.interactions = p.at("interactions").get<std::vector<int>>();
    std::sort(g.interactions.begin(), g.interactions.end());
    if (std::adjacent_find(g.interactions.begin(), g.interactions.end()) != g.interactions.end()) {
      throw DataError("duplicate interaction in an annotated pair");
    }
    if (!g.human.valid() || !g.object.valid()) throw DataError("invalid box");
    kf.pairs.push_back(std::move(g));
  }
  return kf;
}

KeyframePrediction keyframe_prediction_from_json(const Json& j) {
  KeyframePrediction kf;
  kf.video_id = j.at("video_id").get<std::string>();
  kf.frame = j.at("frame").get<int>();
  for (const auto& p : j.at("pairs")) {
    HoiPairPrediction d;
    d.human = box_from_json(p.at("human"));
    d.human_score = p.value("human_score", 1.0);
    d.object = box_from_json(p.at("object"));
    d.object_label = p.at("object_label").get<int>();
    d.object_score = p.value("object_score", 1.0);
    d.interaction_scores = p.at("scores").get<std::vector<double>>();
    for (double s : d.interaction_scores) {
      if (!(s >= 0.0 && s <= 1.0)) throw DataError("interaction score outside [0, 1]");
    }
    if (!d.human.valid() || !d.object.valid()) throw DataError("invalid box");
    kf.pairs.push_back(std::move(d));
  }
  return kf;
}

std::vector<KeyframeAnnotation> load_keyframe_annotations(const fs::path& path) {
  std::vector<KeyframeAnnotation> out;
  stream_records<KeyframeAnnotation>(
      path, false, [](const Json& j) { return keyframe_annotation_from_json(j); },
      [&out](KeyframeAnnotation&& k) { out.push_back(std::move(k)); });
  return out;
}

std::vector<KeyframePrediction> load_keyframe_predictions(const fs::path& path) {
  std::vector<KeyframePrediction> out;
  stream_records<KeyframePrediction>(
      path, false, [](const Json& j) { return keyframe_prediction_from_json(j); },
      [&out](KeyframePrediction&& k) { out.push_back(std::move(k)); });
  return out;
}

namespace {

std::vector<std::vector<std::string>> read_csv_rows(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

long long parse_int(const fs::path& path, const std::string& s) {
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DataError(path.string() + ": '" + s + "' is not an integer");
  }
  return v;
}

}  // namespace

std::vector<bool> read_temporal_tags(const fs::path& path) {
  std::vector<bool> tags;
  for (const auto& row : read_csv_rows(path)) {
    if (row.size() < 2) throw DataError(path.string() + ": expected predicate,temporal");
    const auto p = parse_int(path, row[0]);
    const auto t = parse_int(path, row[1]);
    if (p < 0 || (t != 0 && t != 1)) throw DataError(path.string() + ": bad tag row");
    if (static_cast<size_t>(p) >= tags.size()) tags.resize(static_cast<size_t>(p) + 1, false);
    tags[static_cast<size_t>(p)] = t == 1;
  }
  return tags;
}

std::map<HoiCategory, std::uint64_t> read_category_counts(const fs::path& path) {
  std::map<HoiCategory, std::uint64_t> out;
  for (const auto& row : read_csv_rows(path)) {
    if (row.size() < 3) {
      throw DataError(path.string() + ": expected predicate,object_label,count");
    }
    const auto n = parse_int(path, row[2]);
    if (n < 0) throw DataError(path.string() + ": negative count");
    out[{static_cast<int>(parse_int(path, row[0])), static_cast<int>(parse_int(path, row[1]))}] =
        static_cast<std::uint64_t>(n);
  }
  return out;
}

Trajectory trajectory_from_json(const Json& j) {
  Trajectory t;
  t.start_frame = j.at("start").get<int>();
  for (const auto& b : j.at("boxes")) {
    if (b.is_null()) {
      t.boxes.emplace_back(std::nullopt);
    } else {
      t.boxes.emplace_back(box_from_json(b));
    }
  }
  if (!t.valid()) throw DataError("trajectory needs at least one valid box");
  return t;
}

Json trajectory_to_json(const Trajectory& t) {
  Json j;
  j["start"] = t.start_frame;
  j["boxes"] = Json::array();
  for (const auto& b : t.boxes) {
    if (b) {
      j["boxes"].push_back({b->x0, b->y0, b->x1, b->y1});
    } else {
      j["boxes"].push_back(nullptr);
    }
  }
  return j;
}

std::vector<std::pair<std::string, std::vector<RelationInstance>>> load_video_relations(
    const fs::path& path, bool require_score) {
  using Entry = std::pair<std::string, std::vector<RelationInstance>>;
  std::vector<Entry> out;
  stream_records<Entry>(
      path, false,
      [require_score](const Json& j) {
        Entry e;
        e.first = j.at("video_id").get<std::string>();
        for (const auto& r : j.at("relations")) {
          RelationInstance ri;
          const auto t = r.at("triplet").get<std::vector<int>>();
          if (t.size() != 3) throw DataError("triplet must be [subj, pred, obj]");
          ri.triplet = {t[0], t[1], t[2]};
          ri.subj = trajectory_from_json(r.at("subj"));
          ri.obj = trajectory_from_json(r.at("obj"));
          if (require_score) {
            ri.score = r.at("score").get<double>();
          } else {
            ri.score = r.value("score", 1.0);
          }
          if (!std::isfinite(ri.score)) throw DataError("score must be finite");
          e.second.push_back(std::move(ri));
        }
        return e;
      },
      [&out](Entry&& e) { out.push_back(std::move(e)); });
  return out;
}

namespace {

void put_i32(std::string& out, std::int32_t v) {
  const auto u = static_cast<std::uint32_t>(v);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((u >> (8 * i)) & 0xff));
}

std::int32_t get_i32(const std::string& in, size_t at) {
  std::uint32_t u = 0;
  for (int i = 0; i < 4; ++i) {
    u |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[at + static_cast<size_t>(i)]))
         << (8 * i);
  }
  return static_cast<std::int32_t>(u);
}

}  // namespace

void write_feature_volume(const fs::path& path, const FeatureVolume& vol) {
  std::string out;
  out.reserve(32 + vol.size() * 4);
  for (std::int32_t v : {kFeatureVolumeMagic, kFeatureVolumeVersion, vol.channels(),
                         vol.frames(), vol.height(), vol.width(), 0, 0}) {
    put_i32(out, v);
  }
  for (double d : vol.data()) {
    const float f = static_cast<float>(d);
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof(bits));
    put_i32(out, static_cast<std::int32_t>(bits));
  }
  write_file(path, out);
}

FeatureVolume read_feature_volume(const fs::path& path) {
  const std::string in = read_file(path);
  if (in.size() < 32) throw DataError(path.string() + ": truncated feature volume header");
  if (get_i32(in, 0) != kFeatureVolumeMagic) {
    throw DataError(path.string() + ": not a feature volume (bad magic)");
  }
  if (get_i32(in, 4) != kFeatureVolumeVersion) {
    throw DataError(path.string() + ": unsupported feature volume version");
  }
  const int d = get_i32(in, 8), t = get_i32(in, 12), h = get_i32(in, 16), w = get_i32(in, 20);
  if (d < 1 || t < 1 || h < 1 || w < 1) {
    throw DataError(path.string() + ": non-positive feature volume dimension");
  }
  const size_t n = static_cast<size_t>(d) * t * h * w;
  if (in.size() != 32 + 4 * n) {
    throw DataError(path.string() + ": expected " + std::to_string(n) + " float32 values");
  }
  std::vector<double> data(n);
  for (size_t i = 0; i < n; ++i) {
    const auto bits = static_cast<std::uint32_t>(get_i32(in, 32 + 4 * i));
    float f;
    std::memcpy(&f, &bits, sizeof(f));
    if (!std::isfinite(f)) throw DataError(path.string() + ": non-finite feature value");
    data[i] = f;
  }
  return FeatureVolume(d, t, h, w, std::move(data));
}

}  // namespace sgpu::io
