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

#ifndef SGPU_TESTS_SUPPORT_HPP_
#define SGPU_TESTS_SUPPORT_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "sgpu/pu.hpp"
#include "sgpu/scene_graph.hpp"

namespace sgpu::testing {

inline ObjectInstance object(double x0, double y0, double x1, double y1, int label,
                             double score = 1.0) {
  return {{x0, y0, x1, y1}, label, score};
}

inline PairPrediction pair(const ObjectInstance& s, const ObjectInstance& o,
                           std::vector<double> probs, std::optional<double> bg = {}) {
  PairPrediction p;
  p.subj = s;
  p.obj = o;
  p.pred_probs = std::move(probs);
  p.bg_prob = bg;
  return p;
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("sgpu_" + tag + "_" + std::to_string(counter()++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  static int& counter() {
    static int n = 0;
    return n;
  }
  std::filesystem::path path_;
};

}  // namespace sgpu::testing

#endif  // SGPU_TESTS_SUPPORT_HPP_
