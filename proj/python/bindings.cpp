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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "sgpu/commands.hpp"
#include "sgpu/error.hpp"
#include "sgpu/hoi_metrics.hpp"
#include "sgpu/pu.hpp"
#include "sgpu/report.hpp"
#include "sgpu/st_kernels.hpp"

namespace py = pybind11;
using namespace sgpu;

namespace {

std::vector<ValidExample> examples_from(const std::vector<int>& labels,
                                        const std::vector<double>& probs) {
  if (labels.size() != probs.size()) {
    throw UsageError("labels and label_probs differ in length");
  }
  std::vector<ValidExample> out;
  out.reserve(labels.size());
  for (size_t i = 0; i < labels.size(); ++i) out.push_back({"", i, labels[i], probs[i]});
  return out;
}

LabelFrequencyEstimate estimate_from(const std::vector<double>& c) {
  LabelFrequencyEstimate e;
  for (double v : c) e.c.push_back(v);
  e.valid_counts.assign(c.size(), 0);
  return e;
}

py::dict recall_dict(const RecallReport& r) {
  auto rows = [](const std::vector<RecallAtK>& v) {
    py::list out;
    for (const auto& row : v) {
      py::dict d;
      d["k"] = row.k;
      d["recall"] = row.recall;
      d["mean_recall"] = row.mean_recall;
      d["per_class"] = row.per_class;
      d["head"] = row.buckets.head;
      d["middle"] = row.buckets.middle;
      d["tail"] = row.buckets.tail;
      out.append(d);
    }
    return out;
  };
  py::dict d;
  d["mode"] = to_string(r.mode);
  d["images"] = r.images;
  d["graph_constraint"] = rows(r.constrained);
  d["no_graph_constraint"] = rows(r.unconstrained);
  return d;
}

}  // namespace

PYBIND11_MODULE(_sgpu, m) {
  m.doc() = "Label-frequency estimation, debiasing and relation metrics";
  static py::exception<DataError> data_error(m, "DataError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DataError& e) {
      PyErr_SetString(data_error.ptr(), e.what());
    } catch (const UsageError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def("version", &tool_version);

  m.def(
      "train_est",
      [](const std::vector<int>& labels, const std::vector<double>& probs, int k) {
        const auto ex = examples_from(labels, probs);
        py::gil_scoped_release release;
        return train_est(ex, k).c;
      },
      py::arg("labels"), py::arg("label_probs"), py::arg("num_predicates"),
      "Per-class mean biased probability over labeled examples; None for absent classes.");

  m.def(
      "dlfe",
      [](const std::vector<std::pair<std::vector<int>, std::vector<double>>>& batches, int k,
         double alpha) {
        DlfeState state(k, alpha);
        for (const auto& [labels, probs] : batches) state.update(examples_from(labels, probs));
        return state.running();
      },
      py::arg("batches"), py::arg("num_predicates"), py::arg("alpha") = 0.1,
      "Moving-average estimate over (labels, label_probs) batches.");

  m.def(
      "recover_unbiased",
      [](const std::vector<double>& probs, const std::vector<double>& c, bool renormalize) {
        PairPrediction p;
        p.pred_probs = probs;
        return recover_unbiased(p, estimate_from(c), renormalize).pred_probs;
      },
      py::arg("probs"), py::arg("label_frequency"), py::arg("renormalize") = true);

  m.def(
      "average_precision",
      [](const std::vector<bool>& flags, std::size_t gt_count) {
        return average_precision(flags, gt_count);
      },
      py::arg("flags"), py::arg("gt_count"));

  m.def(
      "roi_align",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> map,
         std::array<double, 4> box, int out_h, int out_w, int sampling_ratio) {
        if (map.ndim() != 3) throw UsageError("feature map must be (channels, height, width)");
        const FeatureMap fm{static_cast<int>(map.shape(0)), static_cast<int>(map.shape(1)),
                            static_cast<int>(map.shape(2)),
                            std::span<const double>(map.data(), static_cast<size_t>(map.size()))};
        const auto out = roi_align(fm, {box[0], box[1], box[2], box[3]}, out_h, out_w,
                                   sampling_ratio);
        py::array_t<double> result({out.channels, out.height, out.width});
        std::copy(out.data.begin(), out.data.end(), result.mutable_data());
        return result;
      },
      py::arg("feature_map"), py::arg("box"), py::arg("out_h"), py::arg("out_w"),
      py::arg("sampling_ratio") = kDefaultSamplingRatio);

  m.def(
      "simulate",
      [](const Path& out, std::optional<Path> config, std::optional<std::uint64_t> seed) {
        py::gil_scoped_release release;
        run_simulate({config, out, seed, 1});
      },
      py::arg("out"), py::arg("config") = py::none(), py::arg("seed") = py::none());

  m.def(
      "estimate",
      [](const Path& gt, const Path& preds, const Path& out, const std::string& method,
         double alpha, const std::string& mode, int threads) {
        EstimateOptions o;
        o.method = estimator_from_string(method);
        o.alpha = alpha;
        o.gt = gt;
        o.preds = preds;
        o.mode = mode;
        o.out = out;
        o.threads = threads;
        py::gil_scoped_release release;
        const auto est = run_estimate(o);
        return std::make_pair(est.c, est.valid_counts);
      },
      py::arg("gt"), py::arg("preds"), py::arg("out"), py::arg("method") = "dlfe",
      py::arg("alpha") = 0.1, py::arg("mode") = "predcls", py::arg("threads") = 1,
      "Writes freq.json and returns (label_frequency, valid_counts).");

  m.def(
      "debias",
      [](const Path& preds, const Path& freq, const Path& out, bool renormalize, int threads) {
        DebiasOptions o;
        o.preds = preds;
        o.freq = freq;
        o.out = out;
        o.renormalize = renormalize;
        o.threads = threads;
        py::gil_scoped_release release;
        return run_debias(o);
      },
      py::arg("preds"), py::arg("freq"), py::arg("out"), py::arg("renormalize") = true,
      py::arg("threads") = 1);

  m.def(
      "eval_sgg",
      [](const Path& gt, const Path& preds, const Path& out, const std::string& mode,
         std::vector<int> ks, std::optional<Path> vocab, int threads) {
        EvalSggOptions o;
        o.gt = gt;
        o.preds = preds;
        o.out = out;
        o.mode = eval_mode_from_string(mode);
        o.ks = std::move(ks);
        o.vocab = std::move(vocab);
        o.threads = threads;
        RecallReport r;
        {
          py::gil_scoped_release release;
          r = run_eval_sgg(o);
        }
        return recall_dict(r);
      },
      py::arg("gt"), py::arg("preds"), py::arg("out"), py::arg("mode") = "predcls",
      py::arg("ks") = std::vector<int>{20, 50, 100}, py::arg("vocab") = py::none(),
      py::arg("threads") = 1);
}
