// Copyright 2026 The treeleak Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Python bindings: the experiment runner plus the standalone primitives
// that are handy from notebooks.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "treeleak/experiment.h"
#include "treeleak/idlmid.h"
#include "treeleak/ldp.h"
#include "treeleak/metrics.h"
#include "treeleak/serialize.h"

namespace py = pybind11;
namespace tl = treeleak;

namespace {

py::dict dataset_dict(const tl::Dataset& d) {
  std::vector<std::vector<double>> rows(d.rows());
  for (std::size_t i = 0; i < d.rows(); ++i) {
    auto r = d.features.row(i);
    rows[i].assign(r.begin(), r.end());
  }
  py::dict out;
  out["features"] = rows;
  out["labels"] = d.labels;
  out["class_count"] = d.class_count;
  out["feature_names"] = d.feature_names;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Label leakage in vertically federated tree models";

  // Translators run newest first, so the most derived type is registered last.
  auto base = py::register_exception<tl::Error>(m, "Error", PyExc_RuntimeError);
  auto invalid = py::register_exception<tl::InvalidArgumentError>(
      m, "InvalidArgumentError", py::make_tuple(base, py::handle(PyExc_ValueError)));
  py::register_exception<tl::ConfigError>(m, "ConfigError", invalid);

  m.def(
      "run_experiment",
      [](const std::string& config_json, const std::string& base_dir,
         const std::string& out_dir) {
        const auto cfg = tl::ExperimentConfig::from_json(config_json, base_dir);
        tl::ExperimentReport rep;
        {
          py::gil_scoped_release release;
          rep = tl::run_experiment(cfg);
          if (!out_dir.empty()) tl::write_reports(rep, out_dir);
        }
        py::dict out;
        out["runs_csv"] = tl::runs_csv(rep.results, cfg);
        out["summary_csv"] = tl::summary_csv(rep.results, cfg);
        out["seconds"] = rep.seconds;
        return out;
      },
      py::arg("config_json"), py::arg("base_dir") = ".", py::arg("out_dir") = "",
      "Runs a JSON experiment config; returns the runs and summary CSV text.");

  m.def("summary_from_runs", &tl::summary_from_runs, py::arg("runs_csv_texts"));

  m.def(
      "gen_synthetic",
      [](int n, int f, int c, double spread, std::uint64_t seed, int informative) {
        return dataset_dict(tl::gen_synthetic(n, f, c, spread, seed, informative));
      },
      py::arg("rows"), py::arg("features"), py::arg("classes"), py::arg("spread"),
      py::arg("seed") = 0, py::arg("informative") = -1);

  m.def(
      "load_csv",
      [](const std::string& path, const std::string& label_column) {
        return dataset_dict(tl::load_csv(path, label_column));
      },
      py::arg("path"), py::arg("label_column") = "label");

  m.def(
      "v_measure",
      [](const std::vector<int>& truth, const std::vector<int>& pred) {
        const auto s = tl::v_measure_scores(truth, pred);
        return py::make_tuple(s.homogeneity, s.completeness, s.v);
      },
      py::arg("truth"), py::arg("pred"), "Returns (homogeneity, completeness, v).");

  m.def(
      "auc_binary",
      [](const std::vector<int>& truth, const std::vector<double>& scores) {
        return tl::auc_binary(truth, scores);
      },
      py::arg("truth"), py::arg("scores"));

  m.def(
      "mi_upper_bound",
      [](const std::vector<long>& class_totals, const std::vector<long>& node_class) {
        tl::NodeClassCounts c;
        c.class_totals = class_totals;
        c.node_class = node_class;
        for (long v : class_totals) c.total += v;
        for (long v : node_class) c.node_size += v;
        c.validate();
        return tl::mi_upper_bound(c);
      },
      py::arg("class_totals"), py::arg("node_class"));

  m.def(
      "randomized_response",
      [](const std::vector<int>& labels, double epsilon, int class_count, std::uint64_t seed) {
        return tl::randomized_response(labels, epsilon, class_count, seed).noised;
      },
      py::arg("labels"), py::arg("epsilon"), py::arg("class_count"), py::arg("seed") = 0);

  m.def("rr_keep_probability", &tl::rr_keep_probability, py::arg("epsilon"),
        py::arg("class_count"));
}
