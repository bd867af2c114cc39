# Copyright 2026 The treeleak Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import csv
import io
import math

import pytest

import treeleak


def test_metrics_and_mechanisms():
    h, c, v = treeleak.v_measure([0, 0, 1, 1], [0, 0, 1, 2])
    assert h == pytest.approx(1.0)
    assert c == pytest.approx(2 / 3)
    assert v == pytest.approx(0.8)
    assert treeleak.auc_binary([0, 0, 1, 1], [0.1, 0.4, 0.35, 0.8]) == 0.75
    assert treeleak.rr_keep_probability(math.log(2), 2) == pytest.approx(2 / 3)
    assert treeleak.mi_upper_bound([2, 2], [2, 2]) == 0.0
    noisy = treeleak.randomized_response([0, 1, 2] * 10, 1.0, 3, seed=1)
    assert len(noisy) == 30 and set(noisy) <= {0, 1, 2}


def test_synthetic_dataset_shape():
    d = treeleak.gen_synthetic(50, 4, 3, 0.1, seed=2)
    assert len(d["features"]) == 50 and len(d["features"][0]) == 4
    assert d["class_count"] == 3


def test_run_experiment_from_dict():
    cfg = {
        "dataset": {"synthetic": {"rows": 200, "features": 6, "classes": 2, "spread": 0.2}},
        "model": {"max_depth": 3, "tree_count": 2},
        "seeds": [0],
    }
    out = treeleak.run_experiment(cfg)
    rows = list(csv.DictReader(io.StringIO(out["runs_csv"])))
    assert {r["method"] for r in rows} == {"id2graph", "cl", "uni", "uni_cl"}
    assert all(0.0 <= float(r["v_measure"]) <= 1.0 for r in rows)
    assert treeleak.summary_from_runs([out["runs_csv"]]) == out["summary_csv"]


def test_config_errors_are_value_errors():
    with pytest.raises(ValueError, match=r"\$\.oops"):
        treeleak.run_experiment({"dataset": {"synthetic": {}}, "oops": 1})
