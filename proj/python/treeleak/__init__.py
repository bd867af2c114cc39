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
"""Label leakage attacks and defenses for vertically federated trees."""

import json as _json
import os as _os

from ._core import (  # noqa: F401
    ConfigError,
    Error,
    InvalidArgumentError,
    auc_binary,
    gen_synthetic,
    load_csv,
    mi_upper_bound,
    randomized_response,
    rr_keep_probability,
    summary_from_runs,
    v_measure,
)
from ._core import run_experiment as _run_experiment

__version__ = "0.1.0"


def run_experiment(config, base_dir=None, out_dir=""):
    """Run an experiment from a dict, a JSON string or a path to a JSON file."""
    if isinstance(config, dict):
        text, base = _json.dumps(config), base_dir or "."
    elif isinstance(config, str) and _os.path.isfile(config):
        with open(config, encoding="utf-8") as fh:
            text = fh.read()
        base = base_dir or _os.path.dirname(_os.path.abspath(config))
    else:
        text, base = config, base_dir or "."
    return _run_experiment(text, base, out_dir)
