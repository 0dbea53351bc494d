# Copyright 2026 The kappa-sync Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python access to the kappa-sync simulator and verifiers."""

import json as _json

from ._core import (
    InvalidScenario,
    InvariantViolation,
    algorithm_names,
    extract_H,
    generate,
    impossibility_demo,
    protocol_names,
    reference_run,
    synth,
)
from ._core import run_scenario as _run_scenario


def run_scenario(config, seed=None):
    """Run a scenario given as a dict or JSON string."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    return _run_scenario(config, seed)


__all__ = [
    "InvalidScenario",
    "InvariantViolation",
    "algorithm_names",
    "extract_H",
    "generate",
    "impossibility_demo",
    "protocol_names",
    "reference_run",
    "run_scenario",
    "synth",
]
