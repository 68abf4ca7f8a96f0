# Copyright 2026 The csrover Authors. All Rights Reserved.
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

"""Code-switched ASR scoring, ROVER combination and simulation."""

from csrover._csrover import (
    IoError,
    MissingHypothesisError,
    TrigramLM,
    UnsupportedScriptError,
    ValidationError,
    align,
    category,
    combine,
    render,
    resolve_config,
    run_ensemble,
    score,
    simulate,
    split,
    tokenize,
)

__all__ = [
    "IoError",
    "MissingHypothesisError",
    "TrigramLM",
    "UnsupportedScriptError",
    "ValidationError",
    "align",
    "category",
    "combine",
    "render",
    "resolve_config",
    "run_ensemble",
    "score",
    "simulate",
    "split",
    "tokenize",
]
