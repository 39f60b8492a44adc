#!/usr/bin/env python
# -*- encoding: utf-8 -*-

# Copyright (c) 2020-2026 "Tracelink,"
# Tracelink Contributors
#
# This file is part of Tracelink.
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


"""
Evaluation harness: baselines, metrics, experiment grids and reports.
"""


from tracelink.bench.baselines import (
    ORACLE_WINDOW_LIMIT,
    exhaustive_oracle,
    nearest_neighbor_baseline,
    oracle_assign,
    time_windows,
)
from tracelink.bench.experiment import (
    ADAPTIVE,
    ALGORITHM_ALIASES,
    ALGORITHMS,
    EXHAUSTIVE_ORACLE,
    FIXED,
    GREEDY,
    GREEDY_MULTI,
    NEAREST_NEIGHBOR,
    ExperimentSpec,
    run_cell,
    run_experiment,
)
from tracelink.bench.metrics import (
    AMBIGUITY_LEVELS,
    MetricsRow,
    ambiguity_ratios,
    span_accuracy,
    span_overhead_rate,
    true_delays,
    wrong_with_lower_true_pds,
)
from tracelink.bench.report import (
    CSV,
    FORMAT_ALIASES,
    FORMATS,
    JSON,
    MARKDOWN,
    report,
)


__all__ = [
    "ORACLE_WINDOW_LIMIT",
    "exhaustive_oracle",
    "nearest_neighbor_baseline",
    "oracle_assign",
    "time_windows",
    "ADAPTIVE",
    "ALGORITHM_ALIASES",
    "ALGORITHMS",
    "EXHAUSTIVE_ORACLE",
    "FIXED",
    "GREEDY",
    "GREEDY_MULTI",
    "NEAREST_NEIGHBOR",
    "ExperimentSpec",
    "run_cell",
    "run_experiment",
    "AMBIGUITY_LEVELS",
    "MetricsRow",
    "ambiguity_ratios",
    "span_accuracy",
    "span_overhead_rate",
    "true_delays",
    "wrong_with_lower_true_pds",
    "CSV",
    "FORMAT_ALIASES",
    "FORMATS",
    "JSON",
    "MARKDOWN",
    "report",
]
