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



import pytest

from tracelink.bench import (
    EXHAUSTIVE_ORACLE,
    FIXED,
    GREEDY,
    GREEDY_MULTI,
    NEAREST_NEIGHBOR,
    ExperimentSpec,
    run_cell,
    run_experiment,
)
from tracelink.conf import CorrelatorConfig
from tracelink.exceptions import ConfigurationError

# python -m pytest tests/unit/bench/test_experiment.py -s -v


def test_spec_defaults():
    spec = ExperimentSpec("chain", [1, 5])
    assert spec.levels == (1, 5)
    assert spec.seeds == (0,)
    assert spec.algorithms == (GREEDY,)
    assert isinstance(spec.config, CorrelatorConfig)
    assert spec.config.fixed_threshold_us is None
    assert spec.cells() == [(1, 0), (5, 0)]


def test_fixed_mode_sets_the_threshold():
    spec = ExperimentSpec("chain", [1], threshold_mode=FIXED, fixed_threshold_us=1200)
    assert spec.config.fixed_threshold_us == 1200.0


def test_config_from_a_dict():
    spec = ExperimentSpec("chain", [1], config={"delta": 3.0})
    assert spec.config.delta == 3.0


@pytest.mark.parametrize("arguments", [
    dict(levels=[]),
    dict(levels=[0]),
    dict(levels=[1], seeds=[]),
    dict(levels=[1], algorithms=["magic"]),
    dict(levels=[1], algorithms=[]),
    dict(levels=[1], threshold_mode="sometimes"),
    dict(levels=[1], config={"delta": -1}),
])
def test_invalid_specs(arguments):
    with pytest.raises(ConfigurationError):
        ExperimentSpec("chain", **arguments)


def test_back_to_back_requests_are_easy():
    spec = ExperimentSpec("chain", [1], algorithms=[GREEDY, NEAREST_NEIGHBOR, EXHAUSTIVE_ORACLE], request_count=200)
    rows, skipped = run_cell(spec, 1, 0)
    assert skipped == []
    assert [(row.algorithm, row.service) for row in rows] == [
        (GREEDY, "a"), (GREEDY, "b"),
        (NEAREST_NEIGHBOR, "a"), (NEAREST_NEIGHBOR, "b"),
        (EXHAUSTIVE_ORACLE, "a"), (EXHAUSTIVE_ORACLE, "b"),
    ]
    for row in rows:
        assert row.concurrency == 1
        assert row.span_accuracy >= 0.99
        assert row.span_overhead_rate == 0.0
    nearest = [row for row in rows if row.algorithm == NEAREST_NEIGHBOR]
    assert all(row.span_accuracy == 1.0 and row.trace_accuracy == 1.0 for row in nearest)
    assert all(row.wrong_with_lower_true_pds_fraction is None for row in nearest)
    assert all(row.ambiguity_ratio_10pct is None for row in nearest)


def test_oracle_is_skipped_on_large_windows():
    spec = ExperimentSpec("chain", [20], algorithms=[GREEDY, EXHAUSTIVE_ORACLE], request_count=200)
    rows, skipped = run_cell(spec, 20, 0)
    assert {row.algorithm for row in rows} == {GREEDY}
    assert [key for key, _ in skipped] == [(EXHAUSTIVE_ORACLE, "chain", 20, 0)]


def test_experiment_grid():
    spec = ExperimentSpec("chain", [1, 10], seeds=[0, 1], algorithms=[GREEDY, GREEDY_MULTI], request_count=150)
    skipped = []
    rows = run_experiment(spec, skipped)
    assert skipped == []
    assert len(rows) == 2 * 2 * 2 * 2
    assert [row.key()[2:] for row in rows[::4]] == [(1, 0), (1, 1), (10, 0), (10, 1)]
    for row in rows:
        assert 0.0 <= row.span_accuracy <= 1.0
        assert row.candidates_per_ingress_mean > 0.9
        if row.algorithm == GREEDY:
            assert row.span_overhead_rate == 0.0


def test_cells_are_reproducible():
    spec = ExperimentSpec("chain", [10], algorithms=[GREEDY], request_count=100)
    first, _ = run_cell(spec, 10, 3)
    second, _ = run_cell(spec, 10, 3)
    assert [row.span_accuracy for row in first] == [row.span_accuracy for row in second]
