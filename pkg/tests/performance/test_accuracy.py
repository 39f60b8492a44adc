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



import numpy as np
from pytest import mark

from tests.env import (
    TRACELINK_REQUESTS,
    TRACELINK_SEEDS,
)
from tracelink.bench import (
    GREEDY,
    GREEDY_MULTI,
    NEAREST_NEIGHBOR,
    ExperimentSpec,
    run_cell,
    run_experiment,
)

# python -m pytest tests/performance/test_accuracy.py -s -v


def frontend_rows(benchmark, level, seed, algorithms):
    spec = ExperimentSpec("frontend", [level], [seed], algorithms, request_count=TRACELINK_REQUESTS)
    rows, skipped = benchmark.pedantic(run_cell, args=(spec, level, seed), rounds=1, iterations=1)
    assert not skipped
    return {row.algorithm: row for row in rows if row.service == "frontend"}


class TestLowConcurrency:

    @mark.parametrize("level", [250, 500])
    @mark.parametrize("seed", TRACELINK_SEEDS)
    def test_greedy_accuracy(self, benchmark, level, seed):
        rows = frontend_rows(benchmark, level, seed, [GREEDY])
        assert rows[GREEDY].span_accuracy >= 0.95


class TestHighConcurrency:

    @mark.parametrize("level", [1000, 1500])
    def test_greedy_accuracy(self, benchmark, level):
        rows = frontend_rows(benchmark, level, TRACELINK_SEEDS[0], [GREEDY, NEAREST_NEIGHBOR])
        assert rows[GREEDY].span_accuracy >= 0.85
        if level == 1500:
            assert rows[GREEDY].span_accuracy >= rows[NEAREST_NEIGHBOR].span_accuracy + 0.10


class TestMultiCandidate:

    def test_duplication_buys_accuracy(self, benchmark):
        rows = frontend_rows(benchmark, 1000, TRACELINK_SEEDS[0], [GREEDY, GREEDY_MULTI])
        assert rows[GREEDY_MULTI].span_accuracy >= rows[GREEDY].span_accuracy
        assert rows[GREEDY_MULTI].span_overhead_rate <= 0.25
        assert rows[GREEDY].span_overhead_rate == 0.0


class TestConcurrencyTrend:

    def test_accuracy_does_not_rise_with_concurrency(self, benchmark):
        spec = ExperimentSpec("frontend", [250, 1500], range(5), [GREEDY, NEAREST_NEIGHBOR],
                              request_count=TRACELINK_REQUESTS)
        skipped = []
        rows = benchmark.pedantic(run_experiment, args=(spec, skipped), rounds=1, iterations=1)
        assert not skipped
        for algorithm in (GREEDY, NEAREST_NEIGHBOR):
            low, high = (np.mean([row.span_accuracy for row in rows if row.algorithm == algorithm
                                  and row.service == "frontend" and row.concurrency == level])
                         for level in (250, 1500))
            assert low >= high
