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
    MetricsRow,
    ambiguity_ratios,
    nearest_neighbor_baseline,
    span_accuracy,
    span_overhead_rate,
    true_delays,
    wrong_with_lower_true_pds,
)
from tracelink.bench.metrics import service_ingress
from tracelink.conf import CorrelatorConfig
from tracelink.correlation import correlate
from tracelink.exceptions import (
    CoverageError,
    DataError,
)
from tracelink.model import (
    CorrelationResult,
    GroundTruth,
)

from ..correlation.helpers import (
    GRAPH,
    egress,
    ingress,
    two_requests,
)

# python -m pytest tests/unit/bench/test_metrics.py -s -v


TRUTH = GroundTruth({"i1": ("e1",), "i2": ("e2",)})

SWAPPED = GroundTruth({"i1": ("e2",), "i2": ("e1",)})


def row(**changes):
    values = dict(algorithm="greedy", service="s", concurrency=10, seed=0, span_accuracy=0.9, trace_accuracy=0.8,
                  wrong_with_lower_true_pds_fraction=0.5, ambiguity_ratio_10pct=0.1, ambiguity_ratio_15pct=0.2,
                  candidate_find_ms=1.5, correlate_ms=3.0, candidates_per_ingress_mean=2.5, span_overhead_rate=0.0)
    values.update(changes)
    return MetricsRow(**values)


@pytest.fixture
def greedy():
    spans, calls = two_requests()
    return correlate(spans, calls, GRAPH)


def test_row_fields():
    assert len(MetricsRow._fields) == 13
    assert row().key() == ("greedy", "s", 10, 0)
    assert row().to_dict()["span_overhead_rate"] == 0.0


@pytest.mark.parametrize("changes", [
    {"span_accuracy": 1.5},
    {"trace_accuracy": -0.1},
    {"ambiguity_ratio_15pct": 2.0},
    {"correlate_ms": -1.0},
    {"span_overhead_rate": -0.5},
])
def test_invalid_rows(changes):
    with pytest.raises(DataError):
        row(**changes)


def test_inapplicable_measures_are_none():
    assert row(wrong_with_lower_true_pds_fraction=None, ambiguity_ratio_10pct=None).ambiguity_ratio_10pct is None


def test_accuracy(greedy):
    assert span_accuracy(greedy, TRUTH) == 1.0
    assert span_accuracy(greedy, SWAPPED) == 0.0


def test_accuracy_counts_unassigned_spans_as_wrong():
    result = CorrelationResult("s")
    result.uncorrelatable.add("i1")
    result.unassigned.add("i2")
    assert service_ingress(result) == {"i1", "i2"}
    assert span_accuracy(result, TRUTH) == 0.0


def test_accuracy_needs_full_truth(greedy):
    with pytest.raises(CoverageError):
        span_accuracy(greedy, GroundTruth({"i1": ("e1",)}))


def test_accuracy_of_nothing():
    assert span_accuracy(CorrelationResult("s"), TRUTH) == 1.0


def test_wrong_with_lower_true_score(greedy):
    assert wrong_with_lower_true_pds(greedy, TRUTH) == 0.0
    assert wrong_with_lower_true_pds(greedy, SWAPPED) == 1.0


def test_measures_that_need_candidates():
    spans, calls = two_requests()
    nearest = nearest_neighbor_baseline(spans, calls, GRAPH)
    assert wrong_with_lower_true_pds(nearest, TRUTH) is None
    assert ambiguity_ratios(nearest, TRUTH, {}) is None


def test_true_delays():
    spans, calls = two_requests()
    spans_by_id = {span.span_id: span for span in spans + calls}
    first, last = true_delays(spans_by_id, TRUTH, ["i2", "i1"])
    assert first.tolist() == [100, 100]
    assert last.tolist() == [400, 500]
    assert true_delays(spans_by_id, TRUTH, []) == []


def test_ambiguity():
    spans = [ingress("i1", 0, 1000), ingress("i2", 100, 1100)]
    calls = [egress("e1", 100, 600), egress("e2", 105, 605)]
    spans_by_id = {span.span_id: span for span in spans + calls}
    result = correlate(spans, calls, GRAPH)
    assert ambiguity_ratios(result, TRUTH, spans_by_id) == (1.0, 1.0)
    assert ambiguity_ratios(result, TRUTH, spans_by_id, levels=(0.01,)) == (0.0,)


def test_unambiguous_requests(greedy):
    spans, calls = two_requests()
    spans_by_id = {span.span_id: span for span in spans + calls}
    assert ambiguity_ratios(greedy, TRUTH, spans_by_id) == (0.0, 0.0)


def test_overhead():
    spans, calls = two_requests()
    config = CorrelatorConfig(multi_candidate=True, multi_candidate_margin=2.0)
    result = correlate(spans, calls, GRAPH, config)
    assert span_overhead_rate(result, spans + calls) == pytest.approx(2 / 4)
    assert span_overhead_rate(correlate(spans, calls, GRAPH), spans + calls) == 0.0
    assert span_overhead_rate(CorrelationResult("x"), spans) == 0.0
