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
from numpy.random import default_rng

from tracelink.bench import true_delays
from tracelink.exceptions import EstimationError
from tracelink.model import (
    EGRESS,
    HTTP,
    INGRESS,
    CallGraph,
    Span,
)
from tracelink.spans import group_by_position
from tracelink.stats import (
    DelayEstimate,
    estimate_means,
)
from tracelink.workload import (
    generate,
    preset,
)

# python -m pytest tests/unit/stats/test_estimation.py -s -v


GRAPH = CallGraph("s", [("t", HTTP)])


def ingress(span_id, start, end):
    return Span(span_id, INGRESS, "s", 1, start, end, HTTP)


def egress(span_id, start, end):
    return Span(span_id, EGRESS, "s", 1, start, end, HTTP, peer_service="t")


INGRESS_SPANS = [ingress("i1", 0, 100), ingress("i2", 200, 330)]
EGRESS_SPANS = [egress("e1", 10, 40), egress("e2", 220, 300)]


def test_means_per_position():
    estimates = estimate_means(INGRESS_SPANS, [EGRESS_SPANS], GRAPH)
    assert estimates == [DelayEstimate(1, 15.0, 60.0, 2), DelayEstimate(2, 45.0, 60.0, 2)]


def test_means_sum_to_total():
    estimates = estimate_means(INGRESS_SPANS, [EGRESS_SPANS], GRAPH)
    assert sum(estimate.mu for estimate in estimates) == pytest.approx(estimates[0].total_mu)


def test_means_do_not_need_an_assignment():
    forward = estimate_means(INGRESS_SPANS, [EGRESS_SPANS], GRAPH)
    backward = estimate_means(INGRESS_SPANS[::-1], [EGRESS_SPANS[::-1]], GRAPH)
    assert forward == backward


def test_leaf_has_one_position():
    leaf = CallGraph("s")
    estimate, = estimate_means(INGRESS_SPANS, [], leaf)
    assert estimate.mu == estimate.total_mu == 115.0


def test_two_calls():
    graph = CallGraph("s", ["t", "u"])
    spans = [ingress("i", 0, 100)]
    calls = [[egress("a", 5, 20)], [egress("b", 30, 90)]]
    assert [estimate.mu for estimate in estimate_means(spans, calls, graph)] == [5.0, 10.0, 10.0]


def test_no_ingress():
    with pytest.raises(EstimationError):
        estimate_means([], [[]], GRAPH)


def test_count_mismatch():
    with pytest.raises(EstimationError):
        estimate_means(INGRESS_SPANS, [EGRESS_SPANS[:1]], GRAPH)


def test_position_mismatch():
    with pytest.raises(EstimationError):
        estimate_means(INGRESS_SPANS, [EGRESS_SPANS, EGRESS_SPANS], GRAPH)


@pytest.fixture(scope="module")
def frontend():
    dataset = generate(preset("frontend", request_count=10000, seed=1))
    graph = dataset.call_graphs["frontend"]
    ingress = [span for span in dataset.spans if span.service == "frontend" and span.kind == INGRESS]
    egress = [span for span in dataset.spans if span.service == "frontend" and span.kind == EGRESS]
    return dataset, ingress, group_by_position(egress, graph), graph


def test_means_of_lognormal_delays(frontend):
    dataset, ingress, positions, graph = frontend
    spans_by_id = {span.span_id: span for span in dataset.spans}
    delays = true_delays(spans_by_id, dataset.ground_truth, [span.span_id for span in ingress])
    estimates = estimate_means(ingress, positions, graph)
    assert len(estimates) == 4
    for estimate, sample, nominal in zip(estimates, delays, (120, 80, 80, 150)):
        assert estimate.mu == pytest.approx(sample.mean(), rel=1e-9)
        assert estimate.mu == pytest.approx(nominal, rel=0.05)


@pytest.mark.parametrize("seed", range(5))
def test_means_ignore_span_order(frontend, seed):
    _, ingress, positions, graph = frontend
    rng = default_rng(seed)
    shuffled_ingress = [ingress[i] for i in rng.permutation(len(ingress))]
    shuffled_positions = [[egress[i] for i in rng.permutation(len(egress))] for egress in positions]
    assert estimate_means(shuffled_ingress, shuffled_positions, graph) == estimate_means(ingress, positions, graph)
