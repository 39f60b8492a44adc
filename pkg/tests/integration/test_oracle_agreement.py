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

from tracelink.bench import exhaustive_oracle
from tracelink.correlation import (
    correlate,
    correlate_dataset,
)
from tracelink.workload import (
    generate,
    preset,
    retime,
)

# python -m pytest tests/integration/test_oracle_agreement.py -s -v


WINDOWS = 100


@pytest.fixture(scope="module")
def models():
    dataset = retime(generate(preset("frontend", request_count=2000, seed=99)), 5, seed=99)
    result = correlate_dataset(dataset.spans, dataset.call_graphs)["frontend"]
    assert not result.degraded
    return result.models


def total(result):
    return sum(result.best(ingress_id).pds for ingress_id in result.assignments)


def test_greedy_is_close_to_the_oracle(models):
    agreeing = scored = comparable = 0
    for seed in range(WINDOWS):
        dataset = retime(generate(preset("frontend", request_count=8, seed=seed)), 3, seed=seed)
        spans = [span for span in dataset.spans if span.service == "frontend"]
        graph = dataset.call_graphs["frontend"]
        greedy = correlate(spans, spans, graph, models=models)
        oracle = exhaustive_oracle(spans, spans, graph, models)
        assert len(greedy) <= len(oracle)
        for ingress_id in oracle.assignments:
            scored += 1
            chosen = greedy.best(ingress_id)
            if chosen is not None and chosen.egress_ids == oracle.best(ingress_id).egress_ids:
                agreeing += 1
        if len(greedy) == len(oracle):
            comparable += 1
            greedy_total, oracle_total = total(greedy), total(oracle)
            assert greedy_total <= oracle_total + 1e-6
            # scores are log densities, so the oracle's total is the larger one
            assert greedy_total >= oracle_total - 0.05 * abs(oracle_total)
    assert comparable >= 0.9 * WINDOWS
    assert agreeing >= 0.9 * scored
