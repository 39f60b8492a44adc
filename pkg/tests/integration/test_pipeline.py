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



from io import BytesIO

import pytest

from tracelink.correlation import correlate_dataset
from tracelink.graph import (
    reconstruct,
    render_tree,
    trace_accuracy,
)
from tracelink.model import INGRESS
from tracelink.serialization import (
    read_events,
    read_spans,
    write_events,
    write_spans,
)
from tracelink.spans import (
    build_spans,
    propagate_span_ids,
)
from tracelink.workload import (
    emit_events,
    generate,
    preset,
    retime,
)

# python -m pytest tests/integration/test_pipeline.py -s -v


@pytest.fixture(scope="module")
def chain():
    return retime(generate(preset("chain", request_count=1000, seed=11)), 10, seed=11)


@pytest.fixture(scope="module")
def built(chain):
    events = propagate_span_ids(emit_events(chain))
    return build_spans(events, chain.service_of_pid, chain.service_of_addr)


def test_every_event_is_accounted_for(built):
    assert built.unclosed_count == 0
    assert built.balances()


def test_propagation_links_every_downstream_ingress(chain, built):
    parents = chain.ground_truth.parents
    downstream = [span for span in built.spans if span.kind == INGRESS and span.service != "a"]
    assert len(downstream) == 2000
    for span in downstream:
        assert span.parent_span_id == parents[span.span_id]
    roots = [span for span in built.spans if span.kind == INGRESS and span.service == "a"]
    assert len(roots) == 1000
    assert all(span.parent_span_id is None for span in roots)


def test_events_survive_serialization(chain):
    sink = BytesIO()
    write_events(chain.events, sink)
    sink.seek(0)
    assert read_events(sink) == list(chain.events)


def test_built_spans_reconstruct_the_requests(chain, built):
    sink = BytesIO()
    write_spans(built.spans, sink)
    sink.seek(0)
    spans = read_spans(sink)
    results = correlate_dataset(spans, chain.call_graphs)
    assert sorted(results) == ["a", "b"]
    for result in results.values():
        result.check_one_to_one()
    graph = reconstruct(spans, results)
    report = trace_accuracy(graph, chain.ground_truth)
    assert report.span_level > 0.9
    assert report.trace_level > 0.75
    assert report.overhead_rate == 0.0


def test_correct_requests_render_as_one_tree(chain, built):
    results = correlate_dataset(built.spans, chain.call_graphs)
    graph = reconstruct(built.spans, results)
    components = graph.components()
    for members in chain.ground_truth.requests:
        trace_id = graph.trace_of(members[0])
        if set(components[trace_id]) == set(members):
            break
    else:
        pytest.fail("no request was reconstructed whole")
    lines = render_tree(graph, trace_id).splitlines()
    assert lines[0] == "trace %s" % trace_id
    assert len(lines) == 1 + len(members)
    assert lines[1].startswith("  ingress a %s " % members[0])
