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

from tracelink.exceptions import (
    DataError,
    IntegrityError,
    SpecError,
)
from tracelink.model import (
    EGRESS,
    GRPC,
    HTTP,
    INGRESS,
    RECV,
    SEND,
    Call,
    CallGraph,
    CandidateAssignment,
    CorrelationResult,
    EventRecord,
    GroundTruth,
    IdGenerator,
    PendingKey,
    Span,
)

# python -m pytest tests/unit/test_model.py -s -v


def test_span_duration_and_kind():
    span = Span("a", INGRESS, "frontend", 1, 100, 107, HTTP)
    assert span.duration_us == 7
    assert span.is_ingress
    assert not span.is_egress
    assert span.parent_span_id is None
    assert span.trace_id is None


def test_zero_length_span_is_valid():
    assert Span("a", EGRESS, "frontend", 1, 100, 100, GRPC).duration_us == 0


def test_span_end_before_start():
    with pytest.raises(IntegrityError) as error:
        Span("a", INGRESS, "frontend", 1, 100, 99, HTTP)
    assert error.value.span_id == "a"


@pytest.mark.parametrize("kind,protocol", [
    ("sideways", HTTP),
    (INGRESS, "smtp"),
])
def test_span_choices(kind, protocol):
    with pytest.raises(DataError):
        Span("a", kind, "frontend", 1, 0, 1, protocol)


def test_span_replace():
    span = Span("a", EGRESS, "frontend", 1, 0, 10, GRPC, peer_service="search")
    copy = span.replace(span_id="b", duplicate_of="a")
    assert copy.span_id == "b"
    assert copy.duplicate_of == "a"
    assert copy.peer_service == "search"


def test_grpc_event_requires_stream():
    with pytest.raises(IntegrityError):
        EventRecord("10.0.0.1:80", "10.0.0.2:9", RECV, GRPC, None, 1, 0)


def test_http_event_cannot_carry_stream():
    with pytest.raises(IntegrityError):
        EventRecord("10.0.0.1:80", "10.0.0.2:9", RECV, HTTP, 3, 1, 0)


def test_event_rejects_negative_timestamp():
    with pytest.raises(IntegrityError):
        EventRecord("10.0.0.1:80", "10.0.0.2:9", SEND, HTTP, None, 1, -1)


def test_pending_key_of_event():
    event = EventRecord("10.0.0.1:80", "10.0.0.2:9", RECV, GRPC, 101, 4, 10, span_id="x")
    assert PendingKey.of(event) == PendingKey("10.0.0.1:80", "10.0.0.2:9", GRPC, 101, 4)


def test_call_graph_positions():
    graph = CallGraph("frontend", ["search", ("profile", HTTP), {"target": "reservation"}])
    assert graph.n == 3
    assert graph.delay_positions == 4
    assert graph.targets == ("search", "profile", "reservation")
    assert graph.position_of("profile") == 2
    assert graph.position_of("geo") is None
    assert graph.egress_calls[1] == Call(2, "profile", HTTP)
    assert not graph.is_leaf


def test_leaf_call_graph():
    graph = CallGraph("geo")
    assert graph.is_leaf
    assert graph.delay_positions == 1


def test_call_graph_rejects_repeated_target():
    with pytest.raises(SpecError):
        CallGraph("frontend", ["search", "search"])


def test_call_graph_rejects_self_call():
    with pytest.raises(SpecError):
        CallGraph("frontend", ["frontend"])


def test_call_graph_dict_round_trip():
    graph = CallGraph("frontend", ["search", ("profile", HTTP)])
    assert CallGraph.from_dict(graph.to_dict()) == graph
    assert hash(CallGraph.from_dict(graph.to_dict())) == hash(graph)


def test_call_graph_from_malformed_dict():
    with pytest.raises(SpecError):
        CallGraph.from_dict({"calls": ["search"]})


def test_ground_truth_owner():
    truth = GroundTruth({"i1": ("e1", "e2"), "i2": ("e3", "e4")}, parents={"j1": "e1"})
    assert truth["i1"] == ("e1", "e2")
    assert truth.owner_of("e3") == "i2"
    assert truth.owner_of("nope") is None
    assert len(truth) == 2
    assert truth.parents == {"j1": "e1"}


def test_ground_truth_rejects_shared_egress():
    with pytest.raises(IntegrityError) as error:
        GroundTruth({"i1": ("e1", "e2"), "i2": ("e2", "e3")})
    assert error.value.span_id == "e2"


def test_ground_truth_check_lengths():
    spans = [Span("i1", INGRESS, "frontend", 1, 0, 10, GRPC)]
    graphs = {"frontend": CallGraph("frontend", ["search", "profile"])}
    GroundTruth({"i1": ("e1", "e2")}).check_lengths(spans, graphs)
    with pytest.raises(IntegrityError):
        GroundTruth({"i1": ("e1",)}).check_lengths(spans, graphs)


def test_candidate_assignment_flags():
    assignment = CandidateAssignment(["e1", "e2"], -3.5, 0.4)
    assert assignment.egress_ids == ("e1", "e2")
    assert assignment.duplicated == (False, False)
    assert not assignment.is_duplicated
    assert CandidateAssignment(("e1",), 0, 0, [True]).is_duplicated
    with pytest.raises(DataError):
        CandidateAssignment(("e1", "e2"), 0, 0, [True])


def test_correlation_result_one_to_one():
    result = CorrelationResult("frontend")
    result.assignments["i1"] = [CandidateAssignment(("e1",), -1.0, 0.1)]
    result.assignments["i2"] = [CandidateAssignment(("e2",), -1.0, 0.1)]
    result.check_one_to_one()
    assert result.best("i1").egress_ids == ("e1",)
    assert result.best("i3") is None
    assert result.duplicate_count == 0
    assert "i1" in result
    assert len(result) == 2


def test_correlation_result_detects_shared_egress():
    result = CorrelationResult("frontend")
    result.assignments["i1"] = [CandidateAssignment(("e1",), -1.0, 0.1)]
    result.assignments["i2"] = [CandidateAssignment(("e1",), -1.0, 0.1)]
    with pytest.raises(IntegrityError):
        result.check_one_to_one()


def test_correlation_result_allows_flagged_duplicates():
    result = CorrelationResult("frontend", multi_candidate=True)
    result.assignments["i1"] = [CandidateAssignment(("e1",), -1.0, 0.1)]
    result.assignments["i2"] = [CandidateAssignment(("e2",), -1.0, 0.1),
                                CandidateAssignment(("e1",), -1.5, 0.2, [True])]
    result.check_one_to_one()
    assert result.duplicate_count == 1
    assert len(result.emitted("i2")) == 2


def test_single_candidate_result_rejects_extras():
    result = CorrelationResult("frontend")
    result.assignments["i1"] = [CandidateAssignment(("e1",), -1.0, 0.1),
                                CandidateAssignment(("e2",), -1.0, 0.1)]
    with pytest.raises(IntegrityError):
        result.check_one_to_one()


def test_id_generator_is_seeded():
    ids = IdGenerator(5).take(100)
    assert ids == IdGenerator(5).take(100)
    assert ids != IdGenerator(6).take(100)
    assert len(set(ids)) == 100
    assert all(len(span_id) == 16 and int(span_id, 16) >= 0 for span_id in ids)
    assert all(span_id == span_id.lower() for span_id in ids)


def test_id_generator_call():
    ids = IdGenerator()
    first = ids()
    assert first != ids.next()
