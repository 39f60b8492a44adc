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
Core trace data types.

Spans and events are immutable named tuples validated on construction.
Timestamps are integer microseconds; span and trace ids are opaque
16-character lowercase hex strings.
"""


from collections import namedtuple
from collections.abc import Mapping

from numpy.random import default_rng

from tracelink.exceptions import (
    DataError,
    IntegrityError,
    SpecError,
)


__all__ = [
    "INGRESS",
    "EGRESS",
    "SEND",
    "RECV",
    "HTTP",
    "GRPC",
    "OTHER",
    "EventRecord",
    "Span",
    "PendingKey",
    "Call",
    "CallGraph",
    "GroundTruth",
    "CandidateAssignment",
    "CorrelationResult",
    "IdGenerator",
]


INGRESS = "ingress"
EGRESS = "egress"
SPAN_KINDS = (INGRESS, EGRESS)

SEND = "send"
RECV = "recv"
SYSCALLS = (SEND, RECV)

HTTP = "http"
GRPC = "grpc"
OTHER = "other"
PROTOCOLS = (HTTP, GRPC, OTHER)

#: Protocols that multiplex several requests over one connection
MULTIPLEXED_PROTOCOLS = (GRPC,)


def _check_choice(name, value, choices):
    if value not in choices:
        raise DataError("Invalid %s %r (expected one of %s)" % (name, value, ", ".join(choices)))


class EventRecord(namedtuple("EventRecord", [
    "remote_addr", "local_addr", "syscall", "protocol", "stream_id",
    "pid", "timestamp_us", "propagated_span_id", "span_id", "token",
])):
    """ One syscall-level observation of a request or response passing
    through a socket.

    ``span_id`` is the id the probe assigns when the event opens a span
    and ``token`` identifies one cross-service request end to end; both
    are optional.
    """

    def __new__(cls, remote_addr, local_addr, syscall, protocol, stream_id, pid, timestamp_us,
                propagated_span_id=None, span_id=None, token=None):
        _check_choice("syscall", syscall, SYSCALLS)
        _check_choice("protocol", protocol, PROTOCOLS)
        if timestamp_us < 0:
            raise IntegrityError("Negative event timestamp %r" % timestamp_us)
        if protocol in MULTIPLEXED_PROTOCOLS:
            if stream_id is None or stream_id < 0:
                raise IntegrityError("%s events require a non-negative stream id" % protocol)
        elif stream_id is not None:
            raise IntegrityError("%s events cannot carry a stream id" % protocol)
        return super().__new__(cls, remote_addr, local_addr, syscall, protocol, stream_id,
                               int(pid), int(timestamp_us), propagated_span_id, span_id, token)


class PendingKey(namedtuple("PendingKey", ["remote_addr", "local_addr", "protocol", "stream_id", "pid"])):
    """ Lookup key of an open span: the socket tuple, protocol, stream
    and process of the event that opened it.
    """

    @classmethod
    def of(cls, event):
        return cls(event.remote_addr, event.local_addr, event.protocol, event.stream_id, event.pid)


class Span(namedtuple("Span", [
    "span_id", "kind", "service", "pid", "start_us", "end_us", "protocol",
    "parent_span_id", "trace_id", "peer_service", "duplicate_of",
])):
    """ A timed operation observed at one service.

    Ingress spans cover receive-to-respond of a request served by
    ``service``; egress spans cover send-to-response of a request made
    by ``service`` to ``peer_service``.
    """

    def __new__(cls, span_id, kind, service, pid, start_us, end_us, protocol,
                parent_span_id=None, trace_id=None, peer_service=None, duplicate_of=None):
        _check_choice("span kind", kind, SPAN_KINDS)
        _check_choice("protocol", protocol, PROTOCOLS)
        if not span_id:
            raise IntegrityError("Span id must not be empty")
        if end_us < start_us:
            raise IntegrityError("Span %s ends (%d) before it starts (%d)" % (span_id, end_us, start_us),
                                 span_id=span_id)
        return super().__new__(cls, span_id, kind, service, int(pid), int(start_us), int(end_us),
                               protocol, parent_span_id, trace_id, peer_service, duplicate_of)

    @property
    def duration_us(self):
        return self.end_us - self.start_us

    @property
    def is_ingress(self):
        return self.kind == INGRESS

    @property
    def is_egress(self):
        return self.kind == EGRESS

    def replace(self, **changes):
        return self._replace(**changes)


class Call(namedtuple("Call", ["position", "target", "protocol"])):
    """ One downstream call of a call graph, at 1-based ``position``.
    """

    def __new__(cls, position, target, protocol=GRPC):
        _check_choice("protocol", protocol, PROTOCOLS)
        return super().__new__(cls, int(position), target, protocol)


class CallGraph:
    """ The ordered downstream calls an ingress request of one service
    triggers. A service with no calls is a leaf.

    :param service: name of the calling service
    :param calls: downstream targets in call order; each item may be a
                  target name, a ``(target, protocol)`` pair, a mapping
                  with ``target`` and ``protocol`` keys or a :class:`.Call`
    """

    def __init__(self, service, calls=()):
        self.service = service
        egress_calls = []
        for position, call in enumerate(calls, start=1):
            if isinstance(call, Call):
                if call.position != position:
                    raise SpecError("Call graph of %s has out-of-order position %d" % (service, call.position))
                egress_calls.append(call)
            elif isinstance(call, str):
                egress_calls.append(Call(position, call))
            elif isinstance(call, Mapping):
                egress_calls.append(Call(position, call["target"], call.get("protocol", GRPC)))
            else:
                target, protocol = call
                egress_calls.append(Call(position, target, protocol))
        targets = [call.target for call in egress_calls]
        if len(set(targets)) != len(targets):
            raise SpecError("Call graph of %s calls a target more than once: %s" % (service, targets))
        if service in targets:
            raise SpecError("Call graph of %s calls itself" % service)
        self.egress_calls = tuple(egress_calls)
        self._positions = {call.target: call.position for call in egress_calls}

    def __repr__(self):
        return "<CallGraph service=%r targets=%r>" % (self.service, self.targets)

    def __eq__(self, other):
        if not isinstance(other, CallGraph):
            return NotImplemented
        return self.service == other.service and self.egress_calls == other.egress_calls

    def __hash__(self):
        return hash((self.service, self.egress_calls))

    @property
    def n(self):
        """ Number of downstream calls.
        """
        return len(self.egress_calls)

    @property
    def delay_positions(self):
        """ Number of delay slots, one more than the number of calls.
        """
        return self.n + 1

    @property
    def is_leaf(self):
        return self.n == 0

    @property
    def targets(self):
        return tuple(call.target for call in self.egress_calls)

    def position_of(self, target):
        """ Return the 1-based position of the call to ``target``, or
        :const:`None` if this service never calls it.
        """
        return self._positions.get(target)

    def to_dict(self):
        return {
            "service": self.service,
            "calls": [{"target": call.target, "protocol": call.protocol} for call in self.egress_calls],
        }

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(data["service"], data.get("calls") or ())
        except (KeyError, TypeError, ValueError) as error:
            raise SpecError("Malformed call graph document: %s" % error) from error


class GroundTruth(Mapping):
    """ The true ingress-to-egress tuples of a dataset, keyed by ingress
    span id, together with the true cross-service parent links (child
    ingress id to parent egress id) and the span ids of every
    end-to-end request.
    """

    def __init__(self, tuples=None, parents=None, requests=None):
        self._tuples = {ingress_id: tuple(egress_ids) for ingress_id, egress_ids in (tuples or {}).items()}
        self.parents = dict(parents or {})
        self.requests = [tuple(members) for members in (requests or ())]
        owners = {}
        for ingress_id, egress_ids in self._tuples.items():
            for egress_id in egress_ids:
                if egress_id in owners:
                    raise IntegrityError("Egress span %s appears in the ground truth of both %s and %s" % (
                        egress_id, owners[egress_id], ingress_id), span_id=egress_id)
                owners[egress_id] = ingress_id
        self._owners = owners

    def __getitem__(self, ingress_id):
        return self._tuples[ingress_id]

    def __iter__(self):
        return iter(self._tuples)

    def __len__(self):
        return len(self._tuples)

    def __repr__(self):
        return "<GroundTruth tuples=%d parents=%d requests=%d>" % (
            len(self._tuples), len(self.parents), len(self.requests))

    def owner_of(self, egress_id):
        """ Return the ingress span id that truly caused ``egress_id``.
        """
        return self._owners.get(egress_id)

    def check_lengths(self, spans, call_graphs):
        """ Check that every tuple has one egress span per downstream
        call of its service's call graph.
        """
        service_of = {span.span_id: span.service for span in spans}
        for ingress_id, egress_ids in self._tuples.items():
            graph = call_graphs.get(service_of.get(ingress_id))
            if graph is not None and len(egress_ids) != graph.n:
                raise IntegrityError("Ground truth of %s has %d egress spans, call graph expects %d" % (
                    ingress_id, len(egress_ids), graph.n), span_id=ingress_id)


class CandidateAssignment(namedtuple("CandidateAssignment", ["egress_ids", "pds", "cds", "duplicated"])):
    """ One emitted correlation of an ingress span: the egress span ids
    in call-graph order, their scores and, per egress id, whether it is
    a duplicate of an egress span already claimed elsewhere.
    """

    def __new__(cls, egress_ids, pds, cds, duplicated=None):
        egress_ids = tuple(egress_ids)
        if duplicated is None:
            duplicated = (False,) * len(egress_ids)
        duplicated = tuple(bool(flag) for flag in duplicated)
        if len(duplicated) != len(egress_ids):
            raise DataError("One duplicated flag is required per egress id")
        return super().__new__(cls, egress_ids, float(pds), float(cds), duplicated)

    @property
    def is_duplicated(self):
        return any(self.duplicated)


class CorrelationResult:
    """ Outcome of correlating the spans of one service.

    ``assignments`` maps each correlated ingress span id to a list of
    :class:`.CandidateAssignment`, best first. Ingress spans with no
    candidate at all are listed in ``uncorrelatable``; those whose
    candidates were all taken by others are listed in ``unassigned``.
    """

    def __init__(self, service, assignments=None, multi_candidate=False):
        self.service = service
        self.assignments = dict(assignments or {})
        self.multi_candidate = multi_candidate
        self.uncorrelatable = set()
        self.unassigned = set()
        self.approximate = []
        self.degraded = False
        self.high_certainty = 0
        self.models = []
        self.estimates = []
        self.timings = {"candidate_find_ms": 0.0, "correlate_ms": 0.0}
        self.candidates_per_ingress_mean = 0.0
        self.candidates = {}
        self.chosen_rows = {}

    def __repr__(self):
        return "<CorrelationResult service=%r assigned=%d unassigned=%d uncorrelatable=%d>" % (
            self.service, len(self.assignments), len(self.unassigned), len(self.uncorrelatable))

    def __len__(self):
        return len(self.assignments)

    def __iter__(self):
        return iter(self.assignments)

    def __contains__(self, ingress_id):
        return ingress_id in self.assignments

    def best(self, ingress_id):
        """ Return the top assignment of an ingress span, or
        :const:`None` if it has none.
        """
        emitted = self.assignments.get(ingress_id)
        if emitted:
            return emitted[0]
        return None

    def emitted(self, ingress_id):
        return list(self.assignments.get(ingress_id, ()))

    @property
    def duplicate_count(self):
        """ Number of egress span duplicates this result materialises.
        """
        return sum(sum(assignment.duplicated) for emitted in self.assignments.values()
                   for assignment in emitted)

    def check_one_to_one(self):
        """ Raise :class:`.IntegrityError` if an egress span id is used
        by two ingress spans without being flagged as a duplicate.
        """
        owners = {}
        for ingress_id in sorted(self.assignments):
            for assignment in self.assignments[ingress_id]:
                for egress_id, duplicated in zip(assignment.egress_ids, assignment.duplicated):
                    if duplicated:
                        continue
                    owner = owners.setdefault(egress_id, ingress_id)
                    if owner != ingress_id:
                        raise IntegrityError("Egress span %s is assigned to both %s and %s" % (
                            egress_id, owner, ingress_id), span_id=egress_id)
            if not self.multi_candidate and len(self.assignments[ingress_id]) != 1:
                raise IntegrityError("Ingress span %s has %d assignments in single-candidate mode" % (
                    ingress_id, len(self.assignments[ingress_id])), span_id=ingress_id)


class IdGenerator:
    """ Issues unique 16-character lowercase hex ids from a seeded
    generator, so that datasets built from the same seed carry the same
    ids.
    """

    def __init__(self, seed=0):
        self._rng = default_rng(seed)
        self._issued = set()
        self._buffer = []

    def _refill(self, count):
        values = self._rng.integers(0, 2 ** 64, size=max(count, 256), dtype="uint64")
        self._buffer.extend("%016x" % value for value in reversed(values.tolist()))

    def next(self):
        while True:
            if not self._buffer:
                self._refill(256)
            value = self._buffer.pop()
            if value not in self._issued:
                self._issued.add(value)
                return value

    __call__ = next

    def take(self, count):
        """ Issue ``count`` ids at once.
        """
        if len(self._buffer) < count:
            self._refill(count - len(self._buffer))
        return [self.next() for _ in range(count)]
