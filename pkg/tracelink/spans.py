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
Span construction from ordered socket event streams.

Events are paired the way a probe pairs them in a kernel map: the first
event seen for a :class:`.PendingKey` opens a span (a ``recv`` opens an
ingress span, a ``send`` an egress span) and the next event under the
same key in the opposite direction closes it, removing the entry.
"""


from bisect import bisect_left
from collections import defaultdict, namedtuple
from logging import getLogger

from tracelink.exceptions import (
    IntegrityError,
    MappingError,
    OrderingError,
)
from tracelink.meta import experimental
from tracelink.model import (
    EGRESS,
    INGRESS,
    RECV,
    SEND,
    CallGraph,
    IdGenerator,
    PendingKey,
    Span,
)


__all__ = [
    "PendingSpan",
    "BuildResult",
    "SpanBuilder",
    "build_spans",
    "SpanIdPropagator",
    "propagate_span_ids",
    "derive_call_graphs",
    "group_by_position",
]


log = getLogger("tracelink")


class PendingSpan(namedtuple("PendingSpan", [
    "key", "span_id", "kind", "open_syscall", "start_us", "propagated_parent", "sequence",
])):
    """ An opened span awaiting the event that closes it.
    """


class BuildResult:
    """ Spans built from one event stream, in the order their opening
    events were seen, together with the pendings left open at the end
    of the stream.
    """

    def __init__(self, spans, unclosed, event_count, repeated_events):
        self.spans = spans
        self.unclosed = unclosed
        self.event_count = event_count
        self.repeated_events = repeated_events

    def __repr__(self):
        return "<BuildResult spans=%d unclosed=%d>" % (len(self.spans), len(self.unclosed))

    def __iter__(self):
        return iter(self.spans)

    def __len__(self):
        return len(self.spans)

    @property
    def unclosed_count(self):
        return len(self.unclosed)

    def balances(self):
        """ Check the event accounting: two events per span, one per
        unclosed pending and one per repeated same-direction event.
        """
        return 2 * len(self.spans) + len(self.unclosed) + self.repeated_events == self.event_count


class SpanBuilder:
    """ Sequential fold of an ordered event stream into spans.

    :param service_of_pid: mapping of process id to service name
    :param service_of_addr: optional mapping of listening endpoint to
                            service name, used to name the peer of each
                            egress span
    :param ids: :class:`.IdGenerator` for spans whose opening event
                carries no span id
    """

    def __init__(self, service_of_pid, service_of_addr=None, ids=None):
        self.service_of_pid = dict(service_of_pid)
        self.service_of_addr = dict(service_of_addr or {})
        self.ids = ids or IdGenerator()
        self._pending = {}
        self._spans = []
        self._event_count = 0
        self._repeated = 0
        self._last_us = None

    def __len__(self):
        return len(self._pending)

    def feed(self, event):
        """ Apply one event, returning the closed :class:`.Span` if the
        event ended one, otherwise :const:`None`.
        """
        if self._last_us is not None and event.timestamp_us < self._last_us:
            raise OrderingError("Event at %d precedes previous event at %d" % (
                event.timestamp_us, self._last_us))
        self._last_us = event.timestamp_us
        if event.pid not in self.service_of_pid:
            raise MappingError("No service known for pid %r" % event.pid)
        sequence = self._event_count
        self._event_count += 1
        key = PendingKey.of(event)
        pending = self._pending.get(key)
        if pending is None:
            kind = INGRESS if event.syscall == RECV else EGRESS
            span_id = event.span_id or self.ids.next()
            self._pending[key] = PendingSpan(key, span_id, kind, event.syscall, event.timestamp_us,
                                             event.propagated_span_id, sequence)
            return None
        if pending.open_syscall == event.syscall:
            # continuation of a message already in flight
            self._repeated += 1
            return None
        del self._pending[key]
        span = self._close(pending, event)
        self._spans.append((pending.sequence, span))
        return span

    def _close(self, pending, event):
        service = self.service_of_pid[event.pid]
        if pending.kind == INGRESS:
            return Span(pending.span_id, INGRESS, service, event.pid, pending.start_us, event.timestamp_us,
                        event.protocol, parent_span_id=pending.propagated_parent)
        return Span(pending.span_id, EGRESS, service, event.pid, pending.start_us, event.timestamp_us,
                    event.protocol, peer_service=self.service_of_addr.get(event.remote_addr))

    def finish(self):
        """ Return the :class:`.BuildResult`; pendings still open are
        dropped from the span list and reported.
        """
        spans = [span for _, span in sorted(self._spans, key=lambda item: item[0])]
        unclosed = sorted(self._pending.values(), key=lambda pending: pending.sequence)
        if unclosed:
            log.warning("[SPANS]  %d unclosed pending span(s) dropped", len(unclosed))
        log.debug("[SPANS]  BUILT spans=%d events=%d repeated=%d", len(spans), self._event_count, self._repeated)
        return BuildResult(spans, unclosed, self._event_count, self._repeated)


def build_spans(events, service_of_pid, service_of_addr=None, ids=None):
    """ Build spans from events sorted by timestamp (ties in input
    order).

    :raise OrderingError: if a timestamp is earlier than its predecessor
    :raise MappingError: for an event whose pid has no service
    :return: :class:`.BuildResult`
    """
    builder = SpanBuilder(service_of_pid, service_of_addr, ids)
    for event in events:
        builder.feed(event)
    return builder.finish()


class SpanIdPropagator:
    """ Hands span ids from sender to receiver across a service
    boundary.

    The sender side of a request is its ``send`` event carrying a
    request token and the egress span id; it deposits that id in a
    shared map under the token. The receiver side is the ``recv`` event
    carrying the same token, which picks the id up as its
    ``propagated_span_id``.
    """

    def __init__(self):
        self.shared = {}
        self.dangling = []

    def propagate(self, events):
        events = list(events)
        for event in events:
            if event.token is not None and event.syscall == SEND and event.span_id is not None:
                self.shared[event.token] = event.span_id
        annotated = []
        for index, event in enumerate(events):
            if event.token is not None and event.syscall == RECV:
                try:
                    span_id = self.shared[event.token]
                except KeyError:
                    self.dangling.append((index, event.token))
                else:
                    event = event._replace(propagated_span_id=span_id)
            annotated.append(event)
        if self.dangling:
            log.warning("[PROPAGATE]  %d receiver event(s) carry a token with no sender", len(self.dangling))
        log.debug("[PROPAGATE]  TOKENS shared=%d dangling=%d", len(self.shared), len(self.dangling))
        return annotated


def propagate_span_ids(events):
    """ Annotate each receiver-side ingress-start event with the span id
    of the sender's egress span for the same request. Returns the
    annotated stream in input order.
    """
    return SpanIdPropagator().propagate(events)


@experimental("Deriving call graphs from spans is experimental and may change in a future release")
def derive_call_graphs(spans):
    """ Read call graphs off a dataset whose requests do not overlap
    within a service: the egress spans nested in an ingress span of the
    same process, ordered by start time, name the downstream calls.

    :raise IntegrityError: if two ingress spans of one service nest
                           different call sequences, or an egress span
                           has no peer service
    """
    ingress_by_pid = defaultdict(list)
    egress_by_pid = defaultdict(list)
    services = {}
    for span in spans:
        if span.duplicate_of is not None:
            continue
        if span.is_ingress:
            ingress_by_pid[span.pid].append(span)
            services[span.pid] = span.service
        else:
            egress_by_pid[span.pid].append(span)

    sequences = {}
    for pid, ingress in ingress_by_pid.items():
        egress = sorted(egress_by_pid.get(pid, ()), key=lambda span: (span.start_us, span.span_id))
        starts = [span.start_us for span in egress]
        for span in ingress:
            calls = []
            for other in egress[bisect_left(starts, span.start_us):]:
                if other.start_us > span.end_us:
                    break
                if other.end_us <= span.end_us:
                    if other.peer_service is None:
                        raise IntegrityError("Egress span %s has no peer service" % other.span_id,
                                             span_id=other.span_id)
                    calls.append((other.peer_service, other.protocol))
            calls = tuple(calls)
            previous = sequences.setdefault(span.service, calls)
            if previous != calls:
                raise IntegrityError("Service %s nests inconsistent call sequences %r and %r" % (
                    span.service, [target for target, _ in previous], [target for target, _ in calls]),
                    span_id=span.span_id)

    return {service: CallGraph(service, calls) for service, calls in sorted(sequences.items())}


def group_by_position(egress, call_graph):
    """ Split the egress spans of one service into one list per call
    position, by peer service. Spans calling a service outside the call
    graph, and duplicated spans, are left out.
    """
    positions = [[] for _ in range(call_graph.n)]
    for span in egress:
        if span.duplicate_of is not None:
            continue
        position = call_graph.position_of(span.peer_service)
        if position is not None:
            positions[position - 1].append(span)
    return positions
