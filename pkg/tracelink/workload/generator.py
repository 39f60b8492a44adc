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
Synthetic multi-service workloads with ground truth.

A request enters the root service and walks the call graphs depth
first: each service waits its first delay, issues its downstream calls
one after the other with a delay between consecutive calls, and
answers after its last delay. Requests are laid out back to back, so
no two requests overlap in time; :func:`.retime` packs them to a
target concurrency afterwards.
"""


from collections import namedtuple
from logging import getLogger

from numpy.random import default_rng

from tracelink.exceptions import SpecError
from tracelink.model import (
    EGRESS,
    GRPC,
    HTTP,
    INGRESS,
    CallGraph,
    GroundTruth,
    IdGenerator,
    Span,
)
from tracelink.workload.distributions import DistributionSpec


__all__ = [
    "Wiring",
    "WorkloadSpec",
    "Dataset",
    "generate",
]


log = getLogger("tracelink")

#: 2020-09-13 12:26:40 UTC
DEFAULT_START_US = 1600000000000000

PORTS_PER_HOST = 50000


class Wiring(namedtuple("Wiring", ["remote_addr", "local_addr", "stream_id", "token"])):
    """ Socket endpoints and stream of the events that open and close
    one span, as seen by the process owning the span.
    """


def _endpoint(first, second, third, fourth, port):
    return "%d.%d.%d.%d:%d" % (first, second % 256, third % 256, fourth, port)


class WorkloadSpec:
    """ What to simulate.

    :param call_graphs: :class:`.CallGraph` objects (list or mapping by
                        service); every call target needs a graph
    :param delay_specs: per service, one :class:`.DistributionSpec` per
                        delay position (``n + 1`` of them)
    :param egress_duration_specs: per service, per leaf target, the
                                  duration distribution of the egress
                                  span calling it
    :param request_count: number of end-to-end requests
    :param seed: seed of every random draw
    :param network_latency_us: one-way latency between services
    :param gap_us: idle time between consecutive requests
    """

    def __init__(self, call_graphs, delay_specs, egress_duration_specs=None, request_count=1, seed=0,
                 network_latency_us=50, gap_us=1000, start_us=DEFAULT_START_US, root=None):
        if isinstance(call_graphs, dict):
            call_graphs = list(call_graphs.values())
        self.call_graphs = {graph.service: graph for graph in call_graphs}
        if len(self.call_graphs) != len(call_graphs):
            raise SpecError("Duplicate call graph in workload")
        self.delay_specs = {service: [DistributionSpec.from_dict(item) for item in specs]
                            for service, specs in (delay_specs or {}).items()}
        self.egress_duration_specs = {
            service: {target: DistributionSpec.from_dict(item) for target, item in targets.items()}
            for service, targets in (egress_duration_specs or {}).items()}
        self.request_count = int(request_count)
        self.seed = seed
        self.network_latency_us = int(network_latency_us)
        self.gap_us = int(gap_us)
        self.start_us = int(start_us)
        self.root = root or self._find_root()
        self._validate()

    def __repr__(self):
        return "<WorkloadSpec root=%r services=%d requests=%d seed=%r>" % (
            self.root, len(self.call_graphs), self.request_count, self.seed)

    @property
    def services(self):
        """ Service names in call-graph declaration order.
        """
        return list(self.call_graphs)

    def _find_root(self):
        called = {target for graph in self.call_graphs.values() for target in graph.targets}
        roots = [service for service in self.call_graphs if service not in called]
        if len(roots) != 1:
            raise SpecError("Workload needs exactly one root service, found %r" % roots)
        return roots[0]

    def _validate(self):
        if self.request_count < 0:
            raise SpecError("request_count must not be negative")
        if self.network_latency_us < 0 or self.gap_us < 0:
            raise SpecError("network_latency_us and gap_us must not be negative")
        if self.root not in self.call_graphs:
            raise SpecError("Root service %r has no call graph" % self.root)
        for service, graph in self.call_graphs.items():
            for target in graph.targets:
                if target not in self.call_graphs:
                    raise SpecError("Service %s calls %s, which has no call graph" % (service, target))
            specs = self.delay_specs.get(service)
            if specs is None or len(specs) != graph.delay_positions:
                raise SpecError("Service %s needs %d delay specs, got %d" % (
                    service, graph.delay_positions, len(specs or ())))
        for service, targets in self.egress_duration_specs.items():
            graph = self.call_graphs.get(service)
            if graph is None:
                raise SpecError("Egress durations given for unknown service %r" % service)
            for target in targets:
                if graph.position_of(target) is None:
                    raise SpecError("Service %s never calls %s" % (service, target))
                if not self.call_graphs[target].is_leaf:
                    raise SpecError("Egress duration of %s -> %s given, but %s is not a leaf" % (
                        service, target, target))
        self._check_acyclic(self.root, ())

    def _check_acyclic(self, service, path):
        if service in path:
            raise SpecError("Call graphs form a cycle: %s" % " -> ".join(path + (service,)))
        for target in self.call_graphs[service].targets:
            self._check_acyclic(target, path + (service,))

    def replace(self, **changes):
        """ Return a copy with some settings changed.
        """
        settings = dict(call_graphs=list(self.call_graphs.values()), delay_specs=self.delay_specs,
                        egress_duration_specs=self.egress_duration_specs, request_count=self.request_count,
                        seed=self.seed, network_latency_us=self.network_latency_us, gap_us=self.gap_us,
                        start_us=self.start_us, root=self.root)
        settings.update(changes)
        return type(self)(**settings)

    def to_dict(self):
        services = []
        for service, graph in self.call_graphs.items():
            document = graph.to_dict()
            document["delays"] = [spec.to_dict() for spec in self.delay_specs[service]]
            durations = self.egress_duration_specs.get(service)
            if durations:
                document["egress_durations"] = {target: spec.to_dict() for target, spec in durations.items()}
            services.append(document)
        return {
            "root": self.root,
            "request_count": self.request_count,
            "seed": self.seed,
            "network_latency_us": self.network_latency_us,
            "gap_us": self.gap_us,
            "start_us": self.start_us,
            "services": services,
        }

    @classmethod
    def from_dict(cls, data):
        try:
            documents = data["services"]
            graphs = [CallGraph.from_dict(document) for document in documents]
            delay_specs = {document["service"]: document["delays"] for document in documents}
            durations = {document["service"]: document["egress_durations"]
                         for document in documents if document.get("egress_durations")}
        except (KeyError, TypeError) as error:
            raise SpecError("Malformed workload document: %s" % error) from error
        return cls(graphs, delay_specs, durations, request_count=data.get("request_count", 1),
                   seed=data.get("seed", 0), network_latency_us=data.get("network_latency_us", 50),
                   gap_us=data.get("gap_us", 1000), start_us=data.get("start_us", DEFAULT_START_US),
                   root=data.get("root"))


class Dataset:
    """ Spans of a simulated workload with their ground truth.

    ``wiring`` maps each span id to the socket endpoints of its events,
    ``service_of_pid`` and ``service_of_addr`` name the service behind
    each process and listening endpoint. The event stream is derived on
    first access.
    """

    def __init__(self, spans, ground_truth, call_graphs, wiring, service_of_pid, service_of_addr,
                 concurrency_level=1, root=None):
        self.spans = sorted(spans, key=lambda span: (span.start_us, span.span_id))
        self.ground_truth = ground_truth
        self.call_graphs = dict(call_graphs)
        self.wiring = wiring
        self.service_of_pid = dict(service_of_pid)
        self.service_of_addr = dict(service_of_addr)
        self.concurrency_level = concurrency_level
        self.root = root
        self._events = None
        self._spans_by_id = None

    def __repr__(self):
        return "<Dataset spans=%d requests=%d concurrency=%r>" % (
            len(self.spans), len(self.requests), self.concurrency_level)

    @property
    def requests(self):
        """ Span ids of each end-to-end request, root ingress first.
        """
        return self.ground_truth.requests

    @property
    def events(self):
        if self._events is None:
            from tracelink.workload.events import emit_events
            self._events = emit_events(self)
        return self._events

    @property
    def spans_by_id(self):
        if self._spans_by_id is None:
            self._spans_by_id = {span.span_id: span for span in self.spans}
        return self._spans_by_id

    def ingress(self, service):
        return [span for span in self.spans if span.service == service and span.kind == INGRESS]

    def egress(self, service):
        return [span for span in self.spans if span.service == service and span.kind == EGRESS]

    def inter_links(self):
        """ Cross-service parent links carried by the spans themselves,
        child ingress id to parent egress id.
        """
        return {span.span_id: span.parent_span_id for span in self.spans if span.parent_span_id is not None}

    def with_spans(self, spans, concurrency_level):
        """ Return a dataset sharing this one's ground truth and wiring
        but holding other spans.
        """
        return Dataset(spans, self.ground_truth, self.call_graphs, self.wiring, self.service_of_pid,
                       self.service_of_addr, concurrency_level, self.root)


class _RequestWalker:
    """ Lays out requests one at a time, allocating ids, endpoints,
    streams and tokens as it goes.
    """

    def __init__(self, spec):
        self.spec = spec
        self.ids = IdGenerator(spec.seed)
        self.pids = {service: pid for pid, service in enumerate(spec.call_graphs, start=1)}
        self.hosts = {service: index for index, service in enumerate(spec.call_graphs)}
        self.listen = {service: _endpoint(10, 0, index // 254, index % 254 + 1, 8080)
                       for service, index in self.hosts.items()}
        self.spans = []
        self.wiring = {}
        self.tuples = {}
        self.parents = {}
        self.requests = []
        self._ports = {}
        self._streams = {}
        self._clients = 0
        self._tokens = 0

    def _ephemeral(self, service):
        count = self._ports.get(service, 0)
        self._ports[service] = count + 1
        index = self.hosts[service]
        return _endpoint(10, 1 + count // PORTS_PER_HOST, index // 254, index % 254 + 1,
                         10000 + count % PORTS_PER_HOST)

    def _stream(self, service, target):
        key = (service, target)
        count = self._streams.get(key, 0)
        self._streams[key] = count + 1
        index = self.hosts[service]
        local = _endpoint(10, 0, index // 254, index % 254 + 1, 40000 + self.hosts[target])
        return local, 2 * count + 1

    def request(self, start_us, rng):
        members = []
        self._clients += 1
        client = _endpoint(172, 16 + self._clients // PORTS_PER_HOST // 256, self._clients // PORTS_PER_HOST, 1,
                           10000 + self._clients % PORTS_PER_HOST)
        end_us = self._serve(self.spec.root, start_us, rng, members, Wiring(client, self.listen[self.spec.root],
                                                                          None, None), HTTP, None)
        self.requests.append(tuple(members))
        return end_us

    def _serve(self, service, start_us, rng, members, wiring, protocol, parent_id, duration_us=None):
        spec = self.spec
        graph = spec.call_graphs[service]
        pid = self.pids[service]
        latency = spec.network_latency_us
        ingress_id = self.ids.next()
        members.append(ingress_id)
        self.wiring[ingress_id] = wiring

        if duration_us is not None:
            end_us = start_us + duration_us
            egress_ids = ()
        else:
            delays = [delay.sample(rng) for delay in spec.delay_specs[service]]
            durations = spec.egress_duration_specs.get(service, {})
            egress_ids = []
            t = start_us + delays[0]
            for call in graph.egress_calls:
                target = call.target
                egress_id = self.ids.next()
                members.append(egress_id)
                egress_ids.append(egress_id)
                self._tokens += 1
                token = "%x" % self._tokens
                if call.protocol == GRPC:
                    local, stream_id = self._stream(service, target)
                else:
                    local, stream_id = self._ephemeral(service), None
                remote = self.listen[target]
                self.wiring[egress_id] = Wiring(remote, local, stream_id, token)
                callee_wiring = Wiring(local, remote, stream_id, token)
                callee_start = t + latency
                if target in durations:
                    egress_duration = durations[target].sample(rng, minimum=2 * latency + 1)
                    self._serve(target, callee_start, rng, members, callee_wiring, call.protocol, egress_id,
                                duration_us=egress_duration - 2 * latency)
                else:
                    callee_end = self._serve(target, callee_start, rng, members, callee_wiring, call.protocol,
                                             egress_id)
                    egress_duration = callee_end - callee_start + 2 * latency
                self.spans.append(Span(egress_id, EGRESS, service, pid, t, t + egress_duration, call.protocol,
                                       peer_service=target))
                t += egress_duration + delays[call.position]
            end_us = t
            egress_ids = tuple(egress_ids)

        self.spans.append(Span(ingress_id, INGRESS, service, pid, start_us, end_us, protocol,
                               parent_span_id=parent_id))
        self.tuples[ingress_id] = egress_ids
        if parent_id is not None:
            self.parents[ingress_id] = parent_id
        return end_us


def generate(spec):
    """ Simulate ``spec.request_count`` independent requests laid out
    back to back. Each request draws from its own generator seeded with
    ``(seed, request index)``, so the result depends only on the spec.

    :return: :class:`.Dataset` at concurrency level 1
    """
    walker = _RequestWalker(spec)
    cursor = spec.start_us
    for index in range(spec.request_count):
        rng = default_rng([spec.seed, index])
        cursor = walker.request(cursor, rng) + spec.gap_us
    truth = GroundTruth(walker.tuples, walker.parents, walker.requests)
    service_of_pid = {pid: service for service, pid in walker.pids.items()}
    service_of_addr = {address: service for service, address in walker.listen.items()}
    log.debug("[WORKLOAD]  GENERATED requests=%d spans=%d seed=%r", spec.request_count, len(walker.spans), spec.seed)
    return Dataset(walker.spans, truth, spec.call_graphs, walker.wiring, service_of_pid, service_of_addr,
                   concurrency_level=1, root=spec.root)
