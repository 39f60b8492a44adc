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
Trace graph types and trace reconstruction.

Correlated ingress and egress spans within a service and the parent
links carried across services are joined into one forest; each
connected component of that forest is one trace.
"""


from collections import (
    defaultdict,
    namedtuple,
)
from collections.abc import Mapping
from hashlib import blake2b
from logging import getLogger

from tracelink.exceptions import (
    CoverageError,
    IntegrityError,
)
from tracelink.model import INGRESS
from tracelink.timestamps import format_us


__all__ = [
    "INTRA_SERVICE",
    "INTER_SERVICE",
    "AccuracyReport",
    "Edge",
    "TraceGraph",
    "UnionFind",
    "duplicate_id",
    "trace_id_of",
    "reconstruct",
    "render_tree",
    "trace_accuracy",
]


log = getLogger("tracelink")


INTRA_SERVICE = "intra_service"
INTER_SERVICE = "inter_service"


class UnionFind:
    """ Disjoint sets over hashable keys, with path compression.
    """

    def __init__(self):
        self.forest = {}

    def add(self, k):
        if k not in self.forest:
            self.forest[k] = k
        return k

    def union(self, a, b):
        root_a = self.find(a)
        root_b = self.find(b)
        # Keep the smaller key as root so that labelling is order-free.
        if root_b < root_a:
            root_a, root_b = root_b, root_a
        self.forest[root_b] = root_a
        return root_a

    def find(self, k):
        if k not in self.forest:
            self.forest[k] = k

        root = k
        while root != self.forest[root]:
            root = self.forest[root]

        node = k
        while node != self.forest[node]:
            self.forest[node], node = root, self.forest[node]

        return root

    def groups(self):
        """ Return every set as a sorted list, keyed by its root.
        """
        members = defaultdict(list)
        for k in self.forest:
            members[self.find(k)].append(k)
        return {root: sorted(keys) for root, keys in members.items()}


class Edge(namedtuple("Edge", ["parent", "child", "kind"])):
    """ A parent-to-child link between two spans.
    """


def _digest(text):
    return blake2b(text.encode("utf-8"), digest_size=8).hexdigest()


def duplicate_id(egress_id, ingress_id):
    """ Span id of the copy of ``egress_id`` materialised for
    ``ingress_id``.
    """
    return _digest("%s/%s" % (egress_id, ingress_id))


def trace_id_of(span_ids):
    """ Trace id of a component, derived from its smallest span id.
    """
    return _digest(min(span_ids))


class TraceGraph:
    """ Spans joined into a forest by intra-service and inter-service
    edges, each span labelled with the trace it belongs to.
    """

    def __init__(self):
        self.nodes = {}
        self.edges = []
        self.duplicates = {}
        self.assignments = {}
        self._parents = {}
        self._children = defaultdict(list)
        self._traces = {}

    def __repr__(self):
        return "<TraceGraph nodes=%d edges=%d traces=%d>" % (len(self.nodes), len(self.edges),
                                                              len(set(self._traces.values())))

    def __len__(self):
        return len(self.nodes)

    def __contains__(self, span_id):
        return span_id in self.nodes

    def add_span(self, span):
        if span.span_id in self.nodes:
            raise IntegrityError("Duplicate span id %s" % span.span_id, span_id=span.span_id)
        self.nodes[span.span_id] = span

    def add_edge(self, parent, child, kind):
        """ Link ``child`` under ``parent``; linking the same pair again
        is a no-op, a second distinct parent is an error.
        """
        for span_id in (parent, child):
            if span_id not in self.nodes:
                raise IntegrityError("Edge %s -> %s references unknown span %s" % (parent, child, span_id),
                                     span_id=span_id)
        existing = self._parents.get(child)
        if existing is not None:
            if existing.parent == parent:
                return existing
            edge = Edge(parent, child, kind)
            raise IntegrityError("Span %s has two parents: %s -> %s (%s) and %s -> %s (%s)" % (
                child, existing.parent, child, existing.kind, parent, child, kind),
                span_id=child, edges=(existing, edge))
        edge = Edge(parent, child, kind)
        self.edges.append(edge)
        self._parents[child] = edge
        self._children[parent].append(child)
        return edge

    def parent_of(self, span_id):
        edge = self._parents.get(span_id)
        return None if edge is None else edge.parent

    def children_of(self, span_id):
        nodes = self.nodes
        return sorted(self._children.get(span_id, ()), key=lambda child: (nodes[child].start_us, child))

    def trace_of(self, span_id):
        return self._traces.get(span_id)

    def label(self):
        """ Label every connected component with its trace id.
        """
        forest = UnionFind()
        for span_id in self.nodes:
            forest.add(span_id)
        for edge in self.edges:
            forest.union(edge.parent, edge.child)
        self._traces = {}
        for members in forest.groups().values():
            trace_id = trace_id_of(members)
            for span_id in members:
                self._traces[span_id] = trace_id
                self.nodes[span_id] = self.nodes[span_id].replace(trace_id=trace_id)

    def components(self):
        """ Return a dict of trace id to the sorted span ids of that
        trace.
        """
        members = defaultdict(list)
        for span_id, trace_id in self._traces.items():
            members[trace_id].append(span_id)
        return {trace_id: sorted(span_ids) for trace_id, span_ids in members.items()}

    def roots(self, trace_id):
        return sorted((span_id for span_id, label in self._traces.items()
                       if label == trace_id and span_id not in self._parents),
                      key=lambda span_id: (self.nodes[span_id].start_us, span_id))

    def spans(self):
        """ Labelled spans ordered by start time and id.
        """
        return sorted(self.nodes.values(), key=lambda span: (span.start_us, span.span_id))


def _results_of(intra):
    if intra is None:
        return []
    if isinstance(intra, Mapping):
        return list(intra.values())
    return list(intra)


def reconstruct(spans, intra, inter_links=None):
    """ Assemble traces.

    :param spans: every span of the dataset; copies materialised by an
                  earlier reconstruction are reused
    :param intra: :class:`.CorrelationResult` objects, as a list or a
                  dict keyed by service
    :param inter_links: child ingress id to parent egress id; by
                        default read from the ``parent_span_id`` of the
                        ingress spans
    :return: :class:`.TraceGraph`
    """
    graph = TraceGraph()
    for span in spans:
        graph.add_span(span)
        if span.duplicate_of is not None:
            graph.duplicates[span.span_id] = span.duplicate_of

    for result in _results_of(intra):
        for ingress_id in sorted(result.assignments):
            emitted = result.assignments[ingress_id]
            graph.assignments[ingress_id] = [assignment.egress_ids for assignment in emitted]
            for assignment in emitted:
                for egress_id, duplicated in zip(assignment.egress_ids, assignment.duplicated):
                    child = egress_id
                    if duplicated:
                        child = duplicate_id(egress_id, ingress_id)
                        if child not in graph.nodes:
                            if egress_id not in graph.nodes:
                                raise IntegrityError("Duplicated span %s is unknown" % egress_id,
                                                     span_id=egress_id)
                            graph.add_span(graph.nodes[egress_id].replace(
                                span_id=child, duplicate_of=egress_id, parent_span_id=None, trace_id=None))
                            graph.duplicates[child] = egress_id
                    graph.add_edge(ingress_id, child, INTRA_SERVICE)

    if inter_links is None:
        inter_links = {span.span_id: span.parent_span_id for span in spans
                       if span.kind == INGRESS and span.parent_span_id is not None}
    for child, parent in sorted(inter_links.items()):
        graph.add_edge(parent, child, INTER_SERVICE)

    graph.label()
    log.debug("[TRACES]  nodes=%d edges=%d duplicates=%d traces=%d", len(graph.nodes), len(graph.edges),
              len(graph.duplicates), len(graph.components()))
    return graph


class AccuracyReport(namedtuple("AccuracyReport", ["span_level", "trace_level", "overhead_rate"])):
    """ Span-level and trace-level accuracy of a reconstruction, and the
    share of extra spans it materialised.
    """


def trace_accuracy(graph, truth):
    """ Score a reconstruction against ground truth.

    An ingress span counts as correct when any of its emitted tuples
    equals the true one; spans of leaf services (empty true tuple) are
    not scored. A request counts as correct when the trace of its first
    span holds exactly the request's spans, not counting materialised
    copies.

    :param graph: :class:`.TraceGraph`
    :param truth: :class:`.GroundTruth`
    :return: :class:`.AccuracyReport`
    """
    ingress = [span_id for span_id, span in graph.nodes.items()
               if span.kind == INGRESS and span.duplicate_of is None]
    missing = [span_id for span_id in ingress if span_id not in truth]
    if missing:
        raise CoverageError("Ground truth is missing %d ingress spans" % len(missing), missing=missing)

    scored = correct = 0
    for span_id in ingress:
        expected = truth[span_id]
        if not expected:
            continue
        scored += 1
        if any(tuple(emitted) == expected for emitted in graph.assignments.get(span_id, ())):
            correct += 1
    span_level = correct / scored if scored else 1.0

    components = graph.components()
    whole = 0
    for members in truth.requests:
        trace_id = graph.trace_of(members[0])
        if trace_id is None:
            raise CoverageError("Request span %s is not in the graph" % members[0], missing=[members[0]])
        found = {span_id for span_id in components[trace_id] if span_id not in graph.duplicates}
        if found == set(members):
            whole += 1
    trace_level = whole / len(truth.requests) if truth.requests else 1.0

    base = len(graph.nodes) - len(graph.duplicates)
    overhead_rate = len(graph.duplicates) / base if base else 0.0
    return AccuracyReport(span_level, trace_level, overhead_rate)


def render_tree(graph, trace_id, tz="UTC"):
    """ Return an indented text dump of one trace, one span per line.
    """
    lines = []

    def visit(span_id, depth):
        span = graph.nodes[span_id]
        line = "%s%s %s %s %s +%dus" % ("  " * depth, span.kind, span.service, span.span_id,
                                         format_us(span.start_us, tz), span.duration_us)
        if span.duplicate_of is not None:
            line += " (copy of %s)" % span.duplicate_of
        lines.append(line)
        for child in graph.children_of(span_id):
            visit(child, depth + 1)

    roots = graph.roots(trace_id)
    if not roots:
        raise KeyError(trace_id)
    lines.append("trace %s" % trace_id)
    for root in roots:
        visit(root, 1)
    return "\n".join(lines) + "\n"
