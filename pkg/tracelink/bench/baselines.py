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
Reference correlators the greedy pipeline is measured against.

``nearest_neighbor``
    Each ingress span, in start order, takes at every position the
    free egress span that starts soonest after the previous reference
    point.

``exhaustive_oracle``
    Every one-to-one joint assignment of each time-disjoint window of
    ingress spans is enumerated and the best one kept. Tractable only
    for small windows.
"""


from logging import getLogger
from time import perf_counter

import numpy as np

from tracelink.conf import CorrelatorConfig
from tracelink.correlation.assignment import joint_search
from tracelink.correlation.candidates import (
    PositionIndex,
    Thresholds,
    compute_thresholds,
    find_candidates,
)
from tracelink.correlation.scoring import score_candidates
from tracelink.exceptions import OracleGuardError
from tracelink.model import (
    EGRESS,
    INGRESS,
    CandidateAssignment,
    CorrelationResult,
)
from tracelink.spans import group_by_position
from tracelink.stats.estimation import estimate_means


__all__ = [
    "ORACLE_WINDOW_LIMIT",
    "nearest_neighbor_baseline",
    "time_windows",
    "oracle_assign",
    "exhaustive_oracle",
]


log = getLogger("tracelink")


ORACLE_WINDOW_LIMIT = 8


def _service_spans(ingress, egress, call_graph):
    service = call_graph.service
    ingress = sorted((span for span in ingress
                      if span.kind == INGRESS and span.service == service and span.duplicate_of is None),
                     key=lambda span: (span.start_us, span.span_id))
    egress = [span for span in egress if span.kind == EGRESS and span.service == service]
    return ingress, group_by_position(egress, call_graph)


class _FreeList:
    """ Indices of one position's egress spans not yet taken, with
    skip pointers over taken ones.
    """

    def __init__(self, index):
        self.index = index
        self.next = list(range(len(index) + 1))

    def find(self, i):
        root = i
        while self.next[root] != root:
            root = self.next[root]
        while self.next[i] != root:
            self.next[i], i = root, self.next[i]
        return root

    def take(self, i):
        self.next[i] = i + 1

    def nearest(self, reference, end):
        """ First free span starting at or after ``reference`` that ends
        by ``end``, or :const:`None`.
        """
        starts, ends = self.index.starts, self.index.ends
        i = self.find(int(np.searchsorted(starts, reference, side="left")))
        while i < len(starts) and starts[i] <= end:
            if ends[i] <= end:
                return i
            i = self.find(i + 1)
        return None


def nearest_neighbor_baseline(ingress, egress, call_graph):
    """ Correlate by picking, per position, the closest free egress
    span.

    :return: :class:`.CorrelationResult`
    """
    started = perf_counter()
    ingress, positions = _service_spans(ingress, egress, call_graph)
    offset = 0
    indexes = []
    for spans in positions:
        indexes.append(PositionIndex(spans, offset))
        offset += len(spans)
    free = [_FreeList(index) for index in indexes]
    indexed = perf_counter()

    result = CorrelationResult(call_graph.service)
    for span in ingress:
        if call_graph.is_leaf:
            result.assignments[span.span_id] = [CandidateAssignment((), 0.0, 0.0)]
            continue
        picks = []
        reference = span.start_us
        for position in free:
            i = position.nearest(reference, span.end_us)
            if i is None:
                break
            picks.append(i)
            reference = int(position.index.ends[i])
        if len(picks) < len(free):
            (result.uncorrelatable if not picks else result.unassigned).add(span.span_id)
            continue
        for position, i in zip(free, picks):
            position.take(i)
        egress_ids = tuple(position.index.ids[i] for position, i in zip(free, picks))
        result.assignments[span.span_id] = [CandidateAssignment(egress_ids, 0.0, 0.0)]
    finished = perf_counter()
    result.timings = {
        "candidate_find_ms": (indexed - started) * 1000.0,
        "correlate_ms": (finished - indexed) * 1000.0,
    }
    log.debug("[NEAREST]  %s assigned=%d", call_graph.service, len(result.assignments))
    return result


def time_windows(ingress):
    """ Split ingress spans, ordered by start, into maximal groups whose
    time ranges chain together by overlap.
    """
    windows = []
    current = []
    horizon = None
    for span in sorted(ingress, key=lambda span: (span.start_us, span.span_id)):
        if current and span.start_us >= horizon:
            windows.append(current)
            current = []
            horizon = None
        current.append(span)
        horizon = span.end_us if horizon is None else max(horizon, span.end_us)
    if current:
        windows.append(current)
    return windows


def oracle_assign(candidates, windows, service=None):
    """ Choose, within every window, the joint assignment serving the
    most ingress spans with the highest total score.

    :param candidates: dict of ingress span id to scored
                       :class:`.CandidateSet`
    :param windows: lists of ingress spans
    :return: :class:`.CorrelationResult`
    """
    result = CorrelationResult(service)
    for window in windows:
        members = [span.span_id for span in window]
        options = []
        rows = []
        for ingress_id in members:
            candidate_set = candidates[ingress_id]
            ranking = candidate_set.ranking().tolist()
            keys = candidate_set.keys.tolist()
            options.append([(float(candidate_set.pds[row]), tuple(keys[row])) for row in ranking])
            rows.append(ranking)
        _, _, chosen = joint_search(options)
        for ingress_id, member_rows, index in zip(members, rows, chosen):
            candidate_set = candidates[ingress_id]
            if index is None:
                (result.unassigned if len(candidate_set) else result.uncorrelatable).add(ingress_id)
                continue
            row = member_rows[index]
            result.chosen_rows[ingress_id] = row
            result.assignments[ingress_id] = [CandidateAssignment(
                candidate_set.egress_ids(row), candidate_set.pds[row], candidate_set.cds[row])]
    return result


def exhaustive_oracle(ingress, egress, call_graph, models, config=None, window_limit=ORACLE_WINDOW_LIMIT):
    """ Correlate by exhaustive search over unthresholded candidates.

    :param models: fitted :class:`.DelayModel` per delay position
    :raise OracleGuardError: if a window holds more than
                             ``window_limit`` ingress spans
    :return: :class:`.CorrelationResult`
    """
    config = config or CorrelatorConfig()
    ingress, positions = _service_spans(ingress, egress, call_graph)
    windows = time_windows(ingress)
    largest = max(map(len, windows), default=0)
    if largest > window_limit:
        raise OracleGuardError("%s has a window of %d ingress spans, the oracle allows %d" % (
            call_graph.service, largest, window_limit))
    if call_graph.is_leaf or not ingress:
        result = CorrelationResult(call_graph.service)
        for span in ingress:
            result.assignments[span.span_id] = [CandidateAssignment((), 0.0, 0.0)]
        return result

    started = perf_counter()
    estimates = estimate_means(ingress, positions, call_graph)
    means = compute_thresholds(estimates, config).means
    unbounded = Thresholds(np.full(len(means), np.inf), np.inf, means)
    candidates = find_candidates(ingress, positions, estimates, config, unbounded)
    found = perf_counter()
    score_candidates(candidates, models)
    result = oracle_assign(candidates, windows, call_graph.service)
    finished = perf_counter()
    result.models = models
    result.estimates = estimates
    result.candidates = candidates
    result.timings = {
        "candidate_find_ms": (found - started) * 1000.0,
        "correlate_ms": (finished - found) * 1000.0,
    }
    result.candidates_per_ingress_mean = sum(map(len, candidates.values())) / len(candidates)
    log.debug("[ORACLE]  %s windows=%d largest=%d", call_graph.service, len(windows), largest)
    return result
