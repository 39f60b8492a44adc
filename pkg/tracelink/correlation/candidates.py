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
Candidate finding.

A candidate of an ingress span is one egress span per call position,
in call order, such that every delay is non-negative and below its
position's threshold, every egress span ends within the ingress span,
and the delays add up to no more than the total budget. Candidates are
enumerated position by position with sorted start times, so only the
egress spans starting within a threshold of the previous reference
time are ever looked at.
"""


from collections import namedtuple
from collections.abc import Sequence
from logging import getLogger

import numpy as np

from tracelink.conf import CorrelatorConfig


__all__ = [
    "Candidate",
    "PositionIndex",
    "CandidateSet",
    "Thresholds",
    "compute_thresholds",
    "find_candidates",
]


log = getLogger("tracelink")

#: Partial tuples kept per ingress span between positions
PARTIAL_LIMIT = 100000


class Candidate(namedtuple("Candidate", ["ingress_id", "egress_tuple", "delays", "cds", "pds"])):
    """ One candidate correlation of an ingress span: egress span ids in
    call order, the delays between them, and its deviation (CDS) and
    density (PDS) scores.
    """


class PositionIndex:
    """ Egress spans of one call position, sorted by start time.
    """

    def __init__(self, spans, offset=0):
        self.spans = sorted(spans, key=lambda span: (span.start_us, span.span_id))
        self.ids = [span.span_id for span in self.spans]
        self.starts = np.fromiter((span.start_us for span in self.spans), dtype=np.int64, count=len(self.spans))
        self.ends = np.fromiter((span.end_us for span in self.spans), dtype=np.int64, count=len(self.spans))
        self.offset = offset

    def __len__(self):
        return len(self.spans)


class CandidateSet(Sequence):
    """ The candidates of one ingress span, held as arrays.

    ``rows`` holds one row of position indices per candidate,
    ``delays`` the ``n + 1`` delays of each, ``cds`` and ``pds`` their
    scores (``pds`` is NaN until scored). Candidates are ordered by
    ascending total delay. Indexing yields :class:`.Candidate` views.
    """

    def __init__(self, ingress, rows, delays, cds, positions):
        self.ingress = ingress
        self.rows = rows
        self.delays = delays
        self.cds = cds
        self.pds = np.full(len(rows), np.nan)
        self.positions = positions

    def __repr__(self):
        return "<CandidateSet ingress=%r size=%d>" % (self.ingress.span_id, len(self))

    def __len__(self):
        return len(self.rows)

    def __getitem__(self, index):
        if isinstance(index, slice):
            return [self[i] for i in range(*index.indices(len(self)))]
        if index < 0:
            index += len(self)
        if not 0 <= index < len(self):
            raise IndexError(index)
        return Candidate(self.ingress.span_id, self.egress_ids(index), tuple(int(d) for d in self.delays[index]),
                         float(self.cds[index]), float(self.pds[index]))

    @property
    def ingress_id(self):
        return self.ingress.span_id

    @property
    def keys(self):
        """ Dataset-wide integer keys of the egress spans of every
        candidate, one row per candidate.
        """
        offsets = np.array([position.offset for position in self.positions], dtype=np.int64)
        return self.rows + offsets[None, :]

    @property
    def total_delay(self):
        return self.delays.sum(axis=1)

    def egress_ids(self, index):
        return tuple(position.ids[i] for position, i in zip(self.positions, self.rows[index]))

    def index_of(self, egress_tuple):
        """ Index of the candidate holding ``egress_tuple``, or
        :const:`None`.
        """
        for index in range(len(self)):
            if self.egress_ids(index) == tuple(egress_tuple):
                return index
        return None

    def ranking(self):
        """ Candidate indices best first: highest PDS, then smallest
        total delay, then enumeration order.
        """
        return np.lexsort((np.arange(len(self)), self.total_delay, -self.pds))


class Thresholds(namedtuple("Thresholds", ["limits", "budget", "means"])):
    """ Per-position delay limits, the total delay budget and the mean
    delays the deviation score is measured against.
    """


def compute_thresholds(estimates, config):
    """ Derive the delay limits of every position: ``delta`` times the
    estimated mean, the configured floor where the estimate is not
    positive, or one fixed limit for all positions in fixed mode.
    """
    means = []
    for estimate in estimates:
        if estimate.mu > 0:
            means.append(estimate.mu)
        else:
            log.warning("[CANDIDATES]  mean delay at position %d is %r, using the floor of %rus",
                        estimate.position, estimate.mu, config.mean_floor_us)
            means.append(float(config.mean_floor_us))
    means = np.array(means, dtype=float)
    if config.fixed_threshold_us is not None:
        limits = np.full(len(means), float(config.fixed_threshold_us))
        budget = np.inf
    else:
        limits = float(config.delta) * means
        total_mu = estimates[0].total_mu if estimates else 0.0
        budget = float(config.delta) * total_mu if total_mu > 0 else np.inf
    return Thresholds(limits, budget, means)


def _expand(positions, ingress, thresholds):
    start, end = ingress.start_us, ingress.end_us
    limits, budget = thresholds.limits, thresholds.budget
    last = len(positions)
    rows = np.zeros((1, 0), dtype=np.int64)
    delays = np.zeros((1, 0), dtype=np.int64)
    refs = np.array([start], dtype=np.int64)
    totals = np.zeros(1, dtype=np.int64)
    for k, position in enumerate(positions):
        lo = np.searchsorted(position.starts, refs, side="left")
        hi = np.searchsorted(position.starts, refs + limits[k], side="left")
        counts = hi - lo
        size = int(counts.sum())
        if size == 0:
            return np.zeros((0, last), dtype=np.int64), np.zeros((0, last + 1), dtype=np.int64)
        parent = np.repeat(np.arange(len(refs)), counts)
        child = np.arange(size) - np.repeat(np.cumsum(counts) - counts, counts) + np.repeat(lo, counts)
        d = position.starts[child] - refs[parent]
        child_ends = position.ends[child]
        child_totals = totals[parent] + d
        keep = (child_ends <= end) & (child_totals <= budget)
        if k + 1 == last:
            keep &= (end - child_ends < limits[last]) & (child_totals + end - child_ends <= budget)
        parent, child, d = parent[keep], child[keep], d[keep]
        rows = np.hstack([rows[parent], child[:, None]])
        delays = np.hstack([delays[parent], d[:, None]])
        refs = child_ends[keep]
        totals = child_totals[keep]
        if len(refs) > PARTIAL_LIMIT:
            kept = np.sort(np.argpartition(totals, PARTIAL_LIMIT)[:PARTIAL_LIMIT])
            rows, delays, refs, totals = rows[kept], delays[kept], refs[kept], totals[kept]
    final = end - refs
    keep = (final < limits[last]) & (totals + final <= budget)
    return rows[keep], np.hstack([delays[keep], final[keep][:, None]])


def find_candidates(ingress, egress_by_position, estimates, config=None, thresholds=None):
    """ Find the candidates of every ingress span.

    :param ingress: ingress spans of one service
    :param egress_by_position: one list of egress spans (or a prepared
                               :class:`.PositionIndex`) per position
    :param estimates: :class:`.DelayEstimate` per delay position
    :param config: :class:`.CorrelatorConfig`
    :param thresholds: :class:`.Thresholds` overriding those derived
                       from ``estimates``
    :return: dict of ingress span id to :class:`.CandidateSet`, empty
             for ingress spans without any candidate
    """
    config = config or CorrelatorConfig()
    if thresholds is None:
        thresholds = compute_thresholds(estimates, config)
    positions = []
    offset = 0
    for egress in egress_by_position:
        index = egress if isinstance(egress, PositionIndex) else PositionIndex(egress, offset)
        positions.append(index)
        offset += len(index)
    cap = int(config.max_candidates_per_ingress)
    means = thresholds.means
    candidates = {}
    total = 0
    for span in ingress:
        rows, delays = _expand(positions, span, thresholds)
        order = np.lexsort((np.arange(len(rows)), delays.sum(axis=1)))[:cap]
        rows, delays = rows[order], delays[order]
        cds = np.sum(np.abs(delays - means[None, :]) / means[None, :], axis=1)
        candidates[span.span_id] = CandidateSet(span, rows, delays, cds, positions)
        total += len(rows)
    log.debug("[CANDIDATES]  ingress=%d candidates=%d mean=%.2f", len(candidates), total,
              total / len(candidates) if candidates else 0.0)
    return candidates
