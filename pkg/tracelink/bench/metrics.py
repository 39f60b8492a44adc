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
Per-service accuracy, ambiguity, runtime and overhead measures of one
correlation run, gathered into :class:`.MetricsRow` records.
"""


from collections import namedtuple

import numpy as np

from tracelink.exceptions import (
    CoverageError,
    DataError,
)


__all__ = [
    "MetricsRow",
    "AMBIGUITY_LEVELS",
    "service_ingress",
    "span_accuracy",
    "wrong_with_lower_true_pds",
    "true_delays",
    "ambiguity_ratios",
    "span_overhead_rate",
]


AMBIGUITY_LEVELS = (0.10, 0.15)

FRACTIONS = (
    "span_accuracy",
    "trace_accuracy",
    "wrong_with_lower_true_pds_fraction",
    "ambiguity_ratio_10pct",
    "ambiguity_ratio_15pct",
)

TIMES = (
    "candidate_find_ms",
    "correlate_ms",
)


class MetricsRow(namedtuple("MetricsRow", [
    "algorithm", "service", "concurrency", "seed",
    "span_accuracy", "trace_accuracy",
    "wrong_with_lower_true_pds_fraction", "ambiguity_ratio_10pct", "ambiguity_ratio_15pct",
    "candidate_find_ms", "correlate_ms",
    "candidates_per_ingress_mean", "span_overhead_rate",
])):
    """ One line of an experiment report. Measures that do not apply to
    an algorithm are :const:`None`.
    """

    def __new__(cls, algorithm, service, concurrency, seed, span_accuracy, trace_accuracy,
                wrong_with_lower_true_pds_fraction, ambiguity_ratio_10pct, ambiguity_ratio_15pct,
                candidate_find_ms, correlate_ms, candidates_per_ingress_mean, span_overhead_rate):
        row = super().__new__(cls, algorithm, service, concurrency, seed, span_accuracy, trace_accuracy,
                              wrong_with_lower_true_pds_fraction, ambiguity_ratio_10pct, ambiguity_ratio_15pct,
                              candidate_find_ms, correlate_ms, candidates_per_ingress_mean, span_overhead_rate)
        for name in FRACTIONS:
            value = getattr(row, name)
            if value is not None and not 0.0 <= value <= 1.0:
                raise DataError("%s must lie in [0, 1], got %r" % (name, value))
        for name in TIMES + ("candidates_per_ingress_mean", "span_overhead_rate"):
            value = getattr(row, name)
            if value is not None and value < 0:
                raise DataError("%s must not be negative, got %r" % (name, value))
        return row

    def key(self):
        return self.algorithm, self.service, self.concurrency, self.seed

    def to_dict(self):
        return dict(self._asdict())


def service_ingress(result):
    """ Every ingress span id a result accounts for.
    """
    return set(result.assignments) | result.unassigned | result.uncorrelatable


def span_accuracy(result, truth):
    """ Fraction of the ingress spans of ``result`` with an emitted
    tuple equal to the true one. Ingress spans left without an
    assignment count as wrong.

    :raise CoverageError: if the truth lacks one of the ingress spans
    """
    ingress = service_ingress(result)
    missing = sorted(ingress_id for ingress_id in ingress if ingress_id not in truth)
    if missing:
        raise CoverageError("Ground truth is missing %d ingress spans of %s" % (len(missing), result.service),
                            missing=missing)
    if not ingress:
        return 1.0
    correct = sum(1 for ingress_id, emitted in result.assignments.items()
                  if any(assignment.egress_ids == truth[ingress_id] for assignment in emitted))
    return correct / len(ingress)


def wrong_with_lower_true_pds(result, truth):
    """ Among wrongly assigned ingress spans whose true tuple was a
    candidate, the fraction where the true tuple scored below the one
    chosen. :const:`None` when the result carries no candidates.
    """
    if not result.candidates:
        return None
    wrong = lower = 0
    for ingress_id, emitted in result.assignments.items():
        chosen = emitted[0]
        expected = truth.get(ingress_id)
        if chosen.egress_ids == expected:
            continue
        candidate_set = result.candidates.get(ingress_id)
        index = None if candidate_set is None else candidate_set.index_of(expected)
        if index is None:
            continue
        wrong += 1
        if candidate_set.pds[index] < chosen.pds:
            lower += 1
    return lower / wrong if wrong else 0.0


def true_delays(spans_by_id, truth, ingress_ids):
    """ True delays of the given ingress spans, one array per delay
    position.
    """
    rows = []
    for ingress_id in sorted(ingress_ids):
        ingress = spans_by_id[ingress_id]
        egress = [spans_by_id[egress_id] for egress_id in truth[ingress_id]]
        reference = ingress.start_us
        row = []
        for span in egress:
            row.append(span.start_us - reference)
            reference = span.end_us
        row.append(ingress.end_us - reference)
        rows.append(row)
    if not rows:
        return []
    matrix = np.array(rows, dtype=np.int64)
    return [matrix[:, k] for k in range(matrix.shape[1])]


def ambiguity_ratios(result, truth, spans_by_id, levels=AMBIGUITY_LEVELS):
    """ For each level x, the fraction of ingress spans with candidates
    where, at some call position, two distinct egress spans lie at
    delays closer than x times the 90th percentile of the true delays
    of that position.

    :return: tuple of fractions, one per level, or :const:`None` when
             the result carries no candidates
    """
    if not result.candidates:
        return None
    with_candidates = [candidate_set for candidate_set in result.candidates.values() if len(candidate_set)]
    if not with_candidates:
        return tuple(0.0 for _ in levels)
    delays = true_delays(spans_by_id, truth, [candidate_set.ingress_id for candidate_set in with_candidates])
    p90 = np.array([np.percentile(column, 90) for column in delays[:-1]], dtype=float)
    counts = [0] * len(levels)
    for candidate_set in with_candidates:
        gaps = np.full(len(p90), np.inf)
        for k in range(len(p90)):
            rows, position_delays = candidate_set.rows[:, k], candidate_set.delays[:, k]
            # closest delay of each distinct egress span
            order = np.lexsort((position_delays, rows))
            rows, position_delays = rows[order], position_delays[order]
            first = np.ones(len(rows), dtype=bool)
            first[1:] = rows[1:] != rows[:-1]
            distinct = np.sort(position_delays[first])
            if len(distinct) > 1:
                gaps[k] = np.min(np.diff(distinct))
        for i, level in enumerate(levels):
            if np.any(gaps < level * p90):
                counts[i] += 1
    return tuple(count / len(with_candidates) for count in counts)


def span_overhead_rate(result, spans):
    """ Extra spans materialised by duplication per span of the
    service.
    """
    base = sum(1 for span in spans if span.service == result.service and span.duplicate_of is None)
    return result.duplicate_count / base if base else 0.0
