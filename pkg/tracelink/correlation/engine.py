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
The cross-thread correlation pipeline of one service.

    estimate mean delays -> find candidates -> split by certainty
    -> fit delay models on the certain delays -> score candidates
    -> greedy assignment -> (optionally) extra near-top candidates

Timings of the candidate-finding phase and of everything after it are
recorded on the result.
"""


from collections import defaultdict
from logging import getLogger
from time import perf_counter

import numpy as np

from tracelink.conf import CorrelatorConfig
from tracelink.correlation.assignment import greedy_assign
from tracelink.correlation.candidates import find_candidates
from tracelink.correlation.certainty import (
    certain_delays,
    split_certainty,
)
from tracelink.correlation.scoring import (
    score_by_cds,
    score_candidates,
)
from tracelink.exceptions import FitError
from tracelink.model import (
    EGRESS,
    INGRESS,
    CandidateAssignment,
    CorrelationResult,
)
from tracelink.spans import group_by_position
from tracelink.stats.estimation import estimate_means
from tracelink.stats.models import fit_models


__all__ = [
    "Correlator",
    "correlate",
    "correlate_dataset",
    "emit_multi_candidates",
]


log = getLogger("tracelink")


def emit_multi_candidates(result, candidates, config):
    """ Add, for each ingress span, every further candidate whose score
    is within ``multi_candidate_margin`` of its best one.

    An extra candidate's egress span is flagged as duplicated when
    another ingress span already holds it. The first claim on an egress
    span nobody holds is not a duplicate. With
    ``multi_candidate_quantile`` set, only ingress spans at least as
    long as that quantile of all ingress durations get extras.
    """
    margin = float(config.multi_candidate_margin)
    ordered = sorted((candidate_set for candidate_set in candidates.values() if len(candidate_set)),
                     key=lambda candidate_set: (candidate_set.ingress.start_us, candidate_set.ingress_id))
    cutoff = None
    if config.multi_candidate_quantile is not None and ordered:
        durations = np.array([candidate_set.ingress.duration_us for candidate_set in ordered])
        cutoff = float(np.quantile(durations, float(config.multi_candidate_quantile)))
    owner = {}
    for ingress_id, emitted in result.assignments.items():
        for egress_id in emitted[0].egress_ids:
            owner[egress_id] = ingress_id
    for candidate_set in ordered:
        ingress_id = candidate_set.ingress_id
        if cutoff is not None and candidate_set.ingress.duration_us < cutoff:
            continue
        primary = result.chosen_rows.get(ingress_id)
        emitted = list(result.assignments.get(ingress_id, ()))
        ranking = candidate_set.ranking()
        best = candidate_set.pds[ranking[0]]
        for row in ranking:
            if candidate_set.pds[row] < best - margin:
                break
            if row == primary:
                continue
            egress_ids = candidate_set.egress_ids(row)
            duplicated = []
            for egress_id in egress_ids:
                holder = owner.setdefault(egress_id, ingress_id)
                duplicated.append(holder != ingress_id)
            emitted.append(CandidateAssignment(egress_ids, candidate_set.pds[row], candidate_set.cds[row],
                                               duplicated))
        if emitted:
            result.assignments[ingress_id] = emitted
            result.unassigned.discard(ingress_id)
    result.multi_candidate = True
    log.debug("[MULTI]  duplicates=%d", result.duplicate_count)
    return result


class Correlator:
    """ Correlates the ingress and egress spans of one service.

    :param call_graph: :class:`.CallGraph` of the service
    :param config: :class:`.CorrelatorConfig`
    :param models: fitted :class:`.DelayModel` per delay position; when
                   given, no models are fitted
    """

    def __init__(self, call_graph, config=None, models=None):
        self.call_graph = call_graph
        self.config = config or CorrelatorConfig()
        self.models = models

    def __repr__(self):
        return "<Correlator service=%r>" % self.call_graph.service

    def _split(self, ingress, egress):
        service = self.call_graph.service
        ingress = sorted((span for span in ingress
                          if span.kind == INGRESS and span.service == service and span.duplicate_of is None),
                         key=lambda span: (span.start_us, span.span_id))
        egress = [span for span in egress if span.kind == EGRESS and span.service == service]
        return ingress, egress

    def _leaf(self, ingress):
        result = CorrelationResult(self.call_graph.service)
        for span in ingress:
            result.assignments[span.span_id] = [CandidateAssignment((), 0.0, 0.0)]
        return result

    def fit(self, candidates, high):
        """ Fit delay models on the high-certainty candidates.

        :return: (models, degraded); ``degraded`` is true when scoring
                 has to fall back to deviation scores
        """
        if self.models is not None:
            return self.models, False
        service = self.call_graph.service
        if len(high) < int(self.config.min_fit_samples):
            log.warning("[%s]  only %d high-certainty ingress spans, scoring by deviation", service, len(high))
            return [], True
        try:
            return fit_models(certain_delays(candidates, high), self.config.fit_config), False
        except FitError as error:
            log.warning("[%s]  delay fitting failed (%s), scoring by deviation", service, error)
            return [], True

    def correlate(self, ingress, egress):
        """ Run the pipeline over the spans of this service.

        :param ingress: ingress spans (spans of other services or kinds
                        are ignored)
        :param egress: egress spans, either flat or already grouped by
                       call position
        :return: :class:`.CorrelationResult`
        """
        graph = self.call_graph
        config = self.config
        if egress and isinstance(egress[0], (list, tuple)) and not hasattr(egress[0], "span_id"):
            ingress, _ = self._split(ingress, [])
            positions = [list(spans) for spans in egress]
        else:
            ingress, egress = self._split(ingress, egress)
            positions = group_by_position(egress, graph)
        if graph.is_leaf:
            return self._leaf(ingress)
        if not ingress:
            return CorrelationResult(graph.service, multi_candidate=config.multi_candidate)

        started = perf_counter()
        estimates = estimate_means(ingress, positions, graph)
        candidates = find_candidates(ingress, positions, estimates, config)
        found = perf_counter()

        high, _ = split_certainty(candidates, estimates, config)
        models, degraded = self.fit(candidates, high)
        if degraded:
            score_by_cds(candidates)
        else:
            score_candidates(candidates, models)
        result = greedy_assign(candidates, config, graph.service)
        if config.multi_candidate:
            emit_multi_candidates(result, candidates, config)
        finished = perf_counter()

        result.check_one_to_one()
        result.degraded = degraded
        result.high_certainty = len(high)
        result.models = models
        result.estimates = estimates
        result.candidates = candidates
        result.timings = {
            "candidate_find_ms": (found - started) * 1000.0,
            "correlate_ms": (finished - found) * 1000.0,
        }
        result.candidates_per_ingress_mean = sum(map(len, candidates.values())) / len(candidates)
        log.info("[%s]  correlated ingress=%d assigned=%d high=%d find=%.0fms correlate=%.0fms", graph.service,
                 len(ingress), len(result.assignments), len(high), result.timings["candidate_find_ms"],
                 result.timings["correlate_ms"])
        return result


def correlate(ingress, egress, call_graph, config=None, models=None):
    """ Correlate the ingress and egress spans of one service; see
    :class:`.Correlator`.
    """
    return Correlator(call_graph, config, models).correlate(ingress, egress)


def correlate_dataset(spans, call_graphs, config=None, models=None):
    """ Correlate every non-leaf service that has ingress spans.

    :param models: optional mapping of service name to fitted models
    :return: dict of service name to :class:`.CorrelationResult`
    """
    by_service = defaultdict(list)
    for span in spans:
        by_service[span.service].append(span)
    results = {}
    for service in sorted(call_graphs):
        graph = call_graphs[service]
        members = by_service.get(service, ())
        if graph.is_leaf or not any(span.kind == INGRESS for span in members):
            continue
        results[service] = correlate(members, members, graph, config, (models or {}).get(service))
    return results
