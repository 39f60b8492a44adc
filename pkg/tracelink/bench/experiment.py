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
Experiment grids: simulate a preset at several concurrency levels and
seeds, run each algorithm over it and measure the outcome.
"""


from collections import (
    defaultdict,
    namedtuple,
)
from concurrent.futures import ProcessPoolExecutor
from logging import getLogger

from tracelink.bench.baselines import (
    exhaustive_oracle,
    nearest_neighbor_baseline,
)
from tracelink.bench.metrics import (
    MetricsRow,
    ambiguity_ratios,
    span_accuracy,
    span_overhead_rate,
    wrong_with_lower_true_pds,
)
from tracelink.conf import CorrelatorConfig
from tracelink.correlation.engine import correlate
from tracelink.exceptions import (
    ConfigurationError,
    OracleGuardError,
)
from tracelink.graph import (
    reconstruct,
    trace_accuracy,
)
from tracelink.model import INGRESS
from tracelink.workload import (
    generate,
    preset,
    retime,
)


__all__ = [
    "GREEDY",
    "GREEDY_MULTI",
    "NEAREST_NEIGHBOR",
    "EXHAUSTIVE_ORACLE",
    "ALGORITHMS",
    "ALGORITHM_ALIASES",
    "ADAPTIVE",
    "FIXED",
    "ExperimentSpec",
    "run_cell",
    "run_experiment",
]


log = getLogger("tracelink")


GREEDY = "greedy"
GREEDY_MULTI = "greedy_multi"
NEAREST_NEIGHBOR = "nearest_neighbor"
EXHAUSTIVE_ORACLE = "exhaustive_oracle"

ALGORITHMS = (GREEDY, GREEDY_MULTI, NEAREST_NEIGHBOR, EXHAUSTIVE_ORACLE)

#: Other accepted spellings of algorithm names
ALGORITHM_ALIASES = {
    "crosstrace": GREEDY,
    "crosstrace_multi": GREEDY_MULTI,
}

ADAPTIVE = "adaptive"
FIXED = "fixed"

DEFAULT_FIXED_THRESHOLD_US = 2500


class ExperimentSpec(namedtuple("ExperimentSpec", [
    "preset", "levels", "seeds", "algorithms", "threshold_mode", "fixed_threshold_us", "request_count", "config",
])):
    """ An experiment grid.

    :param preset: workload preset name
    :param levels: concurrency levels
    :param seeds: seeds; each seed simulates its own dataset
    :param algorithms: algorithm names out of :const:`ALGORITHMS` or
                       :const:`ALGORITHM_ALIASES`
    :param threshold_mode: :const:`ADAPTIVE` or :const:`FIXED`
    :param fixed_threshold_us: the threshold of fixed mode
    :param request_count: requests per dataset, or :const:`None` for the
                          preset's default
    :param config: :class:`.CorrelatorConfig` or a dict of its settings
    """

    def __new__(cls, preset, levels, seeds=(0,), algorithms=(GREEDY,), threshold_mode=ADAPTIVE,
                fixed_threshold_us=DEFAULT_FIXED_THRESHOLD_US, request_count=None, config=None):
        levels = tuple(int(level) for level in levels)
        seeds = tuple(int(seed) for seed in seeds)
        algorithms = tuple(ALGORITHM_ALIASES.get(algorithm, algorithm) for algorithm in algorithms)
        if not levels or any(level <= 0 for level in levels):
            raise ConfigurationError("Concurrency levels must be positive, got %r" % (levels,))
        if not seeds:
            raise ConfigurationError("At least one seed is required")
        unknown = [algorithm for algorithm in algorithms if algorithm not in ALGORITHMS]
        if unknown or not algorithms:
            raise ConfigurationError("Unknown algorithms %r (expected some of %s)" % (unknown, ", ".join(ALGORITHMS)))
        if threshold_mode not in (ADAPTIVE, FIXED):
            raise ConfigurationError("Threshold mode must be %r or %r, got %r" % (ADAPTIVE, FIXED, threshold_mode))
        if not isinstance(config, CorrelatorConfig):
            config = CorrelatorConfig(config or {})
        if threshold_mode == FIXED:
            config = config.replace(fixed_threshold_us=float(fixed_threshold_us))
        return super().__new__(cls, preset, levels, seeds, algorithms, threshold_mode, fixed_threshold_us,
                               request_count, config)

    def cells(self):
        return [(level, seed) for level in self.levels for seed in self.seeds]


class _Cell:
    """ One simulated dataset and everything run over it.
    """

    def __init__(self, spec, level, seed):
        self.spec = spec
        self.level = level
        self.seed = seed
        dataset = generate(preset(spec.preset, spec.request_count, seed))
        self.dataset = retime(dataset, level, seed)
        self.truth = self.dataset.ground_truth
        members = defaultdict(list)
        for span in self.dataset.spans:
            members[span.service].append(span)
        graphs = sorted(self.dataset.call_graphs.items())
        self.services = [(service, graph, members[service]) for service, graph in graphs
                         if not graph.is_leaf and any(span.kind == INGRESS for span in members[service])]
        self.models = {}

    def greedy(self, multi=False):
        config = self.spec.config.replace(multi_candidate=multi)
        results = {}
        for service, graph, spans in self.services:
            results[service] = result = correlate(spans, spans, graph, config)
            if not result.degraded:
                self.models.setdefault(service, result.models)
        return results

    def nearest_neighbor(self):
        return {service: nearest_neighbor_baseline(spans, spans, graph) for service, graph, spans in self.services}

    def exhaustive_oracle(self):
        results = {}
        for service, graph, spans in self.services:
            models = self.models.get(service)
            if models is None:
                fitted = correlate(spans, spans, graph, self.spec.config)
                if fitted.degraded:
                    raise OracleGuardError("No delay models could be fitted for %s" % service)
                models = self.models[service] = fitted.models
            results[service] = exhaustive_oracle(spans, spans, graph, models, self.spec.config)
        return results

    def run(self, algorithm):
        if algorithm == GREEDY:
            return self.greedy()
        if algorithm == GREEDY_MULTI:
            return self.greedy(multi=True)
        if algorithm == NEAREST_NEIGHBOR:
            return self.nearest_neighbor()
        return self.exhaustive_oracle()

    def rows(self, algorithm, results):
        graph = reconstruct(self.dataset.spans, results, self.dataset.inter_links())
        trace_level = trace_accuracy(graph, self.truth).trace_level
        rows = []
        for service, result in sorted(results.items()):
            ratios = ambiguity_ratios(result, self.truth, self.dataset.spans_by_id) or (None, None)
            rows.append(MetricsRow(
                algorithm, service, self.level, self.seed,
                span_accuracy(result, self.truth),
                trace_level,
                wrong_with_lower_true_pds(result, self.truth),
                ratios[0],
                ratios[1],
                result.timings["candidate_find_ms"],
                result.timings["correlate_ms"],
                result.candidates_per_ingress_mean,
                span_overhead_rate(result, self.dataset.spans),
            ))
        return rows


def run_cell(spec, level, seed):
    """ Run every algorithm of ``spec`` over one (level, seed) dataset.

    :return: (rows, skipped) where ``skipped`` holds ``(row key,
             reason)`` pairs of algorithms that refused to run
    """
    cell = _Cell(spec, level, seed)
    rows = []
    skipped = []
    for algorithm in spec.algorithms:
        try:
            results = cell.run(algorithm)
        except OracleGuardError as error:
            log.warning("[BENCH]  skipped %s at concurrency %d seed %d: %s", algorithm, level, seed, error)
            skipped.append(((algorithm, spec.preset, level, seed), str(error)))
            continue
        cell_rows = cell.rows(algorithm, results)
        for row in cell_rows:
            log.info("[BENCH]  %s %s concurrency=%d seed=%d accuracy=%.4f find=%.0fms correlate=%.0fms",
                     row.algorithm, row.service, row.concurrency, row.seed, row.span_accuracy,
                     row.candidate_find_ms, row.correlate_ms)
        rows.extend(cell_rows)
    return rows, skipped


def _run_cell(arguments):
    return run_cell(*arguments)


def run_experiment(spec, skipped=None, workers=1):
    """ Run a whole experiment grid.

    Each (level, seed) cell is independent; with ``workers`` above one
    cells run in separate processes, each single-threaded.

    :param skipped: optional list that receives ``(row key, reason)``
                    pairs for every refused run
    :return: list of :class:`.MetricsRow`, ordered by level, seed, then
             algorithm as given and service
    """
    cells = spec.cells()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            outcomes = list(executor.map(_run_cell, [(spec, level, seed) for level, seed in cells]))
    else:
        outcomes = [run_cell(spec, level, seed) for level, seed in cells]
    rows = []
    for cell_rows, cell_skipped in outcomes:
        rows.extend(cell_rows)
        if skipped is not None:
            skipped.extend(cell_skipped)
    return rows
