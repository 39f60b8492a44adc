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
Mean delay estimation without known correlations.

The mean of the differences between correlated timestamps equals the
difference between the means of the timestamps, so each position's
mean delay follows from per-position averages alone. Every difference
is taken between the two sorted timestamp arrays element by element,
which gives the same sum as the difference of the two sums without
summing epoch-sized integers.
"""


from collections import namedtuple

import numpy as np

from tracelink.exceptions import EstimationError


__all__ = [
    "DelayEstimate",
    "estimate_means",
]


class DelayEstimate(namedtuple("DelayEstimate", ["position", "mu", "total_mu", "sample_count"])):
    """ Estimated mean delay ``mu`` at one 1-based delay position, with
    the mean total delay of a request and the number of ingress spans
    it was estimated from.
    """


def _times(spans, attribute):
    return np.fromiter((getattr(span, attribute) for span in spans), dtype=np.int64, count=len(spans))


def _mean_difference(later, earlier):
    return float(np.sum(np.sort(later) - np.sort(earlier))) / len(later)


def estimate_means(ingress, egress_by_position, call_graph):
    """ Estimate the mean delay of every delay position of
    ``call_graph``.

    The first delay runs from ingress start to the start of the first
    egress span, each middle delay from the end of one egress span to
    the start of the next, and the last delay from the end of the last
    egress span to the ingress end. Means are taken as absolute values.

    :param ingress: ingress spans of one service
    :param egress_by_position: one list of egress spans per downstream
                               call, in call order
    :raise EstimationError: if there are no ingress spans, or a
                            position does not hold exactly one egress
                            span per ingress span
    :return: list of :class:`.DelayEstimate`, one per delay position
    """
    count = len(ingress)
    if count == 0:
        raise EstimationError("No ingress spans to estimate %s delays from" % call_graph.service)
    if len(egress_by_position) != call_graph.n:
        raise EstimationError("Service %s has %d call positions, got %d egress lists" % (
            call_graph.service, call_graph.n, len(egress_by_position)))
    for position, egress in enumerate(egress_by_position, start=1):
        if len(egress) != count:
            raise EstimationError("Service %s has %d ingress spans but %d egress spans at position %d" % (
                call_graph.service, count, len(egress), position))

    ingress_start = _times(ingress, "start_us")
    ingress_end = _times(ingress, "end_us")
    total = int(np.sum(ingress_end - ingress_start))
    means = []
    previous = ingress_start
    for egress in egress_by_position:
        start = _times(egress, "start_us")
        end = _times(egress, "end_us")
        means.append(abs(_mean_difference(start, previous)))
        total -= int(np.sum(end - start))
        previous = end
    means.append(abs(_mean_difference(ingress_end, previous)))
    total_mu = total / count
    return [DelayEstimate(position, mu, total_mu, count) for position, mu in enumerate(means, start=1)]
