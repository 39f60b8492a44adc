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
Re-timing of independent requests to a target concurrency.

Concurrency is the mean number of root requests whose ingress spans
overlap a given root ingress span, the span itself included, so a
dataset of back-to-back requests sits at level 1. Each request is
shifted rigidly by one offset, which keeps every duration and every
delay inside it.
"""


from logging import getLogger

import numpy as np
from numpy.random import default_rng

from tracelink.exceptions import ParameterError


__all__ = [
    "measure_concurrency",
    "retime",
]


log = getLogger("tracelink")

#: Relative distance from the target at which calibration stops
CALIBRATION_TOLERANCE = 0.02

#: Window rescaling rounds before calibration gives up
CALIBRATION_ROUNDS = 60


def _mean_overlap(starts, ends):
    if len(starts) == 0:
        return 0.0
    sorted_starts = np.sort(starts)
    sorted_ends = np.sort(ends)
    begun = np.searchsorted(sorted_starts, ends, side="left")
    finished = np.searchsorted(sorted_ends, starts, side="right")
    return float(np.mean(begun - finished))


def _root_bounds(dataset):
    spans = dataset.spans_by_id
    roots = [spans[members[0]] for members in dataset.requests]
    starts = np.array([span.start_us for span in roots], dtype=np.int64)
    ends = np.array([span.end_us for span in roots], dtype=np.int64)
    return starts, ends


def measure_concurrency(dataset):
    """ Mean number of root requests overlapping each root request,
    itself included.
    """
    starts, ends = _root_bounds(dataset)
    return _mean_overlap(starts, ends)


def retime(dataset, concurrency, seed=0):
    """ Shift each request of ``dataset`` by its own offset so that the
    measured concurrency approximates ``concurrency``.

    Offsets are uniform draws over a window whose length is calibrated
    on one fixed set of draws: it starts from the length at which
    ``concurrency - 1`` other requests overlap on average and is
    rescaled until the measured level is within 2% of the target.

    :raise ParameterError: if ``concurrency`` is not positive, or not
                           below the number of requests
    :return: a new :class:`.Dataset` with the same ground truth
    """
    if concurrency <= 0:
        raise ParameterError("Concurrency must be positive, got %r" % concurrency)
    requests = dataset.requests
    count = len(requests)
    if count == 0:
        return dataset.with_spans(dataset.spans, concurrency)
    if concurrency == 1:
        return dataset.with_spans(dataset.spans, 1)
    if concurrency >= count:
        raise ParameterError("Concurrency %r is unreachable with %d requests" % (concurrency, count))

    starts, ends = _root_bounds(dataset)
    durations = ends - starts
    origin = int(starts.min())
    draws = default_rng(seed).random(count)
    window = 2.0 * (count - 1) * float(durations.mean()) / (concurrency - 1)
    measured = None
    for _ in range(CALIBRATION_ROUNDS):
        new_starts = origin + np.floor(draws * window).astype(np.int64)
        measured = _mean_overlap(new_starts, new_starts + durations)
        if abs(measured - concurrency) <= CALIBRATION_TOLERANCE * concurrency:
            break
        if measured > 1.0:
            window *= (measured - 1.0) / (concurrency - 1.0)
        else:
            window /= 2.0
    else:
        log.warning("[RETIME]  calibration stopped at concurrency %.1f for target %r", measured, concurrency)

    shifts = (new_starts - starts).tolist()
    shift_of = {}
    for members, shift in zip(requests, shifts):
        for span_id in members:
            shift_of[span_id] = shift
    spans = []
    for span in dataset.spans:
        shift = shift_of.get(span.span_id, 0)
        spans.append(span._replace(start_us=span.start_us + shift, end_us=span.end_us + shift) if shift else span)
    log.debug("[RETIME]  target=%r measured=%.1f window=%.0fus", concurrency, measured, window)
    return dataset.with_spans(spans, concurrency)
