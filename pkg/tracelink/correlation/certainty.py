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
High-certainty extraction.

An ingress span is certain when its best candidate by deviation score
beats the runner-up by a relative gap of at least the difference
threshold, and no other ingress span's best candidate uses any of the
same egress spans. An ingress span with a single candidate is always
certain, whatever other spans pick.
"""


from collections import Counter
from logging import getLogger
from math import inf

import numpy as np

from tracelink.conf import CorrelatorConfig


__all__ = [
    "top_by_cds",
    "gap_ratio",
    "split_certainty",
    "certain_delays",
]


log = getLogger("tracelink")


def top_by_cds(candidate_set):
    """ Index of the candidate with the smallest deviation score; ties
    go to the smaller total delay.
    """
    return int(np.argmin(candidate_set.cds))


def gap_ratio(cds):
    """ Relative gap between the smallest and second smallest deviation
    scores. A lone candidate has an infinite gap, as does a zero best
    score followed by a positive one.
    """
    if len(cds) < 2:
        return inf
    first, second = np.partition(np.asarray(cds, dtype=float), 1)[:2]
    if first == 0:
        return inf if second > 0 else 0.0
    return (second - first) / first


def split_certainty(candidates, estimates=None, config=None):
    """ Partition the ingress span ids of ``candidates`` into high and
    low certainty sets. Ingress spans without candidates are always low.

    :return: (high, low) sets of ingress span ids
    """
    config = config or CorrelatorConfig()
    threshold = float(config.diff_threshold)
    top_keys = {}
    usage = Counter()
    for ingress_id, candidate_set in candidates.items():
        if len(candidate_set) == 0:
            continue
        keys = tuple(candidate_set.keys[top_by_cds(candidate_set)].tolist())
        top_keys[ingress_id] = keys
        usage.update(keys)
    high, low = set(), set()
    for ingress_id, candidate_set in candidates.items():
        keys = top_keys.get(ingress_id)
        if keys is None:
            low.add(ingress_id)
        elif len(candidate_set) == 1:
            # forced
            high.add(ingress_id)
        elif gap_ratio(candidate_set.cds) >= threshold and all(usage[key] == 1 for key in keys):
            high.add(ingress_id)
        else:
            low.add(ingress_id)
    log.debug("[CERTAINTY]  high=%d low=%d", len(high), len(low))
    return high, low


def certain_delays(candidates, high):
    """ Delays of the best candidate of every high-certainty ingress
    span, one array per delay position.
    """
    rows = [candidates[ingress_id].delays[top_by_cds(candidates[ingress_id])] for ingress_id in sorted(high)]
    if not rows:
        return []
    matrix = np.vstack(rows)
    return [matrix[:, k] for k in range(matrix.shape[1])]
