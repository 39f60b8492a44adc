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
Candidate scoring by probability density.
"""


from logging import getLogger

import numpy as np


__all__ = [
    "score_candidates",
    "score_by_cds",
]


log = getLogger("tracelink")


def score_candidates(candidates, models):
    """ Fill the probability density score of every candidate: the sum
    over delay positions of the clamped log-density of its delay under
    that position's model.

    All delays of one position are evaluated in a single call.
    """
    sets = [candidate_set for candidate_set in candidates.values() if len(candidate_set)]
    if not sets:
        return candidates
    delays = np.vstack([candidate_set.delays for candidate_set in sets]).astype(float)
    if delays.shape[1] != len(models):
        raise ValueError("%d delay positions but %d models" % (delays.shape[1], len(models)))
    scores = np.zeros(len(delays))
    for k, model in enumerate(models):
        scores += model.log_density(delays[:, k])
    offset = 0
    for candidate_set in sets:
        size = len(candidate_set)
        candidate_set.pds = scores[offset:offset + size]
        offset += size
    log.debug("[SCORE]  candidates=%d", len(scores))
    return candidates


def score_by_cds(candidates):
    """ Score candidates by their negated deviation score, for when no
    density models are available.
    """
    for candidate_set in candidates.values():
        candidate_set.pds = -np.asarray(candidate_set.cds, dtype=float)
    return candidates
