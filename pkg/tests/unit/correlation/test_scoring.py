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



from math import inf

import numpy as np
import pytest

from tracelink.conf import CorrelatorConfig
from tracelink.correlation import (
    Thresholds,
    find_candidates,
    score_by_cds,
    score_candidates,
)
from tracelink.stats import (
    NORMAL,
    DelayModel,
)

from .helpers import (
    egress,
    ingress,
)

# python -m pytest tests/unit/correlation/test_scoring.py -s -v


def candidates():
    spans = [ingress("i", 0, 1000), ingress("j", 5000, 6000)]
    calls = [egress("e", 100, 600), egress("f", 300, 700), egress("g", 5100, 5600)]
    thresholds = Thresholds(np.array([1000.0, 1000.0]), inf, np.array([100.0, 400.0]))
    return find_candidates(spans, [calls], None, CorrelatorConfig(), thresholds)


MODELS = [DelayModel(1, NORMAL, {"mu": 100.0, "sigma": 20.0}), DelayModel(2, NORMAL, {"mu": 400.0, "sigma": 50.0})]


def test_scores_sum_log_densities():
    scored = score_candidates(candidates(), MODELS)
    candidate_set = scored["i"]
    row = candidate_set.index_of(("e",))
    expected = MODELS[0].log_density(100.0) + MODELS[1].log_density(400.0)
    assert candidate_set.pds[row] == pytest.approx(expected)
    assert candidate_set.ranking()[0] == row


def test_far_delays_hit_the_floor():
    scored = score_candidates(candidates(), MODELS)
    candidate_set = scored["i"]
    row = candidate_set.index_of(("f",))
    assert candidate_set.pds[row] >= 2 * -700.0
    assert candidate_set.pds[row] < candidate_set.pds[candidate_set.index_of(("e",))]


def test_every_set_is_scored():
    scored = score_candidates(candidates(), MODELS)
    assert not np.isnan(scored["j"].pds).any()


def test_model_count_must_match():
    with pytest.raises(ValueError):
        score_candidates(candidates(), MODELS[:1])


def test_empty_candidates():
    assert score_candidates({}, MODELS) == {}


def test_scoring_by_deviation():
    scored = score_by_cds(candidates())
    candidate_set = scored["i"]
    assert candidate_set.pds.tolist() == (-candidate_set.cds).tolist()
    assert candidate_set.egress_ids(candidate_set.ranking()[0]) == ("e",)
