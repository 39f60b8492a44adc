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
Cross-thread correlation of ingress and egress spans within a service.
"""


from tracelink.correlation.assignment import (
    greedy_assign,
    joint_search,
)
from tracelink.correlation.candidates import (
    Candidate,
    CandidateSet,
    Thresholds,
    compute_thresholds,
    find_candidates,
)
from tracelink.correlation.certainty import (
    certain_delays,
    gap_ratio,
    split_certainty,
)
from tracelink.correlation.engine import (
    Correlator,
    correlate,
    correlate_dataset,
    emit_multi_candidates,
)
from tracelink.correlation.scoring import (
    score_by_cds,
    score_candidates,
)


__all__ = [
    "greedy_assign",
    "joint_search",
    "Candidate",
    "CandidateSet",
    "Thresholds",
    "compute_thresholds",
    "find_candidates",
    "certain_delays",
    "gap_ratio",
    "split_certainty",
    "Correlator",
    "correlate",
    "correlate_dataset",
    "emit_multi_candidates",
    "score_by_cds",
    "score_candidates",
]
