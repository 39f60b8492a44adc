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
Tracelink reconstructs distributed traces from socket-level events
without in-band context propagation: events are folded into spans,
spans of one service are correlated across threads by their timing,
and correlated spans are assembled into traces.
"""


__all__ = [
    "__version__",
    "Span",
    "EventRecord",
    "CallGraph",
    "GroundTruth",
    "CorrelationResult",
    "CandidateAssignment",
    "CorrelatorConfig",
    "FitConfig",
    "build_spans",
    "propagate_span_ids",
    "Correlator",
    "correlate",
    "correlate_dataset",
    "fit_models",
    "reconstruct",
    "trace_accuracy",
    "ExperimentalWarning",
]


from logging import getLogger

from tracelink.conf import (
    CorrelatorConfig,
    FitConfig,
)
from tracelink.correlation import (
    Correlator,
    correlate,
    correlate_dataset,
)
from tracelink.graph import (
    reconstruct,
    trace_accuracy,
)
from tracelink.meta import (
    ExperimentalWarning,
    version as __version__,
)
from tracelink.model import (
    CallGraph,
    CandidateAssignment,
    CorrelationResult,
    EventRecord,
    GroundTruth,
    Span,
)
from tracelink.spans import (
    build_spans,
    propagate_span_ids,
)
from tracelink.stats import fit_models


log = getLogger("tracelink")
