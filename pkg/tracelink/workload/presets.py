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
Ready-made workloads.

``hotel``
    A hotel-reservation style topology. The frontend calls search,
    profile and reservation; search calls geo and rate and spends a
    long time (about 12 ms) after its last call before answering.

``frontend``
    The frontend of ``hotel`` with its downstream services collapsed
    into leaves of fixed call durations; the default accuracy workload.

``chain``
    Three services calling each other in a line, A -> B -> C.

``bimodal``
    One service whose first delay has two modes, a workload that
    defeats every single parametric family.

``leaf``
    A single service with no downstream calls.
"""


from tracelink.exceptions import SpecError
from tracelink.model import (
    GRPC,
    HTTP,
    CallGraph,
)
from tracelink.workload.distributions import (
    LOGNORMAL,
    MIXTURE,
    DistributionSpec,
)
from tracelink.workload.generator import WorkloadSpec


__all__ = [
    "PRESETS",
    "preset",
    "preset_names",
]


def _lognormal(mean, sigma):
    return DistributionSpec(LOGNORMAL, mean=mean, sigma=sigma)


def _hotel(request_count, seed):
    graphs = [
        CallGraph("frontend", [("search", GRPC), ("profile", GRPC), ("reservation", GRPC)]),
        CallGraph("search", [("geo", GRPC), ("rate", GRPC)]),
        CallGraph("profile"),
        CallGraph("reservation"),
        CallGraph("geo"),
        CallGraph("rate"),
    ]
    delays = {
        "frontend": [_lognormal(120, 0.3), _lognormal(80, 0.3), _lognormal(80, 0.3), _lognormal(150, 0.3)],
        "search": [_lognormal(100, 0.3), _lognormal(80, 0.3), _lognormal(12000, 0.25)],
        "profile": [_lognormal(20000, 0.5)],
        "reservation": [_lognormal(15000, 0.5)],
        "geo": [_lognormal(10000, 0.5)],
        "rate": [_lognormal(8000, 0.6)],
    }
    return WorkloadSpec(graphs, delays, request_count=request_count, seed=seed)


def _frontend(request_count, seed):
    graphs = [
        CallGraph("frontend", [("search", GRPC), ("profile", GRPC), ("reservation", GRPC)]),
        CallGraph("search"),
        CallGraph("profile"),
        CallGraph("reservation"),
    ]
    delays = {
        "frontend": [_lognormal(120, 0.3), _lognormal(80, 0.3), _lognormal(80, 0.3), _lognormal(150, 0.3)],
        "search": [_lognormal(30000, 0.4)],
        "profile": [_lognormal(20000, 0.5)],
        "reservation": [_lognormal(15000, 0.5)],
    }
    durations = {
        "frontend": {
            "search": _lognormal(30100, 0.4),
            "profile": _lognormal(20100, 0.5),
            "reservation": _lognormal(15100, 0.5),
        },
    }
    return WorkloadSpec(graphs, delays, durations, request_count=request_count, seed=seed)


def _chain(request_count, seed):
    graphs = [
        CallGraph("a", [("b", HTTP)]),
        CallGraph("b", [("c", HTTP)]),
        CallGraph("c"),
    ]
    delays = {
        "a": [_lognormal(200, 0.4), _lognormal(300, 0.4)],
        "b": [_lognormal(150, 0.4), _lognormal(250, 0.4)],
        "c": [_lognormal(2000, 0.5)],
    }
    return WorkloadSpec(graphs, delays, request_count=request_count, seed=seed)


def _bimodal(request_count, seed):
    graphs = [
        CallGraph("bimodal", [("backend", GRPC)]),
        CallGraph("backend"),
    ]
    two_modes = DistributionSpec(MIXTURE, components=[
        {"weight": 0.5, "mean": 1000, "sd": 100},
        {"weight": 0.5, "mean": 5000, "sd": 100},
    ])
    delays = {
        "bimodal": [two_modes, _lognormal(500, 0.3)],
        "backend": [_lognormal(5000, 0.4)],
    }
    return WorkloadSpec(graphs, delays, request_count=request_count, seed=seed)


def _leaf(request_count, seed):
    return WorkloadSpec([CallGraph("leaf")], {"leaf": [_lognormal(2000, 0.5)]},
                        request_count=request_count, seed=seed)


#: Preset name to (builder, default request count)
PRESETS = {
    "hotel": (_hotel, 10000),
    "frontend": (_frontend, 10000),
    "chain": (_chain, 1000),
    "bimodal": (_bimodal, 10000),
    "leaf": (_leaf, 5),
}


def preset_names():
    return sorted(PRESETS)


def preset(name, request_count=None, seed=0):
    """ Build the :class:`.WorkloadSpec` of a named preset.

    :raise SpecError: for an unknown preset name
    """
    try:
        builder, default_count = PRESETS[name]
    except KeyError:
        raise SpecError("Unknown preset %r (expected one of %s)" % (name, ", ".join(preset_names())))
    return builder(default_count if request_count is None else request_count, seed)
