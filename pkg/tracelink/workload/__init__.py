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
Synthetic workload simulation: generation, re-timing and event
emission.
"""


from tracelink.workload.distributions import (
    CONSTANT,
    EXPONENTIAL,
    LOGNORMAL,
    MIXTURE,
    NORMAL,
    DistributionSpec,
)
from tracelink.workload.events import emit_events
from tracelink.workload.generator import (
    Dataset,
    Wiring,
    WorkloadSpec,
    generate,
)
from tracelink.workload.presets import (
    preset,
    preset_names,
)
from tracelink.workload.retiming import (
    measure_concurrency,
    retime,
)


__all__ = [
    "CONSTANT",
    "EXPONENTIAL",
    "LOGNORMAL",
    "MIXTURE",
    "NORMAL",
    "DistributionSpec",
    "Dataset",
    "Wiring",
    "WorkloadSpec",
    "emit_events",
    "generate",
    "measure_concurrency",
    "preset",
    "preset_names",
    "retime",
]
