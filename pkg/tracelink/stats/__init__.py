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
Delay statistics: mean estimation, distribution fitting and density
evaluation.
"""


from tracelink.stats.estimation import (
    DelayEstimate,
    estimate_means,
)
from tracelink.stats.goodness import (
    anderson_darling,
    chi_square,
    ks_test,
)
from tracelink.stats.mixture import GaussianMixture
from tracelink.stats.models import (
    EXPONENTIAL,
    GMM,
    LOGNORMAL,
    NORMAL,
    DelayModel,
    fit_model,
    fit_models,
    log_density,
)


__all__ = [
    "DelayEstimate",
    "estimate_means",
    "anderson_darling",
    "chi_square",
    "ks_test",
    "GaussianMixture",
    "EXPONENTIAL",
    "GMM",
    "LOGNORMAL",
    "NORMAL",
    "DelayModel",
    "fit_model",
    "fit_models",
    "log_density",
]
