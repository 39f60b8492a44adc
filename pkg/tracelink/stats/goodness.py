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
Goodness-of-fit statistics of fitted delay models.
"""


from math import ceil, log2

import numpy as np
from scipy import stats


__all__ = [
    "ks_test",
    "anderson_darling",
    "chi_square",
]


#: Smallest expected count of a chi-square bin
MIN_EXPECTED = 5.0

_SCIPY_ANDERSON = {"normal": "norm", "exponential": "expon"}


def ks_test(sample, cdf):
    """ One-sample Kolmogorov-Smirnov test against a callable CDF.

    :return: (statistic, p-value)
    """
    result = stats.kstest(np.asarray(sample, dtype=float), cdf)
    return float(result.statistic), float(result.pvalue)


def anderson_darling(sample, family, cdf=None):
    """ Anderson-Darling statistic of ``sample``.

    Normal and exponential samples are tested with scipy's estimated
    parameter variants, lognormal samples as normal on the log scale.
    Other families need ``cdf`` and are tested against it directly.
    """
    x = np.asarray(sample, dtype=float)
    if family in _SCIPY_ANDERSON:
        return float(stats.anderson(x, _SCIPY_ANDERSON[family]).statistic)
    if family == "lognormal":
        return float(stats.anderson(np.log(x), "norm").statistic)
    if cdf is None:
        raise ValueError("A CDF is required for family %r" % family)
    n = len(x)
    u = np.clip(cdf(np.sort(x)), 1e-300, 1.0 - 1e-16)
    i = np.arange(1, n + 1)
    return float(-n - np.sum((2 * i - 1) * (np.log(u) + np.log1p(-u[::-1]))) / n)


def _merge_bins(observed, expected):
    merged_observed, merged_expected = [], []
    o_acc = e_acc = 0.0
    for o, e in zip(observed, expected):
        o_acc += o
        e_acc += e
        if e_acc >= MIN_EXPECTED:
            merged_observed.append(o_acc)
            merged_expected.append(e_acc)
            o_acc = e_acc = 0.0
    if e_acc > 0 or o_acc > 0:
        if merged_expected:
            merged_observed[-1] += o_acc
            merged_expected[-1] += e_acc
        else:
            merged_observed.append(o_acc)
            merged_expected.append(e_acc)
    return np.array(merged_observed), np.array(merged_expected)


def chi_square(sample, cdf, n_params):
    """ Chi-square goodness of fit over Sturges' bins spanning the
    sample, the outer bins open-ended, adjacent bins merged until each
    expects at least five observations.

    :return: (statistic, p-value, bin count); the p-value is NaN when
             no degrees of freedom remain
    """
    x = np.asarray(sample, dtype=float)
    n = len(x)
    k = int(ceil(log2(n))) + 1
    edges = np.linspace(x.min(), x.max(), k + 1)
    observed, _ = np.histogram(x, bins=edges)
    probabilities = np.diff(np.concatenate(([0.0], cdf(edges[1:-1]), [1.0])))
    observed, expected = _merge_bins(observed, n * probabilities)
    expected = np.maximum(expected, 1e-12)
    statistic = float(np.sum((observed - expected) ** 2 / expected))
    dof = len(expected) - 1 - n_params
    pvalue = float(stats.chi2.sf(statistic, dof)) if dof > 0 else float("nan")
    return statistic, pvalue, len(expected)
