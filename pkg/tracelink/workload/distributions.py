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
Delay and duration distributions of synthetic workloads.

All samples are integer microseconds. Draws below the minimum (one
microsecond by default) are redrawn.
"""


from math import exp, log, sqrt

import numpy as np
from scipy import stats

from tracelink.exceptions import SpecError


__all__ = [
    "NORMAL",
    "LOGNORMAL",
    "EXPONENTIAL",
    "MIXTURE",
    "CONSTANT",
    "DistributionSpec",
]


NORMAL = "normal"
LOGNORMAL = "lognormal"
EXPONENTIAL = "exponential"
MIXTURE = "mixture"
CONSTANT = "constant"

FAMILIES = (NORMAL, LOGNORMAL, EXPONENTIAL, MIXTURE, CONSTANT)

#: Largest admissible probability of a non-positive draw
MAX_NON_POSITIVE = 1e-6

#: Redraw rounds before giving up on a sample
MAX_REDRAWS = 100


class DistributionSpec:
    """ A parametric delay distribution, in microseconds.

    ============  ==========================================
    family        parameters
    ============  ==========================================
    normal        ``mean``, ``sd``
    lognormal     ``mu``, ``sigma`` (log scale) or ``mean``,
                  ``sigma``
    exponential   ``rate`` (per microsecond) or ``mean``
    mixture       ``components``: list of ``weight``,
                  ``mean``, ``sd``
    constant      ``value``
    ============  ==========================================
    """

    def __init__(self, family, **params):
        if family not in FAMILIES:
            raise SpecError("Unknown distribution family %r" % family)
        self.family = family
        try:
            self.params = self._normalise(family, params)
        except (KeyError, TypeError, ValueError) as error:
            raise SpecError("Invalid %s parameters %r: %s" % (family, params, error)) from error
        self._check_support()

    def __repr__(self):
        return "DistributionSpec(%r, %s)" % (self.family, ", ".join(
            "%s=%r" % item for item in sorted(self.params.items())))

    def __eq__(self, other):
        if not isinstance(other, DistributionSpec):
            return NotImplemented
        return self.family == other.family and self.params == other.params

    @staticmethod
    def _normalise(family, params):
        if family == NORMAL:
            mean, sd = float(params["mean"]), float(params["sd"])
            if not sd > 0:
                raise ValueError("sd must be positive")
            return {"mean": mean, "sd": sd}
        if family == LOGNORMAL:
            sigma = float(params["sigma"])
            if not sigma > 0:
                raise ValueError("sigma must be positive")
            if "mu" in params:
                mu = float(params["mu"])
            else:
                mean = float(params["mean"])
                if not mean > 0:
                    raise ValueError("mean must be positive")
                mu = log(mean) - sigma * sigma / 2
            return {"mu": mu, "sigma": sigma}
        if family == EXPONENTIAL:
            rate = float(params["rate"]) if "rate" in params else 1.0 / float(params["mean"])
            if not rate > 0:
                raise ValueError("rate must be positive")
            return {"rate": rate}
        if family == MIXTURE:
            components = [{"weight": float(c["weight"]), "mean": float(c["mean"]), "sd": float(c["sd"])}
                          for c in params["components"]]
            if not components:
                raise ValueError("a mixture needs at least one component")
            total = sum(c["weight"] for c in components)
            if any(c["weight"] <= 0 or c["sd"] <= 0 for c in components):
                raise ValueError("weights and sds must be positive")
            for c in components:
                c["weight"] /= total
            return {"components": components}
        value = float(params["value"])
        if not value >= 1:
            raise ValueError("value must be at least one microsecond")
        return {"value": value}

    def _check_support(self):
        if self.family == NORMAL:
            p = stats.norm.cdf(0.0, self.params["mean"], self.params["sd"])
        elif self.family == MIXTURE:
            p = sum(c["weight"] * stats.norm.cdf(0.0, c["mean"], c["sd"]) for c in self.params["components"])
        else:
            p = 0.0
        if p > MAX_NON_POSITIVE:
            raise SpecError("%r yields non-positive delays with probability %.3g" % (self, p))

    @property
    def mean(self):
        """ Analytic mean of the distribution.
        """
        p = self.params
        if self.family == NORMAL:
            return p["mean"]
        if self.family == LOGNORMAL:
            return exp(p["mu"] + p["sigma"] ** 2 / 2)
        if self.family == EXPONENTIAL:
            return 1.0 / p["rate"]
        if self.family == MIXTURE:
            return sum(c["weight"] * c["mean"] for c in p["components"])
        return p["value"]

    @property
    def sd(self):
        p = self.params
        if self.family == NORMAL:
            return p["sd"]
        if self.family == LOGNORMAL:
            return self.mean * sqrt(exp(p["sigma"] ** 2) - 1)
        if self.family == EXPONENTIAL:
            return 1.0 / p["rate"]
        if self.family == MIXTURE:
            m = self.mean
            return sqrt(sum(c["weight"] * (c["sd"] ** 2 + (c["mean"] - m) ** 2) for c in p["components"]))
        return 0.0

    def _draw(self, rng, size):
        p = self.params
        if self.family == NORMAL:
            return rng.normal(p["mean"], p["sd"], size)
        if self.family == LOGNORMAL:
            return rng.lognormal(p["mu"], p["sigma"], size)
        if self.family == EXPONENTIAL:
            return rng.exponential(1.0 / p["rate"], size)
        if self.family == MIXTURE:
            components = p["components"]
            choice = rng.choice(len(components), size=size, p=[c["weight"] for c in components])
            means = np.array([c["mean"] for c in components])[choice]
            sds = np.array([c["sd"] for c in components])[choice]
            return rng.normal(means, sds)
        return np.full(size, p["value"])

    def sample(self, rng, size=None, minimum=1):
        """ Draw integer microsecond samples from ``rng`` (a numpy
        :class:`~numpy.random.Generator`), redrawing any below
        ``minimum``.

        :return: an int for ``size=None``, else an int64 array
        """
        n = 1 if size is None else int(size)
        values = np.rint(self._draw(rng, n)).astype(np.int64)
        for _ in range(MAX_REDRAWS):
            low = values < minimum
            if not low.any():
                break
            values[low] = np.rint(self._draw(rng, int(low.sum()))).astype(np.int64)
        else:
            raise SpecError("%r cannot produce samples of at least %d us" % (self, minimum))
        if size is None:
            return int(values[0])
        return values

    def to_dict(self):
        data = {"family": self.family}
        data.update(self.params)
        return data

    @classmethod
    def from_dict(cls, data):
        """ Build a spec from a mapping with a ``family`` key; a bare
        number stands for a constant.
        """
        if isinstance(data, (int, float)):
            return cls(CONSTANT, value=data)
        if isinstance(data, DistributionSpec):
            return data
        try:
            params = dict(data)
            family = params.pop("family")
        except (KeyError, TypeError, ValueError) as error:
            raise SpecError("Malformed distribution document %r" % (data,)) from error
        return cls(family, **params)
