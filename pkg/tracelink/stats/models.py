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
Delay distribution models.

Each delay position gets one model. Normal, lognormal and exponential
fits are tried first and the one with the lowest BIC is kept when the
Kolmogorov-Smirnov test does not reject it; otherwise Gaussian
mixtures of growing size are fitted and the lowest-BIC mixture is kept,
unless the best parametric fit still has the lower BIC.
"""


from logging import getLogger
from math import exp

import numpy as np
from numpy.random import default_rng
from scipy import stats

from tracelink.conf import FitConfig
from tracelink.exceptions import (
    DegenerateModelError,
    FitError,
)
from tracelink.stats.goodness import (
    anderson_darling,
    chi_square,
    ks_test,
)
from tracelink.stats.mixture import GaussianMixture


__all__ = [
    "NORMAL",
    "LOGNORMAL",
    "EXPONENTIAL",
    "GMM",
    "DelayModel",
    "fit_model",
    "fit_models",
    "log_density",
]


log = getLogger("tracelink")

NORMAL = "normal"
LOGNORMAL = "lognormal"
EXPONENTIAL = "exponential"
GMM = "gmm"

PARAMETRIC_FAMILIES = (NORMAL, LOGNORMAL, EXPONENTIAL)

_PARAMETER_COUNTS = {NORMAL: 2, LOGNORMAL: 2, EXPONENTIAL: 1}

DEFAULT_FLOOR = -700.0


def _frozen(family, params):
    if family == NORMAL:
        return stats.norm(loc=params["mu"], scale=params["sigma"])
    if family == LOGNORMAL:
        return stats.lognorm(s=params["sigma"], scale=exp(params["mu"]))
    if family == EXPONENTIAL:
        return stats.expon(scale=1.0 / params["rate"])
    raise ValueError("No scipy distribution for family %r" % family)


def _mixture(params):
    mixture = GaussianMixture(len(params["weights"]))
    mixture.weights_ = np.asarray(params["weights"], dtype=float)
    mixture.means_ = np.asarray(params["means"], dtype=float)
    mixture.variances_ = np.asarray(params["variances"], dtype=float)
    return mixture


class DelayModel:
    """ Fitted distribution of the delay at one 1-based position.

    ``params`` holds ``mu`` and ``sigma`` for normal fits, ``mu`` and
    ``sigma`` of the logarithm for lognormal fits, ``rate`` for
    exponential fits and ``weights``, ``means`` and ``variances`` lists
    for mixtures. ``diagnostics`` holds the goodness-of-fit statistics
    and BIC; ``alternatives`` the BIC of every model the selection
    passed over.
    """

    def __init__(self, position, family, params, diagnostics=None, alternatives=None, floor=DEFAULT_FLOOR):
        self.position = position
        self.family = family
        self.params = params
        self.diagnostics = dict(diagnostics or {})
        self.alternatives = dict(alternatives or {})
        self.floor = floor
        if family == GMM:
            weights = np.asarray(params["weights"], dtype=float)
            if abs(weights.sum() - 1.0) > 1e-9:
                raise FitError("Mixture weights sum to %r" % weights.sum(), position=position)
            if np.any(np.asarray(params["variances"], dtype=float) <= 0):
                raise FitError("Mixture variances must be positive", position=position)
            self._impl = _mixture(params)
        elif family in PARAMETRIC_FAMILIES:
            self._impl = _frozen(family, params)
        else:
            raise FitError("Unknown model family %r" % family, position=position)

    def __repr__(self):
        return "<DelayModel position=%r family=%r params=%r>" % (self.position, self.family, self.params)

    @property
    def component_count(self):
        if self.family == GMM:
            return len(self.params["weights"])
        return None

    @property
    def bic(self):
        return self.diagnostics.get("bic")

    @property
    def mean(self):
        if self.family == GMM:
            return float(np.dot(self.params["weights"], self.params["means"]))
        return float(self._impl.mean())

    def log_pdf(self, d):
        """ Unclamped natural-log density.
        """
        if self.family == GMM:
            values = self._impl.log_pdf(d)
            return values if np.ndim(d) else float(values[0])
        return self._impl.logpdf(d)

    def pdf(self, d):
        return np.exp(self.log_pdf(d))

    def cdf(self, d):
        return self._impl.cdf(d)

    def log_density(self, d):
        """ Natural-log density of ``d``, never below the floor. Works
        on scalars and numpy arrays alike.
        """
        with np.errstate(divide="ignore", invalid="ignore"):
            values = np.asarray(self.log_pdf(d), dtype=float)
        values = np.where(np.isnan(values), self.floor, np.maximum(values, self.floor))
        if np.ndim(d):
            return values
        return float(values)

    def to_dict(self):
        return {
            "position": int(self.position),
            "family": self.family,
            "params": {key: ([float(v) for v in value] if isinstance(value, (list, tuple, np.ndarray))
                             else float(value)) for key, value in self.params.items()},
            "diagnostics": {key: float(value) for key, value in self.diagnostics.items()},
            "alternatives": {key: float(value) for key, value in self.alternatives.items()},
            "floor": float(self.floor),
        }

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(data["position"], data["family"], data["params"], data.get("diagnostics"),
                       data.get("alternatives"), data.get("floor", DEFAULT_FLOOR))
        except (KeyError, TypeError) as error:
            raise FitError("Malformed delay model document: %s" % error) from error


def log_density(model, d):
    """ Clamped natural-log density of ``d`` under ``model``.
    """
    return model.log_density(d)


def _bic(log_likelihood, n_params, n):
    return n_params * np.log(n) - 2.0 * log_likelihood


def _parametric_params(family, x):
    if family == NORMAL:
        return {"mu": float(x.mean()), "sigma": float(x.std())}
    if family == LOGNORMAL:
        logs = np.log(x)
        return {"mu": float(logs.mean()), "sigma": float(logs.std())}
    return {"rate": float(1.0 / x.mean())}


def _dequantised(x, seed):
    """ Spread integer-valued delays uniformly over their rounding
    interval. Ties would otherwise inflate the goodness-of-fit
    statistics and let mixture components collapse onto single values.
    Other samples are returned unchanged.
    """
    if not np.array_equal(x, np.rint(x)):
        return x
    rng = default_rng([0 if seed is None else int(seed), len(x)])
    return x + rng.uniform(-0.5, 0.5, len(x))


def _diagnose(x, family, cdf, log_likelihood, n_params):
    ks_stat, ks_pvalue = ks_test(x, cdf)
    chi2_stat, chi2_pvalue, _ = chi_square(x, cdf, n_params)
    return {
        "ks_stat": ks_stat,
        "ks_pvalue": ks_pvalue,
        "ad_stat": anderson_darling(x, family, cdf),
        "chi2_stat": chi2_stat,
        "chi2_pvalue": chi2_pvalue,
        "bic": _bic(log_likelihood, n_params, len(x)),
        "log_likelihood": log_likelihood,
    }


def _fit_parametric(x, position, floor):
    positive = bool(np.all(x > 0))
    models = []
    for family in PARAMETRIC_FAMILIES:
        if family != NORMAL and not positive:
            continue
        params = _parametric_params(family, x)
        if family == LOGNORMAL and not params["sigma"] > 0:
            continue
        frozen = _frozen(family, params)
        log_likelihood = float(np.sum(frozen.logpdf(x)))
        if not np.isfinite(log_likelihood):
            continue
        diagnostics = _diagnose(x, family, frozen.cdf, log_likelihood, _PARAMETER_COUNTS[family])
        models.append(DelayModel(position, family, params, diagnostics, floor=floor))
    return models


def _fit_mixtures(x, position, config):
    best = None
    bics = {}
    stale = 0
    previous = None
    for components in range(1, int(config.gmm_max_components) + 1):
        if components > len(x):
            break
        mixture = GaussianMixture(components, restarts=config.gmm_restarts, max_iter=config.gmm_max_iter,
                                  tol=config.gmm_tol, seed=config.seed)
        mixture.fit(x, init_means=None if previous is None else previous.means_)
        previous = mixture
        bic = mixture.bic(x)
        bics[components] = (bic, mixture)
        if best is None or bic < bics[best][0]:
            best = components
            stale = 0
        else:
            stale += 1
            if config.gmm_patience is not None and stale >= int(config.gmm_patience):
                break
    bic, mixture = bics[best]
    params = {"weights": mixture.weights_.tolist(), "means": mixture.means_.tolist(),
              "variances": mixture.variances_.tolist()}
    diagnostics = _diagnose(x, GMM, mixture.cdf, mixture.log_likelihood_, mixture.n_parameters)
    diagnostics["em_iterations"] = mixture.n_iter_
    alternatives = {"gmm(%d)" % c: b for c, (b, _) in bics.items() if c != best}
    return DelayModel(position, GMM, params, diagnostics, alternatives, floor=config.density_floor)


def fit_model(delays, position, config=None):
    """ Fit the delay distribution of one position.

    Integer-valued samples, such as differences of microsecond
    timestamps, are dequantised by seeded uniform jitter before
    anything is fitted. When no parametric family passes the KS gate
    the mixture scan runs, but a mixture is only selected if its BIC
    beats the best parametric fit.

    :param delays: sample of delays, in microseconds
    :param position: 1-based delay position
    :param config: :class:`.FitConfig` (defaults apply when omitted)
    :raise FitError: if the sample is smaller than ``min_fit_samples``
    :raise DegenerateModelError: if the sample has zero variance
    :return: :class:`.DelayModel`
    """
    config = config or FitConfig()
    x = np.asarray(delays, dtype=float)
    if len(x) < int(config.min_fit_samples):
        raise FitError("Position %d has %d delays, at least %d are needed" % (
            position, len(x), config.min_fit_samples), position=position)
    if not np.all(np.isfinite(x)):
        raise FitError("Position %d has non-finite delays" % position, position=position)
    if not x.var() > 0:
        raise DegenerateModelError("Position %d has zero-variance delays" % position, position=position)

    x = _dequantised(x, config.seed)
    candidates = _fit_parametric(x, position, config.density_floor)
    chosen = min(candidates, key=lambda model: model.bic) if candidates else None
    if chosen is not None and chosen.diagnostics["ks_pvalue"] >= float(config.ks_alpha):
        chosen.alternatives = {model.family: model.bic for model in candidates if model is not chosen}
        log.debug("[FIT]  position=%d family=%s bic=%.1f ks_p=%.3f", position, chosen.family,
                  chosen.bic, chosen.diagnostics["ks_pvalue"])
        return chosen
    model = _fit_mixtures(x, position, config)
    if chosen is not None and chosen.bic < model.bic:
        chosen.alternatives = {candidate.family: candidate.bic for candidate in candidates if candidate is not chosen}
        chosen.alternatives["gmm(%d)" % model.component_count] = model.bic
        chosen.alternatives.update(model.alternatives)
        log.debug("[FIT]  position=%d family=%s bic=%.1f beats gmm bic=%.1f despite ks_p=%.4f", position,
                  chosen.family, chosen.bic, model.bic, chosen.diagnostics["ks_pvalue"])
        return chosen
    model.diagnostics.update({"rejected_%s_bic" % candidate.family: candidate.bic for candidate in candidates})
    log.debug("[FIT]  position=%d family=gmm components=%d bic=%.1f", position, model.component_count, model.bic)
    return model


def fit_models(delays_by_position, config=None):
    """ Fit one model per delay position; ``delays_by_position[k - 1]``
    holds the delays of position ``k``.
    """
    return [fit_model(delays, position, config) for position, delays in enumerate(delays_by_position, start=1)]
