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
One-dimensional Gaussian mixtures fitted by expectation-maximization.
"""


from math import log, pi

import numpy as np
from numpy.random import default_rng
from scipy.special import logsumexp
from scipy.stats import norm

from tracelink.exceptions import (
    DegenerateModelError,
    FitError,
)


__all__ = [
    "GaussianMixture",
]


LOG_2PI = log(2 * pi)

#: Relative log-likelihood drop tolerated between EM iterations before
#: the fit is considered broken
MONOTONICITY_SLACK = 1e-9


class GaussianMixture:
    """ Gaussian mixture of ``n_components`` scalar components.

    Each restart seeds the means by k-means++ and iterates EM until the
    log-likelihood improves by less than ``tol`` relative, or
    ``max_iter`` iterations pass; the restart with the best final
    log-likelihood is kept. Variances never drop below
    ``var_floor_ratio`` times the sample variance.

    After :meth:`fit`, the parameters are in ``weights_``, ``means_``
    and ``variances_``, and the per-iteration log-likelihoods of the
    kept restart in ``log_likelihood_history``.
    """

    def __init__(self, n_components, restarts=10, max_iter=200, tol=1e-6, seed=0, var_floor_ratio=1e-6):
        if n_components < 1:
            raise ValueError("A mixture needs at least one component")
        self.n_components = int(n_components)
        self.restarts = int(restarts)
        self.max_iter = int(max_iter)
        self.tol = float(tol)
        self.seed = seed
        self.var_floor_ratio = float(var_floor_ratio)
        self.weights_ = None
        self.means_ = None
        self.variances_ = None
        self.log_likelihood_ = None
        self.log_likelihood_history = []
        self.converged_ = False
        self.n_iter_ = 0

    def __repr__(self):
        return "<GaussianMixture n_components=%d log_likelihood=%r>" % (self.n_components, self.log_likelihood_)

    @property
    def n_parameters(self):
        return 3 * self.n_components - 1

    def _seed_means(self, x, rng, centres=None):
        centres = list(centres) if centres is not None else [x[rng.integers(len(x))]]
        for _ in range(len(centres), self.n_components):
            d2 = np.min((x[:, None] - np.array(centres)[None, :]) ** 2, axis=1)
            total = d2.sum()
            if total > 0:
                centres.append(x[rng.choice(len(x), p=d2 / total)])
            else:
                centres.append(x[rng.integers(len(x))])
        return np.array(centres)

    def _initial_parameters(self, x, rng, floor, centres=None):
        means = self._seed_means(x, rng, centres)
        nearest = np.argmin(np.abs(x[:, None] - means[None, :]), axis=1)
        weights = np.empty(self.n_components)
        variances = np.empty(self.n_components)
        overall = x.var()
        for k in range(self.n_components):
            members = x[nearest == k]
            weights[k] = max(len(members), 1) / len(x)
            variances[k] = members.var() if len(members) > 1 else overall
        weights /= weights.sum()
        return weights, means, np.maximum(variances, floor)

    @staticmethod
    def _joint_log_density(x, weights, means, variances):
        with np.errstate(divide="ignore"):
            log_weights = np.log(weights)
        return log_weights[None, :] - 0.5 * (LOG_2PI + np.log(variances)[None, :]
                                             + (x[:, None] - means[None, :]) ** 2 / variances[None, :])

    def _run(self, x, rng, floor, centres=None):
        weights, means, variances = self._initial_parameters(x, rng, floor, centres)
        history = []
        converged = False
        n = len(x)
        for _ in range(self.max_iter):
            joint = self._joint_log_density(x, weights, means, variances)
            per_sample = logsumexp(joint, axis=1)
            log_likelihood = float(per_sample.sum())
            if history and log_likelihood - history[-1] < self.tol * abs(history[-1]):
                history.append(log_likelihood)
                converged = True
                break
            history.append(log_likelihood)
            responsibility = np.exp(joint - per_sample[:, None])
            mass = responsibility.sum(axis=0) + 10 * np.finfo(float).eps
            weights = mass / n
            means = responsibility.T @ x / mass
            variances = np.maximum((responsibility * (x[:, None] - means[None, :]) ** 2).sum(axis=0) / mass, floor)
        return weights / weights.sum(), means, variances, history, converged

    def fit(self, x, init_means=None):
        """ Fit the mixture to the sample ``x``.

        ``init_means``, usually the means of a fit with one component
        fewer, seeds the first restart; the missing centres are drawn
        by k-means++ as usual.

        :raise DegenerateModelError: if the sample has zero variance
        :raise FitError: if the log-likelihood decreases between two EM
                         iterations
        """
        x = np.asarray(x, dtype=float)
        if len(x) < self.n_components:
            raise FitError("Cannot fit %d components to %d samples" % (self.n_components, len(x)))
        variance = x.var()
        if not variance > 0:
            raise DegenerateModelError("Cannot fit a mixture to a zero-variance sample")
        floor = self.var_floor_ratio * variance
        best = None
        for restart in range(self.restarts):
            rng = default_rng([self.seed if self.seed is not None else 0, self.n_components, restart])
            centres = init_means if restart == 0 and init_means is not None else None
            if centres is not None and len(centres) >= self.n_components:
                centres = None
            run = self._run(x, rng, floor, centres)
            self.check_monotone(run[3])
            if best is None or run[3][-1] > best[3][-1]:
                best = run
        self.weights_, self.means_, self.variances_, self.log_likelihood_history, self.converged_ = best
        self.n_iter_ = len(self.log_likelihood_history)
        self.log_likelihood_ = float(np.sum(self.log_pdf(x)))
        return self

    @staticmethod
    def check_monotone(history):
        """ Raise :class:`.FitError` if ``history`` ever decreases by
        more than rounding allows.
        """
        for before, after in zip(history, history[1:]):
            if after < before - MONOTONICITY_SLACK * max(abs(before), 1.0):
                raise FitError("EM log-likelihood decreased from %r to %r" % (before, after))

    def log_pdf(self, x):
        """ Natural-log density of the mixture, unclamped.
        """
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return logsumexp(self._joint_log_density(x, self.weights_, self.means_, self.variances_), axis=1)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        scales = np.sqrt(self.variances_)
        return np.sum(self.weights_ * norm.cdf(x[..., None], self.means_, scales), axis=-1)

    def bic(self, x):
        """ Bayesian information criterion of the fitted mixture on
        ``x``.
        """
        n = len(x)
        return self.n_parameters * log(n) - 2.0 * float(np.sum(self.log_pdf(x)))
