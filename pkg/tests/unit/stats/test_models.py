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



import numpy as np
import pytest
from numpy.random import default_rng
from scipy.integrate import quad

from tracelink.conf import FitConfig
from tracelink.exceptions import (
    DegenerateModelError,
    FitError,
)
from tracelink.stats import (
    EXPONENTIAL,
    GMM,
    LOGNORMAL,
    NORMAL,
    DelayModel,
    fit_model,
    fit_models,
    log_density,
)

# python -m pytest tests/unit/stats/test_models.py -s -v


FAST = FitConfig(gmm_max_components=4, gmm_restarts=3)


def test_normal_sample_gets_a_parametric_model():
    model = fit_model(default_rng(1).normal(5000, 300, 2000), 1, FAST)
    assert model.family in (NORMAL, LOGNORMAL)
    assert model.mean == pytest.approx(5000, rel=0.01)
    assert model.diagnostics["ks_pvalue"] >= 0.05
    assert set(model.alternatives) == {NORMAL, LOGNORMAL, EXPONENTIAL} - {model.family}


def test_exponential_sample():
    model = fit_model(default_rng(2).exponential(800, 2000) + 1, 2, FAST)
    assert model.family == EXPONENTIAL
    assert model.position == 2
    assert model.params["rate"] == pytest.approx(1 / 800, rel=0.06)


def test_bimodal_sample_falls_back_to_a_mixture():
    rng = default_rng(3)
    sample = np.concatenate([rng.normal(1000, 100, 1000), rng.normal(5000, 100, 1000)])
    model = fit_model(sample, 1, FAST)
    assert model.family == GMM
    assert model.component_count == 2
    assert sorted(model.params["means"]) == pytest.approx([1000, 5000], abs=25)
    assert "gmm(1)" in model.alternatives
    assert "rejected_normal_bic" in model.diagnostics
    assert model.diagnostics["em_iterations"] >= 1


def test_patience_stops_growing_mixtures():
    rng = default_rng(4)
    sample = np.concatenate([rng.normal(1000, 100, 500), rng.normal(5000, 100, 500)])
    config = FitConfig(gmm_max_components=8, gmm_restarts=2, gmm_patience=1)
    model = fit_model(sample, 1, config)
    assert model.component_count == 2
    assert set(model.alternatives) == {"gmm(1)", "gmm(3)"}


def test_negative_delays_only_fit_normal_or_mixture():
    model = fit_model(default_rng(5).normal(0, 50, 500), 1, FAST)
    assert model.family in (NORMAL, GMM)


def test_too_few_delays():
    with pytest.raises(FitError) as error:
        fit_model([1.0, 2.0, 3.0], 4)
    assert error.value.position == 4


def test_zero_variance_delays():
    with pytest.raises(DegenerateModelError):
        fit_model(np.full(100, 7.0), 1)


def test_non_finite_delays():
    sample = default_rng(6).normal(100, 5, 100)
    sample[3] = np.nan
    with pytest.raises(FitError):
        fit_model(sample, 1)


def test_fit_models_numbers_positions():
    rng = default_rng(7)
    models = fit_models([rng.normal(1000, 50, 200), rng.normal(3000, 50, 200)], FAST)
    assert [model.position for model in models] == [1, 2]


def test_log_density_is_floored():
    model = DelayModel(1, NORMAL, {"mu": 1000.0, "sigma": 10.0})
    assert model.log_density(1000.0) == pytest.approx(-np.log(10.0) - 0.5 * np.log(2 * np.pi))
    assert model.log_density(1e9) == -700.0
    assert log_density(model, 1e9) == -700.0


def test_log_density_outside_support():
    model = DelayModel(1, LOGNORMAL, {"mu": 5.0, "sigma": 0.5}, floor=-50.0)
    assert model.log_density(-10.0) == -50.0
    values = model.log_density(np.array([-10.0, 150.0]))
    assert values.shape == (2,)
    assert values[0] == -50.0
    assert values[1] > -50.0


def test_mixture_model_densities():
    model = DelayModel(1, GMM, {"weights": [0.5, 0.5], "means": [0.0, 100.0], "variances": [1.0, 1.0]})
    assert model.component_count == 2
    assert model.mean == pytest.approx(50.0)
    assert model.log_density(0.0) == pytest.approx(np.log(0.5) - 0.5 * np.log(2 * np.pi))
    assert model.cdf(50.0) == pytest.approx(0.5)
    assert isinstance(model.log_density(0.0), float)


@pytest.mark.parametrize("family,params", [
    (GMM, {"weights": [0.5, 0.4], "means": [0.0, 1.0], "variances": [1.0, 1.0]}),
    (GMM, {"weights": [0.5, 0.5], "means": [0.0, 1.0], "variances": [1.0, 0.0]}),
    ("gamma", {"shape": 1.0}),
])
def test_invalid_models(family, params):
    with pytest.raises(FitError):
        DelayModel(1, family, params)


def test_document_round_trip():
    model = fit_model(default_rng(8).lognormal(7, 0.4, 500), 3, FAST)
    again = DelayModel.from_dict(model.to_dict())
    assert again.family == model.family
    assert again.params == pytest.approx(model.params)
    assert again.log_density(1000.0) == pytest.approx(model.log_density(1000.0))
    assert again.bic == pytest.approx(model.bic)


def test_malformed_document():
    with pytest.raises(FitError):
        DelayModel.from_dict({"family": NORMAL})


def integer_lognormal(rng):
    return np.rint(rng.lognormal(np.log(80) - 0.045, 0.3, 10000))


def integer_normal(rng):
    return np.rint(rng.normal(400, 40, 5000))


def exponential(rng):
    return rng.exponential(800, 3000) + 1


def bimodal(rng):
    return np.concatenate([rng.normal(1000, 100, 1500), rng.normal(5000, 200, 1500)])


def skewed_bimodal(rng):
    return np.concatenate([rng.lognormal(np.log(300), 0.2, 2000), rng.lognormal(np.log(900), 0.4, 500)])


SAMPLES = [integer_lognormal, integer_normal, exponential, bimodal, skewed_bimodal]


def passed_over(model):
    bics = dict(model.alternatives)
    bics.update({key: value for key, value in model.diagnostics.items() if key.startswith("rejected_")})
    return bics


@pytest.mark.parametrize("draw", SAMPLES)
def test_selected_model_has_the_lowest_bic(draw):
    model = fit_model(draw(default_rng(11)), 1, FAST)
    bics = passed_over(model)
    assert bics
    assert all(model.bic <= bic for bic in bics.values())


def test_integer_delays_keep_their_family():
    model = fit_model(integer_lognormal(default_rng(12)), 3, FAST)
    assert model.family == LOGNORMAL
    assert model.mean == pytest.approx(80, rel=0.02)


def test_parametric_fit_is_kept_when_no_mixture_beats_it():
    sample = default_rng(14).lognormal(np.log(500), 0.6, 2000)
    model = fit_model(sample, 1, FitConfig(ks_alpha=0.99, gmm_max_components=3, gmm_restarts=2))
    assert model.family in (LOGNORMAL, GMM)
    assert all(model.bic <= bic for bic in passed_over(model).values())
    if model.family == LOGNORMAL and model.diagnostics["ks_pvalue"] < 0.99:
        assert "gmm(1)" in model.alternatives


def support(model):
    """ Integration bounds holding all but a negligible share of the
    mass, with breakpoints at the modes.
    """
    p = model.params
    if model.family == NORMAL:
        return p["mu"] - 12 * p["sigma"], p["mu"] + 12 * p["sigma"], [p["mu"]]
    if model.family == LOGNORMAL:
        return 0.0, float(np.exp(p["mu"] + 12 * p["sigma"])), [float(np.exp(p["mu"]))]
    if model.family == EXPONENTIAL:
        return 0.0, 50.0 / p["rate"], [1.0 / p["rate"]]
    means = np.asarray(p["means"])
    sds = np.sqrt(np.asarray(p["variances"]))
    return float(np.min(means - 12 * sds)), float(np.max(means + 12 * sds)), sorted(means.tolist())


@pytest.mark.parametrize("draw", SAMPLES)
def test_fitted_density_integrates_to_one(draw):
    model = fit_model(draw(default_rng(15)), 1, FAST)
    lo, hi, points = support(model)
    points = [point for point in points if lo < point < hi]
    mass, _ = quad(lambda d: float(model.pdf(d)), lo, hi, points=points, limit=500)
    assert mass == pytest.approx(1.0, abs=1e-3)
