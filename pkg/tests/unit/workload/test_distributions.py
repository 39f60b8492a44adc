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



from math import exp, log

import numpy as np
import pytest
from numpy.random import default_rng

from tracelink.exceptions import SpecError
from tracelink.workload.distributions import (
    CONSTANT,
    EXPONENTIAL,
    LOGNORMAL,
    MIXTURE,
    NORMAL,
    DistributionSpec,
)

# python -m pytest tests/unit/workload/test_distributions.py -s -v


def test_lognormal_from_mean():
    spec = DistributionSpec(LOGNORMAL, mean=1000, sigma=0.5)
    assert spec.params["mu"] == pytest.approx(log(1000) - 0.125)
    assert spec.mean == pytest.approx(1000)


def test_lognormal_from_mu():
    spec = DistributionSpec(LOGNORMAL, mu=5.0, sigma=0.2)
    assert spec.mean == pytest.approx(exp(5.02))


def test_exponential_rate_or_mean():
    assert DistributionSpec(EXPONENTIAL, mean=250).params == {"rate": 0.004}
    assert DistributionSpec(EXPONENTIAL, rate=0.01).mean == pytest.approx(100)


def test_mixture_weights_are_normalised():
    spec = DistributionSpec(MIXTURE, components=[
        {"weight": 1, "mean": 1000, "sd": 100},
        {"weight": 3, "mean": 5000, "sd": 100},
    ])
    assert [c["weight"] for c in spec.params["components"]] == [0.25, 0.75]
    assert spec.mean == pytest.approx(4000)


def test_constant():
    spec = DistributionSpec.from_dict(300)
    assert spec.family == CONSTANT
    assert spec.sample(default_rng(0)) == 300
    assert spec.sd == 0.0


@pytest.mark.parametrize("family,params", [
    ("gamma", {"shape": 2}),
    (NORMAL, {"mean": 100}),
    (NORMAL, {"mean": 100, "sd": -1}),
    (LOGNORMAL, {"mean": -5, "sigma": 0.5}),
    (EXPONENTIAL, {"rate": 0}),
    (MIXTURE, {"components": []}),
    (CONSTANT, {"value": 0}),
])
def test_invalid_specs(family, params):
    with pytest.raises(SpecError):
        DistributionSpec(family, **params)


def test_normal_with_mass_below_zero_is_rejected():
    with pytest.raises(SpecError):
        DistributionSpec(NORMAL, mean=100, sd=60)


def test_samples_are_positive_integers():
    spec = DistributionSpec(LOGNORMAL, mean=50, sigma=1.0)
    values = spec.sample(default_rng(1), size=10000)
    assert values.dtype == np.int64
    assert values.min() >= 1


def test_sample_minimum():
    spec = DistributionSpec(NORMAL, mean=1000, sd=200)
    values = spec.sample(default_rng(2), size=5000, minimum=900)
    assert values.min() >= 900


def test_unreachable_minimum():
    with pytest.raises(SpecError):
        DistributionSpec(CONSTANT, value=10).sample(default_rng(0), minimum=11)


def test_samples_are_seeded():
    spec = DistributionSpec(MIXTURE, components=[{"weight": 0.5, "mean": 1000, "sd": 100},
                                                 {"weight": 0.5, "mean": 5000, "sd": 100}])
    assert np.array_equal(spec.sample(default_rng(9), 100), spec.sample(default_rng(9), 100))


@pytest.mark.parametrize("spec", [
    DistributionSpec(NORMAL, mean=5000, sd=500),
    DistributionSpec(LOGNORMAL, mean=5000, sigma=0.3),
    DistributionSpec(EXPONENTIAL, mean=5000),
])
def test_sample_moments(spec):
    values = spec.sample(default_rng(3), size=20000)
    assert values.mean() == pytest.approx(spec.mean, rel=0.03)
    assert values.std() == pytest.approx(spec.sd, rel=0.05)


def test_document_round_trip():
    spec = DistributionSpec(LOGNORMAL, mean=1000, sigma=0.5)
    assert DistributionSpec.from_dict(spec.to_dict()) == spec


def test_malformed_document():
    with pytest.raises(SpecError):
        DistributionSpec.from_dict({"mean": 5})
